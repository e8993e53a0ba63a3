import numpy as np
import pytest

from dialspeech.audio import (
    AudioSpec,
    CANONICAL_SPEC,
    ChannelMap,
    compute_duration,
    downmix,
    read_wav,
    split_channels,
    standardize_audio,
    standardize_file,
    write_wav,
)
from dialspeech.audio.ops import quantize16, resample
from dialspeech.errors import (
    ChannelCountMismatch,
    MissingChannelMap,
    SpecMismatch,
    UndecodableAudio,
)


def sine(freq, seconds, rate, amp=0.5):
    t = np.arange(int(seconds * rate)) / rate
    return amp * np.sin(2 * np.pi * freq * t)


def test_canonical_spec():
    assert CANONICAL_SPEC == AudioSpec(16000, 1, 16)


def test_silence_passthrough_shape():
    stereo = np.zeros((44100, 2), dtype=np.int16)
    out = standardize_audio(stereo, AudioSpec(44100, 2, 16))
    assert out.dtype == np.int16
    assert out.ndim == 1
    assert len(out) == 16000
    assert not out.any()


def test_sine_spectral_peak_preserved():
    stereo = quantize16(np.stack([sine(440, 2, 44100)] * 2, axis=1))
    out = standardize_audio(stereo, AudioSpec(44100, 2, 16))
    assert len(out) == 32000
    spectrum = np.abs(np.fft.rfft(out.astype(np.float64)))
    peak = int(np.argmax(spectrum))
    bin_hz = 16000 / len(out)
    assert abs(peak * bin_hz - 440) <= bin_hz


def test_already_canonical_is_bit_identical():
    mono = quantize16(sine(300, 1, 16000))
    out = standardize_audio(mono, AudioSpec(16000, 1, 16))
    assert out is mono


def test_spec_mismatch_on_wrong_channel_count():
    stereo = np.zeros((100, 2), dtype=np.int16)
    with pytest.raises(SpecMismatch):
        standardize_audio(stereo, AudioSpec(44100, 1, 16))


def test_energy_preserved_below_cutoff():
    for freq in (440, 1000, 6900):
        tone = sine(freq, 1, 44100)
        out = standardize_audio(quantize16(tone), AudioSpec(44100, 1, 16))
        rms_in = np.sqrt(np.mean(tone**2))
        rms_out = np.sqrt(np.mean((out / 32768.0) ** 2))
        assert abs(rms_out / rms_in - 1) < 0.01


def test_duration_preserved_within_one_sample():
    rng = np.random.default_rng(3)
    for rate in (8000, 22050, 44100, 48000):
        n = int(rng.integers(rate // 2, 3 * rate))
        x = quantize16(rng.uniform(-0.3, 0.3, n))
        out = standardize_audio(x, AudioSpec(rate, 1, 16))
        assert abs(len(out) / 16000 - n / rate) < 1 / 16000


def test_downmix_examples():
    x = quantize16(sine(200, 0.1, 16000))
    same = np.stack([x, x], axis=1)
    assert np.array_equal(downmix(same), x.astype(np.float64))
    opposite = np.stack([x, -x], axis=1)
    assert not downmix(opposite).any()


def test_downmix_matches_mean_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        channels = int(rng.integers(2, 5))
        n = int(rng.integers(10, 200))
        x = rng.integers(-32768, 32767, size=(n, channels)).astype(np.int16)
        got = downmix(x)
        expected = [sum(int(v) for v in frame) / channels for frame in x]
        assert got == pytest.approx(expected, abs=0)


def test_downmix_linearity():
    rng = np.random.default_rng(12)
    a = rng.uniform(-0.4, 0.4, (500, 3))
    b = rng.uniform(-0.4, 0.4, (500, 3))
    lhs = quantize16(downmix(a + b))
    rhs = quantize16(downmix(a) + downmix(b))
    assert np.max(np.abs(lhs.astype(int) - rhs.astype(int))) <= 1


def test_split_channels():
    left = quantize16(sine(300, 0.05, 16000))
    right = quantize16(sine(500, 0.05, 16000))
    stereo = np.stack([left, right], axis=1)
    cmap = ChannelMap.from_dict({0: "alice", 1: "badr"})
    out = split_channels(stereo, cmap)
    assert [s for s, _ in out] == ["alice", "badr"]
    assert np.array_equal(out[0][1], left)
    assert np.array_equal(out[1][1], right)


def test_split_channels_errors():
    stereo = np.zeros((10, 2), dtype=np.int16)
    with pytest.raises(MissingChannelMap):
        split_channels(stereo, None)
    with pytest.raises(ChannelCountMismatch):
        split_channels(np.zeros((10, 3), dtype=np.int16), ChannelMap.from_dict({0: "a"}))
    with pytest.raises(ChannelCountMismatch):
        split_channels(stereo, ChannelMap.from_dict({0: "a", 2: "b"}))
    with pytest.raises(ChannelCountMismatch):
        ChannelMap((tuple([0, "a"]), tuple([0, "b"])))


def test_compute_duration():
    assert compute_duration(16000, 16000) == 1.0
    assert compute_duration(8000, 16000) == 0.5
    assert compute_duration(44100, 44100) == 1.0
    assert compute_duration(1234, 16000) == 0.077  # millisecond precision


def test_resample_rational_lengths():
    out = resample(np.zeros(88200), 44100, 16000)
    assert len(out) == 32000


def test_wav_round_trip(tmp_path):
    x = quantize16(np.stack([sine(250, 0.2, 22050), sine(400, 0.2, 22050)], axis=1))
    p = tmp_path / "t.wav"
    write_wav(p, x, 22050)
    y, rate = read_wav(p)
    assert rate == 22050
    assert np.array_equal(x, y)


def test_wav_reader_rejects_garbage(tmp_path):
    p = tmp_path / "bad.wav"
    p.write_bytes(b"not audio at all")
    with pytest.raises(UndecodableAudio):
        read_wav(p)


def test_wav_reader_detects_truncation(tmp_path):
    p = tmp_path / "t.wav"
    write_wav(p, quantize16(sine(300, 0.1, 16000)), 16000)
    data = p.read_bytes()
    p.write_bytes(data[:-100])  # declared data size now exceeds payload
    with pytest.raises(SpecMismatch):
        read_wav(p)


def test_wav_float_and_24bit_payloads(tmp_path):
    import struct

    # float32 WAV
    samples = sine(313, 0.05, 16000).astype(np.float32)
    payload = samples.tobytes()
    header = b"".join(
        [
            b"RIFF", struct.pack("<I", 36 + len(payload)), b"WAVE",
            b"fmt ", struct.pack("<IHHIIHH", 16, 3, 1, 16000, 64000, 4, 32),
            b"data", struct.pack("<I", len(payload)),
        ]
    )
    p = tmp_path / "f32.wav"
    p.write_bytes(header + payload)
    y, rate = read_wav(p)
    assert rate == 16000 and y.dtype == np.float32
    assert np.allclose(y, samples)

    # 24-bit PCM: value 0x010203 little-endian plus a negative sample
    vals = [0x010203, -4]
    raw = b"".join(int(v & 0xFFFFFF).to_bytes(3, "little") for v in vals)
    header = b"".join(
        [
            b"RIFF", struct.pack("<I", 36 + len(raw)), b"WAVE",
            b"fmt ", struct.pack("<IHHIIHH", 16, 1, 1, 16000, 48000, 3, 24),
            b"data", struct.pack("<I", len(raw)),
        ]
    )
    p24 = tmp_path / "p24.wav"
    p24.write_bytes(header + raw)
    y, _ = read_wav(p24)
    assert list(y) == vals


def test_standardize_file_splits_channels(tmp_path):
    left = quantize16(sine(300, 0.2, 16000))
    right = quantize16(sine(700, 0.2, 16000))
    src = tmp_path / "conv.wav"
    write_wav(src, np.stack([left, right], axis=1), 16000)
    outputs = standardize_file(src, tmp_path / "out.wav", ChannelMap.from_dict({0: "A", 1: "B"}))
    assert [o[0] for o in outputs] == ["A", "B"]
    got_left, rate = read_wav(outputs[0][1])
    assert rate == 16000
    assert np.array_equal(got_left, left)


def test_canonical_wav_header_exact(tmp_path):
    p = tmp_path / "c.wav"
    write_wav(p, quantize16(sine(440, 0.25, 16000)), 16000)
    blob = p.read_bytes()
    # fmt chunk: PCM, 1 channel, 16000 Hz, 32000 B/s, block align 2, 16 bit
    import struct

    fmt = struct.unpack_from("<HHIIHH", blob, 20)
    assert fmt == (1, 1, 16000, 32000, 2, 16)
    (data_size,) = struct.unpack_from("<I", blob, 40)
    assert data_size == len(blob) - 44
    assert data_size == 2 * int(0.25 * 16000)
