"""Pure-Python FLAC codec support.

``read_flac`` decodes standard FLAC streams: constant, verbatim, fixed
and LPC subframes, partitioned Rice residuals, wasted bits, and the
left/right/mid-side stereo decorrelation modes, with frame CRC checks.
``write_flac`` emits valid but uncompressed streams (verbatim subframes
only); it exists so tests and the bundled synthetic corpus can produce
FLAC inputs without an external encoder.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import UndecodableAudio

_SYNC = 0x3FFE

_SAMPLE_RATES = {
    1: 88200, 2: 176400, 3: 192000, 4: 8000, 5: 16000, 6: 22050,
    7: 24000, 8: 32000, 9: 44100, 10: 48000, 11: 96000,
}
_SAMPLE_SIZES = {1: 8, 2: 12, 4: 16, 5: 20, 6: 24, 7: 32}


def _crc8(data: bytes) -> int:
    crc = 0
    for b in data:
        crc ^= b
        for _ in range(8):
            crc = ((crc << 1) ^ 0x07) & 0xFF if crc & 0x80 else (crc << 1) & 0xFF
    return crc


def _crc16(data: bytes) -> int:
    crc = 0
    for b in data:
        crc ^= b << 8
        for _ in range(8):
            crc = ((crc << 1) ^ 0x8005) & 0xFFFF if crc & 0x8000 else (crc << 1) & 0xFFFF
    return crc


class _BitReader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0        # byte position
        self.bitbuf = 0
        self.bitcount = 0

    def at_end(self) -> bool:
        return self.bitcount == 0 and self.pos >= len(self.data)

    def read_uint(self, n: int) -> int:
        while self.bitcount < n:
            if self.pos >= len(self.data):
                raise UndecodableAudio("truncated FLAC stream")
            self.bitbuf = (self.bitbuf << 8) | self.data[self.pos]
            self.pos += 1
            self.bitcount += 8
        self.bitcount -= n
        value = (self.bitbuf >> self.bitcount) & ((1 << n) - 1)
        self.bitbuf &= (1 << self.bitcount) - 1
        return value

    def read_signed(self, n: int) -> int:
        v = self.read_uint(n)
        return v - (1 << n) if v >= (1 << (n - 1)) else v

    def read_unary(self) -> int:
        count = 0
        while self.read_uint(1) == 0:
            count += 1
        return count

    def align_to_byte(self) -> None:
        self.bitcount -= self.bitcount % 8

    def tell_bytes(self) -> int:
        return self.pos - self.bitcount // 8


def _read_coded_number(br: _BitReader) -> int:
    head = br.read_uint(8)
    if head < 0x80:
        return head
    n = 0
    while head & (0x80 >> n):
        n += 1
    if n < 2 or n > 7:
        raise UndecodableAudio("bad coded number in frame header")
    value = head & (0x7F >> n)
    for _ in range(n - 1):
        cont = br.read_uint(8)
        if cont & 0xC0 != 0x80:
            raise UndecodableAudio("bad coded number continuation byte")
        value = (value << 6) | (cont & 0x3F)
    return value


_FIXED_COEFS = {
    0: [],
    1: [1],
    2: [2, -1],
    3: [3, -3, 1],
    4: [4, -6, 4, -1],
}


def _decode_residuals(br: _BitReader, block_size: int, order: int) -> list[int]:
    method = br.read_uint(2)
    if method > 1:
        raise UndecodableAudio("reserved residual coding method")
    param_bits = 4 if method == 0 else 5
    escape = (1 << param_bits) - 1
    partition_order = br.read_uint(4)
    partitions = 1 << partition_order
    if block_size % partitions:
        raise UndecodableAudio("block size not divisible by partition count")

    out: list[int] = []
    for p in range(partitions):
        count = block_size // partitions
        if p == 0:
            count -= order
        param = br.read_uint(param_bits)
        if param == escape:
            nbits = br.read_uint(5)
            if nbits == 0:
                out.extend([0] * count)
            else:
                out.extend(br.read_signed(nbits) for _ in range(count))
        else:
            for _ in range(count):
                q = br.read_unary()
                v = (q << param) | br.read_uint(param)
                out.append((v >> 1) ^ -(v & 1))
    return out


def _decode_subframe(br: _BitReader, block_size: int, bps: int) -> list[int]:
    if br.read_uint(1) != 0:
        raise UndecodableAudio("bad subframe padding bit")
    sf_type = br.read_uint(6)
    wasted = 0
    if br.read_uint(1) == 1:
        wasted = br.read_unary() + 1
    bps -= wasted

    if sf_type == 0:
        value = br.read_signed(bps)
        samples = [value] * block_size
    elif sf_type == 1:
        samples = [br.read_signed(bps) for _ in range(block_size)]
    elif 8 <= sf_type <= 12:
        order = sf_type - 8
        samples = [br.read_signed(bps) for _ in range(order)]
        samples.extend(_decode_residuals(br, block_size, order))
        coefs = _FIXED_COEFS[order]
        for i in range(order, block_size):
            samples[i] += sum(c * samples[i - 1 - j] for j, c in enumerate(coefs))
    elif sf_type >= 32:
        order = sf_type - 31
        samples = [br.read_signed(bps) for _ in range(order)]
        precision = br.read_uint(4) + 1
        if precision == 16:
            raise UndecodableAudio("invalid LPC precision")
        shift = br.read_signed(5)
        if shift < 0:
            raise UndecodableAudio("negative LPC shift")
        coefs = [br.read_signed(precision) for _ in range(order)]
        samples.extend(_decode_residuals(br, block_size, order))
        for i in range(order, block_size):
            acc = sum(c * samples[i - 1 - j] for j, c in enumerate(coefs))
            samples[i] += acc >> shift
    else:
        raise UndecodableAudio(f"reserved subframe type {sf_type}")

    if wasted:
        samples = [s << wasted for s in samples]
    return samples


def read_flac(path: str | Path) -> tuple[np.ndarray, int]:
    """Decode a FLAC file to (samples, sample_rate).

    Samples are int16/int32 shaped (n,) for mono or (n, channels).
    """
    data = Path(path).read_bytes()
    if data[:4] != b"fLaC":
        raise UndecodableAudio(f"{path}: missing fLaC marker")
    br = _BitReader(data[4:])

    stream_rate = stream_channels = stream_bps = None
    total_samples = 0
    last = False
    first = True
    while not last:
        last = br.read_uint(1) == 1
        btype = br.read_uint(7)
        length = br.read_uint(24)
        if first:
            if btype != 0:
                raise UndecodableAudio(f"{path}: first metadata block not STREAMINFO")
            br.read_uint(16)  # min block size
            br.read_uint(16)  # max block size
            br.read_uint(24)  # min frame size
            br.read_uint(24)  # max frame size
            stream_rate = br.read_uint(20)
            stream_channels = br.read_uint(3) + 1
            stream_bps = br.read_uint(5) + 1
            total_samples = br.read_uint(36)
            for _ in range(16):
                br.read_uint(8)  # md5
            first = False
        else:
            for _ in range(length):
                br.read_uint(8)

    if not stream_rate:
        raise UndecodableAudio(f"{path}: invalid sample rate in STREAMINFO")

    channels_out: list[list[int]] = [[] for _ in range(stream_channels)]
    while not br.at_end():
        frame_start = br.tell_bytes()
        if br.read_uint(14) != _SYNC:
            raise UndecodableAudio(f"{path}: lost frame sync")
        br.read_uint(1)  # reserved
        br.read_uint(1)  # blocking strategy
        bs_code = br.read_uint(4)
        sr_code = br.read_uint(4)
        chan_asgn = br.read_uint(4)
        ss_code = br.read_uint(3)
        br.read_uint(1)  # reserved
        _read_coded_number(br)

        if bs_code == 0:
            raise UndecodableAudio(f"{path}: reserved block size code")
        elif bs_code == 1:
            block_size = 192
        elif bs_code <= 5:
            block_size = 576 << (bs_code - 2)
        elif bs_code == 6:
            block_size = br.read_uint(8) + 1
        elif bs_code == 7:
            block_size = br.read_uint(16) + 1
        else:
            block_size = 256 << (bs_code - 8)

        if sr_code == 12:
            br.read_uint(8)
        elif sr_code in (13, 14):
            br.read_uint(16)
        elif sr_code == 15:
            raise UndecodableAudio(f"{path}: invalid sample rate code")
        elif sr_code != 0 and _SAMPLE_RATES[sr_code] != stream_rate:
            raise UndecodableAudio(f"{path}: frame sample rate disagrees with STREAMINFO")

        bps = stream_bps if ss_code == 0 else _SAMPLE_SIZES.get(ss_code)
        if bps is None:
            raise UndecodableAudio(f"{path}: reserved sample size code")

        header_end = br.tell_bytes()
        if _crc8(data[4 + frame_start : 4 + header_end]) != br.read_uint(8):
            raise UndecodableAudio(f"{path}: frame header CRC mismatch")

        if chan_asgn <= 7:
            n_sub = chan_asgn + 1
            if n_sub != stream_channels:
                raise UndecodableAudio(f"{path}: frame channel count disagrees")
            subs = [_decode_subframe(br, block_size, bps) for _ in range(n_sub)]
        elif chan_asgn in (8, 9, 10):
            if stream_channels != 2:
                raise UndecodableAudio(f"{path}: stereo decorrelation in non-stereo stream")
            extra0 = 1 if chan_asgn == 9 else 0
            extra1 = 1 if chan_asgn in (8, 10) else 0
            s0 = _decode_subframe(br, block_size, bps + extra0)
            s1 = _decode_subframe(br, block_size, bps + extra1)
            if chan_asgn == 8:  # left/side
                subs = [s0, [l - s for l, s in zip(s0, s1)]]
            elif chan_asgn == 9:  # right/side
                subs = [[r + s for r, s in zip(s1, s0)], s1]
            else:  # mid/side
                left, right = [], []
                for m, s in zip(s0, s1):
                    m = (m << 1) | (s & 1)
                    left.append((m + s) >> 1)
                    right.append((m - s) >> 1)
                subs = [left, right]
        else:
            raise UndecodableAudio(f"{path}: reserved channel assignment")

        br.align_to_byte()
        body_end = br.tell_bytes()
        if _crc16(data[4 + frame_start : 4 + body_end]) != br.read_uint(16):
            raise UndecodableAudio(f"{path}: frame CRC mismatch")

        for ch, s in enumerate(subs):
            channels_out[ch].extend(s)

    dtype = np.int16 if stream_bps <= 16 else np.int32
    arr = np.array(channels_out, dtype=dtype).T
    if total_samples and len(arr) > total_samples:
        arr = arr[:total_samples]
    if stream_channels == 1:
        arr = arr.reshape(-1)
    return arr, stream_rate


class _BitWriter:
    def __init__(self):
        self.buf = bytearray()
        self.bitbuf = 0
        self.bitcount = 0

    def write_uint(self, value: int, n: int) -> None:
        self.bitbuf = (self.bitbuf << n) | (value & ((1 << n) - 1))
        self.bitcount += n
        while self.bitcount >= 8:
            self.bitcount -= 8
            self.buf.append((self.bitbuf >> self.bitcount) & 0xFF)
        self.bitbuf &= (1 << self.bitcount) - 1

    def align_to_byte(self) -> None:
        if self.bitcount:
            self.write_uint(0, 8 - self.bitcount)


def _coded_number(value: int) -> bytes:
    if value < 0x80:
        return bytes([value])
    out = []
    nbytes = 2
    while value >= (1 << (1 + 5 * nbytes)) and nbytes < 7:
        nbytes += 1
    for _ in range(nbytes - 1):
        out.append(0x80 | (value & 0x3F))
        value >>= 6
    head = (0xFF00 >> nbytes) & 0xFF
    out.append(head | value)
    return bytes(reversed(out))


def write_flac(path: str | Path, samples: np.ndarray, rate: int, block_size: int = 4096) -> None:
    """Write int16 samples as an uncompressed (verbatim-subframe) FLAC file."""
    samples = np.asarray(samples)
    if samples.dtype != np.int16:
        raise ValueError("write_flac expects int16 samples")
    if samples.ndim == 1:
        samples = samples.reshape(-1, 1)
    n, channels = samples.shape

    out = bytearray(b"fLaC")
    info = _BitWriter()
    info.write_uint(1, 1)          # last metadata block
    info.write_uint(0, 7)          # STREAMINFO
    info.write_uint(34, 24)
    info.write_uint(block_size, 16)
    info.write_uint(block_size, 16)
    info.write_uint(0, 24)
    info.write_uint(0, 24)
    info.write_uint(rate, 20)
    info.write_uint(channels - 1, 3)
    info.write_uint(15, 5)         # 16 bits per sample
    info.write_uint(n, 36)
    for _ in range(16):
        info.write_uint(0, 8)      # md5 unknown
    out += info.buf

    for frame_no, start in enumerate(range(0, n, block_size)):
        block = samples[start : start + block_size]
        bw = _BitWriter()
        bw.write_uint(_SYNC, 14)
        bw.write_uint(0, 1)        # reserved
        bw.write_uint(0, 1)        # fixed block size
        bw.write_uint(7, 4)        # block size: 16 bits at end of header
        bw.write_uint(0, 4)        # sample rate from STREAMINFO
        bw.write_uint(channels - 1, 4)
        bw.write_uint(4, 3)        # 16 bits per sample
        bw.write_uint(0, 1)        # reserved
        for b in _coded_number(frame_no):
            bw.write_uint(b, 8)
        bw.write_uint(len(block) - 1, 16)
        bw.write_uint(_crc8(bytes(bw.buf)), 8)
        for ch in range(channels):
            bw.write_uint(0, 1)    # padding
            bw.write_uint(1, 6)    # verbatim
            bw.write_uint(0, 1)    # no wasted bits
            for v in block[:, ch]:
                bw.write_uint(int(v), 16)
        bw.align_to_byte()
        bw.write_uint(_crc16(bytes(bw.buf)), 16)
        out += bw.buf

    Path(path).write_bytes(bytes(out))
