"""Minimal RIFF/WAVE reader and PCM16 writer.

The reader accepts integer PCM (8/16/24/32 bit) and IEEE float payloads,
including WAVE_FORMAT_EXTENSIBLE headers; unknown chunks are skipped.
The writer emits exactly the canonical byte layout: PCM, little-endian,
16-bit, with a plain 16-byte fmt chunk.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import SpecMismatch, UndecodableAudio

_PCM = 1
_IEEE_FLOAT = 3
_EXTENSIBLE = 0xFFFE


def read_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Decode a RIFF/WAVE file.

    Returns (samples, sample_rate) with samples shaped (n,) for mono or
    (n, channels) otherwise, in the container's native integer or float
    dtype.  Raises UndecodableAudio for malformed containers and
    SpecMismatch when the declared layout disagrees with the payload.
    """
    data = Path(path).read_bytes()
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UndecodableAudio(f"{path}: not a RIFF/WAVE file")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        cid = data[pos : pos + 4]
        (size,) = struct.unpack_from("<I", data, pos + 4)
        body = data[pos + 8 : pos + 8 + size]
        if cid == b"fmt ":
            if size < 16:
                raise UndecodableAudio(f"{path}: short fmt chunk")
            fmt = struct.unpack_from("<HHIIHH", body, 0)
            if fmt[0] == _EXTENSIBLE:
                if size < 40:
                    raise UndecodableAudio(f"{path}: short extensible fmt chunk")
                (sub,) = struct.unpack_from("<H", body, 24)
                fmt = (sub,) + fmt[1:]
        elif cid == b"data":
            if len(body) != size:
                raise SpecMismatch(
                    f"{path}: data chunk declares {size} bytes, {len(body)} present"
                )
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None or payload is None:
        raise UndecodableAudio(f"{path}: missing fmt or data chunk")

    audio_format, channels, rate, _byte_rate, block_align, bits = fmt
    if channels < 1 or rate < 1:
        raise UndecodableAudio(f"{path}: invalid fmt ({channels} ch, {rate} Hz)")

    if audio_format == _PCM:
        dtype = {8: np.uint8, 16: np.int16, 24: None, 32: np.int32}.get(bits, "bad")
    elif audio_format == _IEEE_FLOAT:
        dtype = {32: np.float32, 64: np.float64}.get(bits, "bad")
    else:
        raise UndecodableAudio(f"{path}: unsupported format tag {audio_format}")
    if isinstance(dtype, str):
        raise UndecodableAudio(f"{path}: unsupported bit depth {bits}")

    frame_bytes = channels * (bits // 8)
    if block_align not in (0, frame_bytes):
        raise SpecMismatch(
            f"{path}: block align {block_align} inconsistent with {channels} ch x {bits} bit"
        )
    if len(payload) % frame_bytes:
        raise SpecMismatch(
            f"{path}: payload of {len(payload)} bytes is not whole {frame_bytes}-byte frames"
        )

    if bits == 24:
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(-1, 3)
        samples = (
            raw[:, 0].astype(np.int32)
            | (raw[:, 1].astype(np.int32) << 8)
            | (raw[:, 2].astype(np.int8).astype(np.int32) << 16)
        )
    else:
        samples = np.frombuffer(payload, dtype=dtype)
    if channels > 1:
        samples = samples.reshape(-1, channels)
    return samples, rate


def write_wav(path: str | Path, samples: np.ndarray, rate: int) -> None:
    """Write int16 PCM little-endian; shape (n,) mono or (n, channels)."""
    samples = np.asarray(samples)
    if samples.dtype != np.int16:
        raise ValueError("write_wav expects int16 samples")
    channels = 1 if samples.ndim == 1 else samples.shape[1]
    payload = samples.astype("<i2").tobytes()
    block_align = 2 * channels
    header = b"".join(
        [
            b"RIFF",
            struct.pack("<I", 36 + len(payload)),
            b"WAVE",
            b"fmt ",
            struct.pack(
                "<IHHIIHH", 16, _PCM, channels, rate, rate * block_align, block_align, 16
            ),
            b"data",
            struct.pack("<I", len(payload)),
        ]
    )
    Path(path).write_bytes(header + payload)
