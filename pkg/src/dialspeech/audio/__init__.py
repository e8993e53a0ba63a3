"""Audio standardization: canonical form conversion and channel handling."""

from .flac import read_flac, write_flac
from .ops import (
    CANONICAL_SPEC,
    AudioSpec,
    ChannelMap,
    compute_duration,
    downmix,
    read_audio,
    split_channels,
    standardize_audio,
    standardize_file,
)
from .wavio import read_wav, write_wav

__all__ = [
    "AudioSpec",
    "CANONICAL_SPEC",
    "ChannelMap",
    "compute_duration",
    "downmix",
    "read_audio",
    "read_flac",
    "read_wav",
    "split_channels",
    "standardize_audio",
    "standardize_file",
    "write_flac",
    "write_wav",
]
