"""Audio quality proxies with seeded non-matching reference selection."""

from __future__ import annotations

import random
import wave
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import CanonicalSpecError
from .manifest_io import ManifestRow

CANONICAL_RATE = 16000
REFERENCE_SECONDS = 5.0


def read_canonical_wav(path: str | Path) -> np.ndarray:
    """Read a canonical-form WAV (16 kHz, mono, 16-bit PCM)."""
    with wave.open(str(path), "rb") as f:
        rate = f.getframerate()
        channels = f.getnchannels()
        width = f.getsampwidth()
        if (rate, channels, width) != (CANONICAL_RATE, 1, 2):
            raise CanonicalSpecError(
                f"{path}: got ({rate} Hz, {channels} ch, {8 * width} bit), "
                f"need ({CANONICAL_RATE} Hz, 1 ch, 16 bit)"
            )
        return np.frombuffer(f.readframes(f.getnframes()), dtype="<i2")


@dataclass
class ReferencePool:
    """Clean clips supplying the non-matching references."""

    clips: list[tuple[str, np.ndarray]]

    @classmethod
    def load(cls, directory: str | Path) -> "ReferencePool":
        paths = sorted(Path(directory).glob("*.wav"))
        if not paths:
            raise CanonicalSpecError(f"no .wav clips in reference pool {directory}")
        return cls([(p.name, read_canonical_wav(p)) for p in paths])

    def pick(self, seed: int, utterance_id: str) -> tuple[str, float, np.ndarray]:
        """Seeded choice of clip and 5-second window for one utterance."""
        rng = random.Random(f"{seed}|ref|{utterance_id}")
        name, samples = self.clips[rng.randrange(len(self.clips))]
        window = int(REFERENCE_SECONDS * CANONICAL_RATE)
        if len(samples) <= window:
            return name, 0.0, samples
        start = rng.randrange(len(samples) - window + 1)
        return name, start / CANONICAL_RATE, samples[start : start + window]


@dataclass
class AudioScoreResult:
    rows: list[dict] = field(default_factory=list)
    assignments: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)


def score_audio(
    manifest_rows: list[ManifestRow],
    reference_pool: ReferencePool,
    seed: int,
    backend,
    audio_root: str | Path,
    batch_size: int = 32,
    on_batch=None,
) -> AudioScoreResult:
    """Score each utterance's audio; unreadable or non-canonical files are
    skipped with an error record, so row count equals manifest count minus
    reported skips.  Reference-clip choices are seeded per utterance and
    logged."""
    result = AudioScoreResult()
    audio_root = Path(audio_root)
    out_batch: list[dict] = []
    for row in manifest_rows:
        path = Path(row.audio_path)
        if not path.is_absolute():
            path = audio_root / path
        try:
            samples = read_canonical_wav(path)
        except CanonicalSpecError as e:
            result.errors.append(
                {"utterance_id": row.utterance_id, "error_kind": "CanonicalSpecError",
                 "detail": str(e)}
            )
            continue
        except (OSError, wave.Error, EOFError) as e:
            result.errors.append(
                {"utterance_id": row.utterance_id, "error_kind": "UnreadableAudio",
                 "detail": f"{path}: {e}"}
            )
            continue

        clip_name, offset, reference = reference_pool.pick(seed, row.utterance_id)
        result.assignments.append(
            {
                "utterance_id": row.utterance_id,
                "reference_clip": clip_name,
                "offset_seconds": offset,
            }
        )
        scores = backend.score_clip(samples, CANONICAL_RATE, reference)
        out_batch.append({"utterance_id": row.utterance_id, **scores})
        if len(out_batch) >= batch_size:
            result.rows.extend(out_batch)
            if on_batch is not None:
                on_batch(out_batch)
            out_batch = []
    if out_batch:
        result.rows.extend(out_batch)
        if on_batch is not None:
            on_batch(out_batch)
    return result
