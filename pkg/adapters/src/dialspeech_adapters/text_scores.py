"""Transcript characterization: dialectness score and MSA/DA label."""

from __future__ import annotations

from dataclasses import dataclass, field

from .manifest_io import ManifestRow


@dataclass
class TextScoreResult:
    rows: list[dict] = field(default_factory=list)
    warnings: list[dict] = field(default_factory=list)
    clamped: int = 0


def score_text(
    manifest_rows: list[ManifestRow],
    backend,
    batch_size: int = 32,
    on_batch=None,
) -> TextScoreResult:
    """Score every manifest row; one output row per input row.

    Dialectness values are clamped into [0, 1] with a tally; empty
    transcripts are still scored but flagged low-confidence.  ``on_batch``
    (if given) receives each completed batch of output rows, enabling
    flush-per-batch writers.
    """
    result = TextScoreResult()
    for start in range(0, len(manifest_rows), batch_size):
        batch = manifest_rows[start : start + batch_size]
        scored = backend.score_texts([r.standardized_transcript for r in batch])
        out_batch = []
        for row, (aldi_raw, label) in zip(batch, scored):
            aldi = min(1.0, max(0.0, float(aldi_raw)))
            if aldi != aldi_raw:
                result.clamped += 1
                result.warnings.append(
                    {
                        "utterance_id": row.utterance_id,
                        "warning_kind": "clamped",
                        "detail": f"aldi {aldi_raw} clamped to {aldi}",
                    }
                )
            if not row.standardized_transcript.strip():
                result.warnings.append(
                    {
                        "utterance_id": row.utterance_id,
                        "warning_kind": "low_confidence",
                        "detail": "empty standardized transcript",
                    }
                )
            out_batch.append(
                {"utterance_id": row.utterance_id, "aldi": aldi, "msa_da": int(label)}
            )
        result.rows.extend(out_batch)
        if on_batch is not None:
            on_batch(out_batch)
    return result
