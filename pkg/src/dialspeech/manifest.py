"""Canonical manifest and interchange-file I/O.

Manifests are written twice: a columnar parquet file whose columns match
the utterance schema field names exactly, and a line-delimited mirror for
streaming tools.  Score interchange files are line-delimited objects
``{utterance_id, aldi?, msa_da?, pesq?, stoi?, si_sdr?, nmr_mos?}``.
All writers are byte-deterministic for identical inputs.
"""

from __future__ import annotations

import json
from pathlib import Path

import pyarrow as pa
import pyarrow.parquet as pq

from .errors import DuplicateUtteranceId, MalformedRow, OutOfRangeScore
from .schema import (
    DialectRegistry,
    ScoreSet,
    UtteranceRecord,
    record_from_dict,
    record_to_dict,
)

_SCHEMA = pa.schema(
    [
        ("utterance_id", pa.string()),
        ("dataset_id", pa.string()),
        ("source_id", pa.string()),
        ("audio_path", pa.string()),
        ("duration", pa.float64()),
        ("raw_transcript", pa.string()),
        ("standardized_transcript", pa.string()),
        ("speaker_id", pa.string()),
        ("gender", pa.string()),
        ("age", pa.string()),
        (
            "recording_meta",
            pa.struct(
                [("sample_rate", pa.int64()), ("channels", pa.int64()), ("style", pa.string())]
            ),
        ),
        ("domain_raw", pa.string()),
        ("domain_theme", pa.string()),
        ("dialect", pa.string()),
        ("split", pa.string()),
        (
            "scores",
            pa.struct(
                [
                    ("aldi", pa.float64()),
                    ("msa_da", pa.int64()),
                    ("pesq", pa.float64()),
                    ("stoi", pa.float64()),
                    ("si_sdr", pa.float64()),
                    ("nmr_mos", pa.float64()),
                ]
            ),
        ),
    ]
)

SCORE_FIELDS = ("aldi", "msa_da", "pesq", "stoi", "si_sdr", "nmr_mos")


def write_manifest_parquet(records, path: str | Path, metadata: dict | None = None) -> None:
    rows = [record_to_dict(r) for r in records]
    schema = _SCHEMA
    if metadata:
        schema = schema.with_metadata({k: str(v) for k, v in metadata.items()})
    table = pa.Table.from_pylist(rows, schema=schema)
    pq.write_table(table, path)


def read_manifest_parquet(path: str | Path, registry: DialectRegistry | None = None):
    table = pq.read_table(path)
    return [record_from_dict(d, registry) for d in table.to_pylist()]


def jsonl_dumps(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def write_jsonl(path: str | Path, objects) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for obj in objects:
            f.write(jsonl_dumps(obj) + "\n")


def read_jsonl(path: str | Path):
    out = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise MalformedRow(f"{path}:{line_no}: {e}") from e
    return out


def write_manifest_jsonl(records, path: str | Path) -> None:
    write_jsonl(path, (record_to_dict(r) for r in records))


def read_manifest_jsonl(path: str | Path, registry: DialectRegistry | None = None):
    return [record_from_dict(d, registry) for d in read_jsonl(path)]


def read_score_file(
    path: str | Path,
    known_ids=None,
    strict: bool = False,
) -> tuple[dict[str, ScoreSet], list[dict]]:
    """Load a score interchange file.

    Returns (utterance_id -> ScoreSet, warning records).  Duplicate ids
    always raise.  Unknown ids, unknown fields and out-of-range values
    raise in strict mode; otherwise the row is rejected with a warning
    record {utterance_id, warning_kind, detail}.
    """
    known = None if known_ids is None else set(known_ids)
    scores: dict[str, ScoreSet] = {}
    warnings: list[dict] = []

    def reject(utt_id: str, kind: str, detail: str, exc_type=MalformedRow):
        if strict:
            raise exc_type(f"{path}: {utt_id}: {detail}")
        warnings.append({"utterance_id": utt_id, "warning_kind": kind, "detail": detail})

    for row in read_jsonl(path):
        utt_id = row.get("utterance_id")
        if not isinstance(utt_id, str) or not utt_id:
            reject(str(utt_id), "bad_id", "missing or non-string utterance_id")
            continue
        if utt_id in scores:
            raise DuplicateUtteranceId(f"{path}: duplicate score row for {utt_id}")
        extra = set(row) - {"utterance_id", *SCORE_FIELDS}
        if extra:
            reject(utt_id, "unknown_field", f"unknown fields {sorted(extra)}")
            continue
        if known is not None and utt_id not in known:
            reject(utt_id, "unknown_utterance", "utterance_id not in manifest")
            continue
        values = {k: row[k] for k in SCORE_FIELDS if row.get(k) is not None}
        try:
            score_set = ScoreSet(**values)
        except TypeError as e:
            reject(utt_id, "bad_row", str(e))
            continue
        problems = score_set.problems()
        if problems:
            reject(utt_id, "out_of_range", "; ".join(problems), OutOfRangeScore)
            continue
        scores[utt_id] = score_set
    return scores, warnings
