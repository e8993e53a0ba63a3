"""Reading the core toolkit's published file formats.

The adapters never import the core package; they speak its documented
interchange formats: the columnar manifest (or its line-delimited mirror)
on the way in, line-delimited score rows on the way out.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class ManifestRow:
    utterance_id: str
    audio_path: str
    duration: float
    standardized_transcript: str


def read_manifest(path: str | Path) -> list[ManifestRow]:
    path = Path(path)
    if path.suffix == ".parquet":
        import pyarrow.parquet as pq

        rows = pq.read_table(
            path,
            columns=["utterance_id", "audio_path", "duration", "standardized_transcript"],
        ).to_pylist()
    else:
        rows = []
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    rows.append(json.loads(line))
    return [
        ManifestRow(
            utterance_id=r["utterance_id"],
            audio_path=r["audio_path"],
            duration=float(r["duration"]),
            standardized_transcript=r["standardized_transcript"],
        )
        for r in rows
    ]


def workspace_root(manifest_path: str | Path) -> Path:
    """Manifests live under <workspace>/manifests/; audio paths are
    relative to <workspace>."""
    return Path(manifest_path).resolve().parent.parent


def jsonl_line(obj: dict) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
