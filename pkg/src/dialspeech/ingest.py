"""Dataset ingestion: declarative per-dataset configs to canonical records.

A dataset config is a YAML file naming the transcript manifest, the audio
root, a field mapping, and the dialect assignment rule.  Rows are dropped
(and tallied) when their transcript is Latin-only or has no letters at
all, or when the utterance is shorter than the configured minimum.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .audio import ChannelMap, read_audio, standardize_file
from .domains import DomainThemeTable
from .errors import ConfigError, ToolkitError, UnknownLocation, UnmappedDomain
from .geo import GeoLookupTable, infer_dialect
from .manifest import read_jsonl
from .schema import DialectRegistry, RecordingMeta, UtteranceRecord, parse_dialect
from .textnorm import Normalizer, ScriptClass, classify_script

_SPLIT_ALIASES = {
    "train": "train", "training": "train",
    "dev": "dev", "valid": "dev", "validation": "dev", "val": "dev",
    "test": "test", "testing": "test",
}

_KNOWN_FIELDS = (
    "utterance_id", "audio", "transcript", "duration", "speaker", "gender",
    "age", "domain", "split", "country", "city", "channel", "source",
)


@dataclass
class DatasetConfig:
    dataset_id: str
    manifest: Path
    audio_root: Path
    fields: dict[str, str]
    source_id: str = ""
    format: str = ""                   # tsv | csv | jsonl (default: by suffix)
    dialect_mode: str = "none"         # fixed | geo | field | none
    dialect_code: str = ""
    location_semantics: str = "speaker_origin"
    recording_style: str | None = None
    buckwalter: str = "auto"
    min_duration: float = 0.1
    standardize_audio: bool = True

    @classmethod
    def load(cls, path: str | Path) -> "DatasetConfig":
        path = Path(path)
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8"))
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: dataset config must be a mapping")
        try:
            dataset_id = raw["dataset_id"]
            manifest = path.parent / raw["manifest"]
            audio_root = path.parent / raw["audio_root"]
            fields = dict(raw["fields"])
        except KeyError as e:
            raise ConfigError(f"{path}: missing required key {e}") from e
        unknown = set(fields) - set(_KNOWN_FIELDS)
        if unknown:
            raise ConfigError(f"{path}: unknown field mappings {sorted(unknown)}")
        for required in ("utterance_id", "audio", "transcript"):
            if required not in fields:
                raise ConfigError(f"{path}: field mapping for {required!r} is required")
        dialect = raw.get("dialect") or {}
        cfg = cls(
            dataset_id=dataset_id,
            manifest=manifest,
            audio_root=audio_root,
            fields=fields,
            source_id=raw.get("source_id", dataset_id),
            format=raw.get("format", ""),
            dialect_mode=dialect.get("mode", "none"),
            dialect_code=dialect.get("code", ""),
            location_semantics=raw.get("location_semantics", "speaker_origin"),
            recording_style=raw.get("recording_style"),
            buckwalter=raw.get("buckwalter", "auto"),
            min_duration=float(raw.get("min_duration", 0.1)),
            standardize_audio=bool(raw.get("standardize_audio", True)),
        )
        if cfg.dialect_mode not in ("fixed", "geo", "field", "none"):
            raise ConfigError(f"{path}: bad dialect mode {cfg.dialect_mode!r}")
        if cfg.dialect_mode == "fixed" and not cfg.dialect_code:
            raise ConfigError(f"{path}: dialect mode 'fixed' needs a code")
        if cfg.dialect_mode == "geo" and "country" not in fields:
            raise ConfigError(f"{path}: dialect mode 'geo' needs a country field")
        if cfg.location_semantics not in ("speaker_origin", "recording_site"):
            raise ConfigError(f"{path}: bad location_semantics {cfg.location_semantics!r}")
        if cfg.dialect_mode == "field":
            cfg.fields.setdefault("dialect", dialect.get("field", "dialect"))
        return cfg


@dataclass
class IngestReport:
    dataset_id: str
    kept: int = 0
    dropped: dict[str, int] = field(default_factory=dict)
    warnings: list[dict] = field(default_factory=list)
    errors: list[dict] = field(default_factory=list)

    def drop(self, reason: str) -> None:
        self.dropped[reason] = self.dropped.get(reason, 0) + 1

    def warn(self, utterance_id: str, kind: str, detail: str) -> None:
        self.warnings.append(
            {"utterance_id": utterance_id, "warning_kind": kind, "detail": detail}
        )

    def error(self, utterance_id: str, kind: str, detail: str) -> None:
        self.errors.append(
            {"utterance_id": utterance_id, "error_kind": kind, "detail": detail}
        )

    def to_dict(self) -> dict:
        return {
            "dataset_id": self.dataset_id,
            "kept": self.kept,
            "dropped": dict(sorted(self.dropped.items())),
            "n_warnings": len(self.warnings),
            "n_errors": len(self.errors),
        }


def _read_rows(config: DatasetConfig) -> list[dict]:
    path = config.manifest
    if not path.exists():
        raise ConfigError(f"manifest {path} does not exist")
    fmt = config.format or path.suffix.lstrip(".").lower()
    if fmt == "jsonl":
        return [dict(r) for r in read_jsonl(path)]
    if fmt in ("tsv", "csv"):
        delim = "\t" if fmt == "tsv" else ","
        with open(path, encoding="utf-8", newline="") as f:
            return list(csv.DictReader(f, delimiter=delim))
    raise ConfigError(f"{path}: unsupported manifest format {fmt!r}")


@dataclass
class _RowJob:
    index: int
    utterance_id: str
    audio_source: Path
    channel: int | None
    speaker_id: str | None
    row: dict


def ingest_dataset(
    config: DatasetConfig,
    out_audio_dir: str | Path | None = None,
    normalizer: Normalizer | None = None,
    geo_table: GeoLookupTable | None = None,
    theme_table: DomainThemeTable | None = None,
    registry: DialectRegistry | None = None,
    jobs: int = 1,
    path_base: str | Path | None = None,
) -> tuple[list[UtteranceRecord], IngestReport]:
    """Ingest one dataset into canonical records plus a report.

    When ``out_audio_dir`` is set (and the config does not disable it),
    audio is standardized into that directory and records point at the
    standardized files; otherwise records keep the source paths and the
    manifest must supply durations.  ``path_base`` makes recorded audio
    paths relative to that directory, keeping manifests portable.
    """
    report = IngestReport(config.dataset_id)
    norm = normalizer or Normalizer(buckwalter=config.buckwalter)

    if not config.audio_root.exists():
        raise ConfigError(f"audio root {config.audio_root} does not exist")

    rows = _read_rows(config)
    fields = config.fields
    theme_table = theme_table or DomainThemeTable.default()

    fixed_dialect = None
    if config.dialect_mode == "fixed":
        fixed_dialect = parse_dialect(config.dialect_code, registry)

    # Resolve audio first so per-file work (split/standardize) happens once
    # per source file and can run in parallel without reordering records.
    jobs_list: list[_RowJob | None] = []
    seen_ids: set[str] = set()
    for index, row in enumerate(rows):
        utt_id = (row.get(fields["utterance_id"]) or "").strip()
        audio_rel = (row.get(fields["audio"]) or "").strip()
        transcript_field = fields["transcript"]
        if not utt_id or not audio_rel or transcript_field not in row:
            report.drop("MalformedRow")
            report.error(utt_id or f"row{index}", "MalformedRow", "missing id/audio/transcript")
            jobs_list.append(None)
            continue
        if utt_id in seen_ids:
            report.drop("MalformedRow")
            report.error(utt_id, "MalformedRow", "duplicate utterance_id")
            jobs_list.append(None)
            continue
        seen_ids.add(utt_id)

        # Script filtering happens before any audio work.  The text is
        # classified in its true script: detected transliteration is
        # converted first so transliterated Arabic is not mistaken for a
        # Latin-only metadata line.
        raw_transcript = row[transcript_field]
        classified_text = raw_transcript
        if norm.buckwalter == "always" or (
            norm.buckwalter == "auto" and norm.detect_buckwalter(raw_transcript)
        ):
            unmapped: list[str] = []
            classified_text = norm.buckwalter_to_arabic(raw_transcript, unmapped)
            if unmapped:
                report.warn(
                    utt_id,
                    "buckwalter_unmapped",
                    f"{len(unmapped)} unmapped symbols: {''.join(sorted(set(unmapped)))}",
                )
        script = classify_script(classified_text)
        if script is ScriptClass.LATIN_ONLY:
            report.drop("LatinOnly")
            jobs_list.append(None)
            continue
        if script is ScriptClass.EMPTY:
            report.drop("Empty")
            jobs_list.append(None)
            continue

        source = config.audio_root / audio_rel
        if not source.exists():
            report.drop("MissingAudio")
            report.error(utt_id, "MissingAudio", str(source))
            jobs_list.append(None)
            continue
        channel = None
        if "channel" in fields and row.get(fields["channel"]) not in (None, ""):
            channel = int(row[fields["channel"]])
        speaker = None
        if "speaker" in fields:
            speaker = (row.get(fields["speaker"]) or "").strip() or None
        jobs_list.append(_RowJob(index, utt_id, source, channel, speaker, row))

    out_dir = Path(out_audio_dir) if out_audio_dir is not None else None
    standardize = config.standardize_audio and out_dir is not None
    if standardize:
        out_dir.mkdir(parents=True, exist_ok=True)

    # One standardization task per distinct source file.
    audio_results: dict[Path, object] = {}
    if standardize:
        channel_maps: dict[Path, dict[int, str]] = {}
        for job in jobs_list:
            if job is not None and job.channel is not None:
                channel_maps.setdefault(job.audio_source, {})[job.channel] = (
                    job.speaker_id or f"ch{job.channel}"
                )
        sources = sorted({j.audio_source for j in jobs_list if j is not None})

        def _standardize(source: Path):
            cmap = channel_maps.get(source)
            dest = out_dir / (source.stem + ".wav")
            try:
                meta_samples, meta_rate = read_audio(source)
                channels = 1 if meta_samples.ndim == 1 else meta_samples.shape[1]
                outputs = standardize_file(
                    source, dest, ChannelMap.from_dict(cmap) if cmap else None
                )
                return (outputs, meta_rate, channels)
            except ToolkitError as e:
                return e

        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            for source, result in zip(sources, pool.map(_standardize, sources)):
                audio_results[source] = result

    records: list[UtteranceRecord] = []
    for job in jobs_list:
        if job is None:
            continue
        row = job.row
        utt_id = job.utterance_id
        raw_transcript = row[fields["transcript"]]

        audio_path = job.audio_source
        duration = None
        meta = RecordingMeta(style=config.recording_style)
        if standardize:
            result = audio_results[job.audio_source]
            if isinstance(result, ToolkitError):
                report.drop(type(result).__name__)
                report.error(utt_id, type(result).__name__, str(result))
                continue
            outputs, src_rate, src_channels = result
            meta = RecordingMeta(
                sample_rate=src_rate, channels=src_channels, style=config.recording_style
            )
            if job.channel is not None:
                wanted = job.speaker_id or f"ch{job.channel}"
                match = [o for o in outputs if o[0] == wanted]
                if not match:
                    report.drop("MalformedRow")
                    report.error(utt_id, "MalformedRow", f"channel {job.channel} not split")
                    continue
                _, audio_path, duration = match[0]
            else:
                _, audio_path, duration = outputs[0]
        if duration is None:
            if "duration" in fields and row.get(fields["duration"]) not in (None, ""):
                duration = float(row[fields["duration"]])
            else:
                report.drop("MalformedRow")
                report.error(utt_id, "MalformedRow", "no duration available")
                continue

        if duration < config.min_duration:
            report.drop("TooShort")
            continue

        audio_path = Path(audio_path)
        if path_base is not None:
            try:
                audio_path = audio_path.relative_to(path_base)
            except ValueError:
                pass  # source outside the output tree stays absolute

        dialect = fixed_dialect
        if config.dialect_mode == "geo":
            country = (row.get(fields["country"]) or "").strip()
            city = (row.get(fields.get("city", "")) or "").strip() or None
            if config.location_semantics != "speaker_origin":
                report.warn(utt_id, "location_ignored", "location is recording site, not speaker origin")
                dialect = None
            elif not country:
                dialect = None
            else:
                try:
                    dialect = infer_dialect(country, city, geo_table, registry)
                except UnknownLocation as e:
                    report.warn(utt_id, "unknown_location", str(e))
                    dialect = None
        elif config.dialect_mode == "field":
            label = (row.get(fields["dialect"]) or "").strip()
            try:
                dialect = parse_dialect(label, registry) if label else None
            except ToolkitError as e:
                report.warn(utt_id, "bad_dialect_label", str(e))
                dialect = None

        domain_raw = (row.get(fields.get("domain", "")) or "").strip() or None
        domain_theme = None
        if domain_raw is not None:
            try:
                domain_theme = theme_table.normalize(domain_raw)
            except UnmappedDomain as e:
                domain_theme = "Unknown"
                report.warn(utt_id, "unmapped_domain", str(e))

        split = "unassigned"
        if "split" in fields and row.get(fields["split"]):
            tag = row[fields["split"]].strip().lower()
            split = _SPLIT_ALIASES.get(tag, "unassigned")
            if split == "unassigned":
                report.warn(utt_id, "unknown_split_tag", f"split tag {tag!r} ignored")

        record = UtteranceRecord(
            utterance_id=utt_id,
            dataset_id=config.dataset_id,
            source_id=(row.get(fields.get("source", "")) or "").strip() or config.source_id,
            audio_path=str(audio_path),
            duration=duration,
            raw_transcript=raw_transcript,
            standardized_transcript=norm.normalize(raw_transcript),
            speaker_id=job.speaker_id,
            gender=(row.get(fields.get("gender", "")) or "").strip() or None,
            age=(row.get(fields.get("age", "")) or "").strip() or None,
            recording_meta=meta,
            domain_raw=domain_raw,
            domain_theme=domain_theme,
            dialect=dialect,
            split=split,
        )
        problems = record.problems(norm)
        if problems:
            report.drop("MalformedRow")
            report.error(utt_id, "MalformedRow", "; ".join(problems))
            continue
        records.append(record)
        report.kept += 1

    return records, report
