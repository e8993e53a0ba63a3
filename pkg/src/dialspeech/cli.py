"""Command-line pipeline: ingest -> profile -> split -> score -> report.

Every command takes a pipeline config (YAML) and an output directory,
records a run-metadata block (tool version, seed, config digest) into its
outputs, and draws all randomness from the single configured seed.  Exit
codes: 0 success, 1 fatal config/IO error, 2 validation failures.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import click
import yaml

from . import __version__
from .domains import DomainThemeTable
from .errors import ConfigError, ToolkitError
from .geo import GeoLookupTable
from .ingest import DatasetConfig, ingest_dataset
from .manifest import (
    read_manifest_parquet,
    read_jsonl,
    read_score_file,
    write_jsonl,
    write_manifest_jsonl,
    write_manifest_parquet,
)
from .profiling import (
    BIN_BOUNDARIES,
    DialectnessSummary,
    QualitySummary,
    pearson,
)
from .schema import DialectRegistry, UtteranceRecord, render_dialect
from .scoring import HISTOGRAM_LABELS, GroupScore, score_corpus
from .splits import SplitTargets, build_benchmark
from .textnorm import BuckwalterTable, Normalizer, _load_extra_punctuation

WORKSPACE_ENV = "DIALSPEECH_WORKSPACE"


@dataclass
class PipelineConfig:
    path: Path
    workspace: Path
    datasets: list[Path]
    seed: int
    jobs: int
    split_targets: SplitTargets
    include_empty_refs: bool
    digest: str
    buckwalter_table: BuckwalterTable | None = None
    extra_punctuation: frozenset | None = None
    geo_table: GeoLookupTable = field(default_factory=GeoLookupTable.default)
    theme_table: DomainThemeTable = field(default_factory=DomainThemeTable.default)
    registry: DialectRegistry = field(default_factory=DialectRegistry.default)

    @classmethod
    def load(cls, path: str | Path, seed: int | None = None, jobs: int | None = None) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"pipeline config {path} does not exist")
        data = path.read_bytes()
        try:
            raw = yaml.safe_load(data)
        except yaml.YAMLError as e:
            raise ConfigError(f"{path}: {e}") from e
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: pipeline config must be a mapping")

        workspace = Path(os.environ.get(WORKSPACE_ENV) or raw.get("workspace") or path.parent)
        datasets = [
            p if (p := Path(entry)).is_absolute() else workspace / entry
            for entry in raw.get("datasets", [])
        ]
        for ds in datasets:
            if not ds.exists():
                raise ConfigError(f"dataset config {ds} does not exist")

        tables = raw.get("tables") or {}

        def table_path(key: str) -> Path | None:
            value = tables.get(key)
            if value is None:
                return None
            p = Path(value)
            p = p if p.is_absolute() else workspace / p
            if not p.exists():
                raise ConfigError(f"table {key} at {p} does not exist")
            return p

        bw = table_path("buckwalter")
        punct = table_path("punctuation")
        geo = table_path("geo")
        themes = table_path("themes")
        dialects = table_path("dialects")

        targets = raw.get("split_targets") or {}
        scoring_cfg = raw.get("scoring") or {}
        return cls(
            path=path,
            workspace=workspace,
            datasets=datasets,
            seed=int(raw.get("seed", 0)) if seed is None else seed,
            jobs=int(raw.get("jobs", 1)) if jobs is None else jobs,
            split_targets=SplitTargets(
                adapt_hours=float(targets.get("adapt_hours", 5.0)),
                dev_hours=float(targets.get("dev_hours", 1.0)),
                test_hours=float(targets.get("test_hours", 1.0)),
                min_pool_hours=float(targets.get("min_pool_hours", 3.0)),
            ),
            include_empty_refs=bool(scoring_cfg.get("include_empty_refs", False)),
            digest=hashlib.sha256(data).hexdigest(),
            buckwalter_table=BuckwalterTable.from_file(bw) if bw else None,
            extra_punctuation=_load_extra_punctuation(punct) if punct else None,
            geo_table=GeoLookupTable.from_file(geo) if geo else GeoLookupTable.default(),
            theme_table=DomainThemeTable.from_file(themes) if themes else DomainThemeTable.default(),
            registry=DialectRegistry.from_file(dialects) if dialects else DialectRegistry.default(),
        )

    def normalizer(self, buckwalter: str = "auto") -> Normalizer:
        return Normalizer(
            table=self.buckwalter_table,
            extra_punctuation=self.extra_punctuation,
            buckwalter=buckwalter,
        )

    def run_block(self) -> dict:
        return {"tool_version": __version__, "seed": self.seed, "config_digest": self.digest}


def _write_json(path: Path, payload: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )


def _meta_line(cfg: PipelineConfig) -> str:
    run = cfg.run_block()
    return f"# tool_version={run['tool_version']} seed={run['seed']} config_digest={run['config_digest']}\n"


def _fatal(out: Path | None, kind: str, detail: str) -> int:
    report = {"error_kind": kind, "detail": detail}
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            _write_json(out / "error_report.json", report)
        except OSError:
            pass
    click.echo(f"error: {kind}: {detail}", err=True)
    return 1


def _load_manifests(out: Path, cfg: PipelineConfig) -> list[UtteranceRecord]:
    manifest_dir = out / "manifests"
    paths = sorted(manifest_dir.glob("*.parquet"))
    if not paths:
        raise ConfigError(f"no manifests under {manifest_dir}; run ingest first")
    records: list[UtteranceRecord] = []
    for p in paths:
        records.extend(read_manifest_parquet(p, cfg.registry))
    return records


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Standardize dialectal Arabic speech corpora and score ASR output."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="override the configured seed")
@click.option("--jobs", type=int, default=None, help="parallel audio workers")
def ingest(config_path: str, out_dir: str, seed: int | None, jobs: int | None) -> None:
    """Ingest datasets into canonical manifests plus ingest reports."""
    out = Path(out_dir)
    try:
        cfg = PipelineConfig.load(config_path, seed, jobs)
    except (ConfigError, OSError) as e:
        raise SystemExit(_fatal(out, type(e).__name__, str(e)))

    had_errors = False
    try:
        out.mkdir(parents=True, exist_ok=True)
        for ds_path in cfg.datasets:
            ds_cfg = DatasetConfig.load(ds_path)
            records, report = ingest_dataset(
                ds_cfg,
                out_audio_dir=out / "audio" / ds_cfg.dataset_id,
                normalizer=cfg.normalizer(ds_cfg.buckwalter),
                geo_table=cfg.geo_table,
                theme_table=cfg.theme_table,
                registry=cfg.registry,
                jobs=cfg.jobs,
                path_base=out,
            )
            manifest_dir = out / "manifests"
            manifest_dir.mkdir(parents=True, exist_ok=True)
            write_manifest_parquet(
                records, manifest_dir / f"{ds_cfg.dataset_id}.parquet", cfg.run_block()
            )
            write_manifest_jsonl(records, manifest_dir / f"{ds_cfg.dataset_id}.jsonl")
            report_dir = out / "reports"
            report_dir.mkdir(parents=True, exist_ok=True)
            _write_json(
                report_dir / f"{ds_cfg.dataset_id}.ingest.json",
                {"run": cfg.run_block(), **report.to_dict(), "errors": report.errors},
            )
            write_jsonl(report_dir / f"{ds_cfg.dataset_id}.warnings.jsonl", report.warnings)
            click.echo(
                f"{ds_cfg.dataset_id}: kept {report.kept}, dropped {sum(report.dropped.values())}, "
                f"warnings {len(report.warnings)}, errors {len(report.errors)}"
            )
            had_errors = had_errors or bool(report.errors)
    except (ConfigError, OSError) as e:
        raise SystemExit(_fatal(out, type(e).__name__, str(e)))
    raise SystemExit(2 if had_errors else 0)


def _profile_documents(records: list[UtteranceRecord]) -> dict:
    doc: dict = {"n_records": len(records)}
    with_aldi = [r for r in records if r.scores is not None and r.scores.aldi is not None]
    doc["n_with_dialectness"] = len(with_aldi)
    if with_aldi:
        doc["dialectness"] = DialectnessSummary.from_records(with_aldi).to_dict()
    doc["quality"] = QualitySummary.from_records(records).to_dict()
    with_bin = [
        r for r in records
        if r.scores is not None and r.scores.msa_da is not None
    ]
    if with_bin:
        labels = [r.scores.msa_da for r in with_bin]
        da = sum(labels) / len(labels)
        doc["msa_da_share"] = {"msa": 1.0 - da, "da": da}
    return doc


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option(
    "--scores", "score_paths", multiple=True, required=True, type=click.Path(),
    help="score interchange file(s), joined on utterance_id",
)
def profile(config_path: str, out_dir: str, score_paths: tuple[str, ...]) -> None:
    """Aggregate per-utterance scores into per-dataset and per-dialect profiles."""
    out = Path(out_dir)
    try:
        cfg = PipelineConfig.load(config_path)
        records = _load_manifests(out, cfg)
        known = [r.utterance_id for r in records]
        joined: dict[str, object] = {}
        warnings: list[dict] = []
        for sp in score_paths:
            scores, warns = read_score_file(sp, known_ids=known, strict=False)
            warnings.extend(warns)
            for utt_id, s in scores.items():
                joined[utt_id] = s
    except ToolkitError as e:
        raise SystemExit(_fatal(out, type(e).__name__, str(e)))
    except OSError as e:
        raise SystemExit(_fatal(out, type(e).__name__, str(e)))

    for r in records:
        if r.utterance_id in joined:
            r.scores = joined[r.utterance_id]

    profile_dir = out / "profiles"
    profile_dir.mkdir(parents=True, exist_ok=True)

    by_dataset: dict[str, list[UtteranceRecord]] = {}
    by_dialect: dict[str, list[UtteranceRecord]] = {}
    for r in records:
        by_dataset.setdefault(r.dataset_id, []).append(r)
        by_dialect.setdefault(render_dialect(r.dialect), []).append(r)

    datasets_doc = {ds: _profile_documents(rs) for ds, rs in sorted(by_dataset.items())}
    dialects_doc = {dl: _profile_documents(rs) for dl, rs in sorted(by_dialect.items())}

    pooled = [
        r for r in records
        if r.scores is not None and r.scores.aldi is not None and r.scores.msa_da is not None
    ]
    correlation = None
    if len(pooled) >= 2:
        aldi = [r.scores.aldi for r in pooled]
        binary = [float(r.scores.msa_da) for r in pooled]
        if len(set(aldi)) > 1 and len(set(binary)) > 1:
            correlation = pearson(aldi, binary)

    _write_json(
        profile_dir / "profiles.json",
        {
            "run": cfg.run_block(),
            "datasets": datasets_doc,
            "dialects": dialects_doc,
            "aldi_binary_pearson": correlation,
            "aldi_boundaries": list(BIN_BOUNDARIES),
            "n_score_warnings": len(warnings),
        },
    )
    write_jsonl(profile_dir / "score_warnings.jsonl", warnings)

    # Cross-dataset quality table, one row per dataset: mean (std) per metric.
    lines = [_meta_line(cfg).rstrip("\n"), "dataset\tpesq\tsi_sdr\tstoi\tnmr_mos\tn_records"]
    for ds, doc in sorted(datasets_doc.items()):
        cells = [ds]
        for metric in ("pesq", "si_sdr", "stoi", "nmr_mos"):
            entry = doc["quality"].get(metric)
            cells.append("-" if entry is None else f"{entry['mean']:.2f} ({entry['std']:.2f})")
        cells.append(str(doc["n_records"]))
        lines.append("\t".join(cells))
    (profile_dir / "quality_table.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(f"profiled {len(records)} records across {len(datasets_doc)} datasets")
    raise SystemExit(0)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--seed", type=int, default=None, help="override the configured seed")
def split(config_path: str, out_dir: str, seed: int | None) -> None:
    """Build the benchmark split plan from ingested manifests."""
    out = Path(out_dir)
    try:
        cfg = PipelineConfig.load(config_path, seed)
        records = _load_manifests(out, cfg)
        ids = [r.utterance_id for r in records]
        if len(ids) != len(set(ids)):
            raise ConfigError("duplicate utterance_ids across manifests")
        plan = build_benchmark(records, cfg.split_targets, cfg.seed)
    except ToolkitError as e:
        raise SystemExit(_fatal(out, type(e).__name__, str(e)))

    split_dir = out / "splits"
    split_dir.mkdir(parents=True, exist_ok=True)

    import pyarrow as pa
    import pyarrow.parquet as pq

    rows = plan.rows()
    table = pa.table(
        {
            "utterance_id": [r[0] for r in rows],
            "dialect": [r[1] for r in rows],
            "split": [r[2] for r in rows],
            "dataset_id": [r[3] for r in rows],
        },
        schema=pa.schema(
            [
                ("utterance_id", pa.string()),
                ("dialect", pa.string()),
                ("split", pa.string()),
                ("dataset_id", pa.string()),
            ],
            metadata={k: str(v) for k, v in cfg.run_block().items()},
        ),
    )
    pq.write_table(table, split_dir / "plan.parquet")
    (split_dir / "provenance.txt").write_text(
        _meta_line(cfg) + plan.provenance_text(), encoding="utf-8"
    )
    _write_json(
        split_dir / "plan.json",
        {
            "run": cfg.run_block(),
            "targets": {
                "adapt_hours": plan.targets.adapt_hours,
                "dev_hours": plan.targets.dev_hours,
                "test_hours": plan.targets.test_hours,
                "min_pool_hours": plan.targets.min_pool_hours,
            },
            "n_assigned": sum(1 for _, _, s, _ in rows if s != "unassigned"),
            "n_unassigned": sum(1 for _, _, s, _ in rows if s == "unassigned"),
            "dropped_ambiguous": plan.dropped_ambiguous,
            "dropped_unknown": plan.dropped_unknown,
            "no_data_dialects": plan.no_data_dialects,
            "underfilled": plan.underfilled,
            "fragment_modes": dict(sorted(plan.fragment_modes.items())),
        },
    )
    click.echo(
        f"planned {len(rows)} utterances "
        f"({len(plan.dropped_ambiguous)} ambiguous and {len(plan.dropped_unknown)} unknown excluded)"
    )
    raise SystemExit(0)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--hyp", "hyp_path", required=True, type=click.Path())
@click.option("--plan", "plan_path", type=click.Path(), default=None,
              help="split plan parquet (default: OUT/splits/plan.parquet)")
@click.option("--group-by", type=click.Choice(["dialect", "subdialect", "dataset"]),
              default="dialect")
@click.option("--split", "split_filter", default="all",
              type=click.Choice(["all", "train", "adapt", "dev", "test"]))
def score(config_path: str, out_dir: str, hyp_path: str, plan_path: str | None,
          group_by: str, split_filter: str) -> None:
    """Score a hypothesis file against the ingested references."""
    out = Path(out_dir)
    try:
        cfg = PipelineConfig.load(config_path)
        records = _load_manifests(out, cfg)
        plan_file = Path(plan_path) if plan_path else out / "splits" / "plan.parquet"
        plan_splits: dict[str, str] = {}
        if plan_file.exists():
            import pyarrow.parquet as pq

            for row in pq.read_table(plan_file).to_pylist():
                plan_splits[row["utterance_id"]] = row["split"]
        elif split_filter != "all":
            raise ConfigError(f"split filter needs a plan file; {plan_file} not found")

        hyp_rows = read_jsonl(hyp_path)
        hypotheses: dict[str, str] = {}
        for row in hyp_rows:
            utt_id = row.get("utterance_id")
            if not utt_id or "text" not in row:
                raise ConfigError(f"{hyp_path}: rows must carry utterance_id and text")
            if utt_id in hypotheses:
                raise ConfigError(f"{hyp_path}: duplicate hypothesis for {utt_id}")
            hypotheses[utt_id] = row["text"]
    except ToolkitError as e:
        raise SystemExit(_fatal(out, type(e).__name__, str(e)))

    def group_of(r: UtteranceRecord) -> str:
        if group_by == "dataset":
            return r.dataset_id
        if group_by == "subdialect":
            return render_dialect(r.dialect)
        return r.dialect.iso if hasattr(r.dialect, "iso") else render_dialect(r.dialect)

    selected = [
        r for r in records
        if split_filter == "all" or plan_splits.get(r.utterance_id) == split_filter
    ]
    references = {r.utterance_id: r.standardized_transcript for r in selected}
    groups = {r.utterance_id: group_of(r) for r in selected}

    report = score_corpus(
        references,
        hypotheses,
        groups,
        normalizer=cfg.normalizer(),
        include_empty_refs=cfg.include_empty_refs,
    )

    score_dir = out / "scores"
    score_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(hyp_path).stem

    lines = [_meta_line(cfg).rstrip("\n")]
    header = [
        "group", "n_utts", "wer_micro", "wer_macro", "cer_micro", "cer_macro",
        "word_sub", "word_del", "word_ins", "word_ref_len",
    ] + [f"bin{i}" for i in range(len(HISTOGRAM_LABELS))]
    lines.append("\t".join(header))

    def emit(name: str, g) -> None:
        row = [
            name, str(g.n_utts),
            f"{g.wer_micro:.6f}", f"{g.wer_macro:.6f}",
            f"{g.cer_micro:.6f}", f"{g.cer_macro:.6f}",
            str(g.word_sub), str(g.word_del), str(g.word_ins), str(g.word_ref_len),
        ] + [f"{frac:.6f}" for frac in g.histogram.fractions]
        lines.append("\t".join(row))

    for name in sorted(report.groups):
        emit(name, report.groups[name])
    # Overall row pools every scored utterance regardless of group.
    overall = GroupScore("ALL")
    for u in report.utterances:
        if u.empty_reference and not cfg.include_empty_refs:
            continue
        overall.add(u)
    emit("ALL", overall)
    (score_dir / f"{stem}.report.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")

    write_jsonl(
        score_dir / f"{stem}.utterances.jsonl",
        (
            {
                "utterance_id": u.utterance_id,
                "group": u.group,
                "wer": u.wer,
                "cer": u.cer,
                "word_sub": u.words.substitutions,
                "word_del": u.words.deletions,
                "word_ins": u.words.insertions,
                "word_ref_len": u.words.ref_len,
                "char_ref_len": u.chars.ref_len,
                "empty_reference": u.empty_reference,
            }
            for u in report.utterances
        ),
    )
    _write_json(
        score_dir / f"{stem}.summary.json",
        {
            "run": cfg.run_block(),
            "group_by": group_by,
            "split": split_filter,
            "n_scored": len(report.utterances),
            "unmatched_hypotheses": report.unmatched_hypotheses,
            "unmatched_references": report.unmatched_references,
            "empty_reference_ids": report.empty_reference_ids,
            "histogram_labels": list(HISTOGRAM_LABELS),
        },
    )
    for utt_id in report.unmatched_hypotheses:
        click.echo(f"warning: UnmatchedHypothesis {utt_id}", err=True)
    click.echo(
        f"scored {len(report.utterances)} utterances in {len(report.groups)} groups "
        f"({len(report.unmatched_hypotheses)} unmatched hypotheses)"
    )
    raise SystemExit(0 if report.utterances else 2)


@main.command()
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.argument("report_files", nargs=-1, required=True, type=click.Path())
def report(out_dir: str, report_files: tuple[str, ...]) -> None:
    """Emit plot-ready long-form data for the stacked WER-range figure."""
    out = Path(out_dir)
    rows: list[tuple[str, str, str, str]] = []
    try:
        for rf in sorted(report_files):
            system = Path(rf).stem.replace(".report", "")
            with open(rf, encoding="utf-8") as f:
                lines = [l.rstrip("\n") for l in f if not l.startswith("#")]
            header = lines[0].split("\t")
            bin_cols = [i for i, h in enumerate(header) if h.startswith("bin")]
            for line in lines[1:]:
                cells = line.split("\t")
                for label, col in zip(HISTOGRAM_LABELS, bin_cols):
                    rows.append((system, cells[0], label, cells[col]))
    except OSError as e:
        raise SystemExit(_fatal(out, type(e).__name__, str(e)))

    report_dir = out / "reports"
    report_dir.mkdir(parents=True, exist_ok=True)
    lines = ["system\tgroup\twer_range\tfraction"]
    lines.extend("\t".join(r) for r in rows)
    (report_dir / "wer_bins.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    click.echo(f"wrote {len(rows)} stacked-bin rows")
    raise SystemExit(0)


if __name__ == "__main__":
    main()
