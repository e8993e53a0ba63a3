"""CLI: batch-score a manifest and write score-interchange files.

Sibling outputs land next to the score file: ``<out>.warnings.jsonl``,
``<out>.errors.jsonl`` and, for audio, ``<out>.assignments.jsonl`` with
the seeded non-matching-reference choices.
"""

from __future__ import annotations

from pathlib import Path

import click

from . import AdapterError, __version__
from .audio_scores import ReferencePool, score_audio
from .backends import make_audio_backend, make_text_backend
from .manifest_io import jsonl_line, read_manifest, workspace_root
from .text_scores import score_text


def _write_rows(path: Path, rows: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(jsonl_line(row) + "\n")


def _batch_writer(path: Path):
    path.parent.mkdir(parents=True, exist_ok=True)
    handle = open(path, "w", encoding="utf-8")

    def write(batch: list[dict]) -> None:
        for row in batch:
            handle.write(jsonl_line(row) + "\n")
        handle.flush()

    return handle, write


@click.group()
@click.version_option(__version__)
def main() -> None:
    """Run the neural characterizers over a toolkit manifest."""


@main.command("score-text")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--batch-size", default=32, show_default=True)
@click.option("--backend", default="transformers", show_default=True,
              type=click.Choice(["transformers", "stub"]))
@click.option("--msa-da-model", default=None, help="two-class checkpoint override")
@click.option("--device", default="cpu", show_default=True)
def score_text_cmd(manifest_path, out_path, batch_size, backend, msa_da_model, device):
    """Emit dialectness and MSA/DA rows for every manifest utterance."""
    out = Path(out_path)
    try:
        rows = read_manifest(manifest_path)
        scorer = make_text_backend(backend, device, msa_da_model)
        handle, write = _batch_writer(out)
        try:
            result = score_text(rows, scorer, batch_size, on_batch=write)
        finally:
            handle.close()
    except AdapterError as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        raise SystemExit(1)
    _write_rows(out.with_suffix(out.suffix + ".warnings.jsonl"), result.warnings)
    click.echo(
        f"scored {len(result.rows)}/{len(rows)} transcripts "
        f"({result.clamped} clamped, {len(result.warnings)} warnings)"
    )


@main.command("score-audio")
@click.option("--manifest", "manifest_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--reference-pool", "pool_dir", required=True, type=click.Path(exists=True),
              help="directory of clean 16 kHz mono wav clips")
@click.option("--seed", default=0, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--backend", default="squim", show_default=True,
              type=click.Choice(["squim", "stub"]))
@click.option("--device", default="cpu", show_default=True)
@click.option("--audio-root", default=None, type=click.Path(),
              help="base for relative audio paths (default: the manifest's workspace)")
def score_audio_cmd(manifest_path, out_path, pool_dir, seed, batch_size, backend, device, audio_root):
    """Emit quality-proxy rows (pesq, stoi, si_sdr, nmr_mos) per utterance."""
    out = Path(out_path)
    try:
        rows = read_manifest(manifest_path)
        pool = ReferencePool.load(pool_dir)
        scorer = make_audio_backend(backend, device)
        root = Path(audio_root) if audio_root else workspace_root(manifest_path)
        handle, write = _batch_writer(out)
        try:
            result = score_audio(rows, pool, seed, scorer, root, batch_size, on_batch=write)
        finally:
            handle.close()
    except AdapterError as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        raise SystemExit(1)
    _write_rows(out.with_suffix(out.suffix + ".assignments.jsonl"), result.assignments)
    _write_rows(out.with_suffix(out.suffix + ".errors.jsonl"), result.errors)
    click.echo(
        f"scored {len(result.rows)}/{len(rows)} utterances "
        f"({len(result.errors)} skipped)"
    )


if __name__ == "__main__":
    main()
