import numpy as np
import pytest

from dialspeech.audio import write_wav
from dialspeech.errors import ConfigError
from dialspeech.ingest import DatasetConfig, ingest_dataset
from dialspeech.minicorpus import EXPECTED_KEPT
from dialspeech.schema import Ambiguous, DialectCode, validate_records
from dialspeech.textnorm import normalize


def _ingest(minicorpus, name, **kwargs):
    config = DatasetConfig.load(minicorpus["root"] / name / "config.yaml")
    out = minicorpus["root"] / "_out" / name
    return ingest_dataset(config, out_audio_dir=out, **kwargs)


def test_bayan_counts_and_reasons(minicorpus):
    records, report = _ingest(minicorpus, "bayan")
    assert report.kept == EXPECTED_KEPT["bayan"] == len(records)
    assert report.dropped == {"Empty": 1, "LatinOnly": 1, "TooShort": 1}
    assert not report.errors


def test_suq_counts(minicorpus):
    records, report = _ingest(minicorpus, "suq")
    assert report.kept == EXPECTED_KEPT["suq"] == len(records)
    assert not report.dropped
    kinds = {w["warning_kind"] for w in report.warnings}
    assert "unmapped_domain" in kinds and "unknown_location" in kinds


def test_schema_closure(minicorpus):
    for name in ("bayan", "suq"):
        records, _ = _ingest(minicorpus, name)
        assert validate_records(records) == {}
        for r in records:
            assert r.standardized_transcript == normalize(r.raw_transcript)
            assert r.duration > 0


def test_dialect_assignment_modes(minicorpus):
    bayan, _ = _ingest(minicorpus, "bayan")
    assert all(r.dialect == DialectCode("arb") for r in bayan)

    suq, _ = _ingest(minicorpus, "suq")
    by_id = {r.utterance_id: r for r in suq}
    assert by_id["suq-0001"].dialect.render() == "ary_MAR"
    assert by_id["suq-0008"].dialect == Ambiguous(("acw", "ars"))
    assert by_id["suq-0010"].dialect.render() == "afb_ARE-AZ"
    assert by_id["suq-0012"].dialect is None


def test_channel_split_binding(minicorpus):
    suq, _ = _ingest(minicorpus, "suq")
    by_id = {r.utterance_id: r for r in suq}
    left = by_id["suq-0001"]
    right = by_id["suq-0002"]
    assert left.audio_path != right.audio_path
    assert "spk-amal" in str(left.audio_path)
    assert "spk-badr" in str(right.audio_path)
    assert left.duration == right.duration


def test_domain_mapping(minicorpus):
    suq, _ = _ingest(minicorpus, "suq")
    by_id = {r.utterance_id: r for r in suq}
    assert by_id["suq-0001"].domain_theme == by_id["suq-0002"].domain_theme
    assert by_id["suq-0006"].domain_raw == "university life"
    assert by_id["suq-0006"].domain_theme == "Unknown"


def test_recording_meta_captured(minicorpus):
    bayan, _ = _ingest(minicorpus, "bayan")
    by_id = {r.utterance_id: r for r in bayan}
    assert by_id["bayan-0001"].recording_meta.sample_rate == 44100
    assert by_id["bayan-0001"].recording_meta.channels == 2
    assert by_id["bayan-0005"].recording_meta.sample_rate == 8000
    assert by_id["bayan-0001"].recording_meta.style == "Broadcast"


def test_canonical_split_tags(minicorpus):
    bayan, _ = _ingest(minicorpus, "bayan")
    tags = {r.utterance_id: r.split for r in bayan}
    assert tags["bayan-0001"] == "train"
    assert tags["bayan-0005"] == "dev"
    assert tags["bayan-0007"] == "test"


def test_missing_audio_and_duplicates(tmp_path):
    (tmp_path / "audio").mkdir()
    write_wav(tmp_path / "audio" / "a.wav", np.zeros(1600, dtype=np.int16), 16000)
    (tmp_path / "rows.tsv").write_text(
        "utt\tfile\ttext\n"
        "u1\ta.wav\tسلام\n"
        "u1\ta.wav\tسلام\n"
        "u2\tmissing.wav\tسلام\n",
        encoding="utf-8",
    )
    (tmp_path / "config.yaml").write_text(
        "dataset_id: tiny\nmanifest: rows.tsv\naudio_root: audio\n"
        "fields: {utterance_id: utt, audio: file, transcript: text}\n",
        encoding="utf-8",
    )
    records, report = ingest_dataset(
        DatasetConfig.load(tmp_path / "config.yaml"), out_audio_dir=tmp_path / "out"
    )
    assert report.kept == 1
    assert report.dropped == {"MalformedRow": 1, "MissingAudio": 1}
    kinds = [e["error_kind"] for e in report.errors]
    assert kinds == ["MalformedRow", "MissingAudio"]


def test_missing_audio_root_is_fatal(tmp_path):
    (tmp_path / "rows.tsv").write_text("utt\tfile\ttext\n", encoding="utf-8")
    (tmp_path / "config.yaml").write_text(
        "dataset_id: t\nmanifest: rows.tsv\naudio_root: nowhere\n"
        "fields: {utterance_id: utt, audio: file, transcript: text}\n",
        encoding="utf-8",
    )
    with pytest.raises(ConfigError):
        ingest_dataset(DatasetConfig.load(tmp_path / "config.yaml"))


def test_config_validation(tmp_path):
    (tmp_path / "rows.tsv").write_text("", encoding="utf-8")
    bad = tmp_path / "bad.yaml"
    bad.write_text(
        "dataset_id: t\nmanifest: rows.tsv\naudio_root: .\nfields: {utterance_id: u}\n",
        encoding="utf-8",
    )
    with pytest.raises(ConfigError):
        DatasetConfig.load(bad)
    bad.write_text(
        "dataset_id: t\nmanifest: rows.tsv\naudio_root: .\n"
        "dialect: {mode: volcanic}\n"
        "fields: {utterance_id: u, audio: a, transcript: t}\n",
        encoding="utf-8",
    )
    with pytest.raises(ConfigError):
        DatasetConfig.load(bad)


def test_buckwalter_never_mode(tmp_path):
    (tmp_path / "audio").mkdir()
    write_wav(tmp_path / "audio" / "a.wav", np.zeros(1600, dtype=np.int16), 16000)
    (tmp_path / "rows.tsv").write_text(
        "utt\tfile\ttext\nu1\ta.wav\tktb mktb\n", encoding="utf-8"
    )
    (tmp_path / "config.yaml").write_text(
        "dataset_id: t\nmanifest: rows.tsv\naudio_root: audio\nbuckwalter: never\n"
        "fields: {utterance_id: utt, audio: file, transcript: text}\n",
        encoding="utf-8",
    )
    records, report = ingest_dataset(
        DatasetConfig.load(tmp_path / "config.yaml"), out_audio_dir=tmp_path / "out"
    )
    # Without transliteration handling the row reads as Latin and is dropped.
    assert report.kept == 0
    assert report.dropped == {"LatinOnly": 1}


def test_duration_from_manifest_when_not_standardizing(tmp_path):
    (tmp_path / "audio").mkdir()
    write_wav(tmp_path / "audio" / "a.wav", np.zeros(4800, dtype=np.int16), 16000)
    (tmp_path / "rows.tsv").write_text(
        "utt\tfile\ttext\tdur\nu1\ta.wav\tسلام\t0.3\nu2\ta.wav\tسلام عليكم\t\n",
        encoding="utf-8",
    )
    (tmp_path / "config.yaml").write_text(
        "dataset_id: t\nmanifest: rows.tsv\naudio_root: audio\nstandardize_audio: false\n"
        "fields: {utterance_id: utt, audio: file, transcript: text, duration: dur}\n",
        encoding="utf-8",
    )
    records, report = ingest_dataset(
        DatasetConfig.load(tmp_path / "config.yaml"), out_audio_dir=tmp_path / "out"
    )
    assert report.kept == 1
    assert records[0].duration == 0.3
    assert records[0].audio_path.endswith("a.wav")
    # The second row has no duration anywhere: rejected, not guessed.
    assert report.dropped == {"MalformedRow": 1}


def test_parallel_ingest_matches_serial(minicorpus):
    serial, _ = _ingest(minicorpus, "suq", jobs=1)
    parallel, _ = _ingest(minicorpus, "suq", jobs=4)
    assert [r.utterance_id for r in serial] == [r.utterance_id for r in parallel]
    assert serial == parallel
