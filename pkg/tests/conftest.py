import pytest

from dialspeech.minicorpus import build_minicorpus
from dialspeech.schema import ScoreSet, UtteranceRecord, parse_dialect


@pytest.fixture(scope="session")
def minicorpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("minicorpus")
    config = build_minicorpus(root)
    return {"root": root, "config": config}


def make_record(
    utt_id,
    duration=1.0,
    dataset_id="ds",
    dialect="arz_EGY",
    split="unassigned",
    speaker_id=None,
    text="مرحبا",  # مرحبا
    **scores,
):
    return UtteranceRecord(
        utterance_id=utt_id,
        dataset_id=dataset_id,
        source_id=dataset_id,
        audio_path=f"audio/{utt_id}.wav",
        duration=duration,
        raw_transcript=text,
        standardized_transcript=text,
        speaker_id=speaker_id,
        dialect=parse_dialect(dialect) if isinstance(dialect, str) else dialect,
        split=split,
        scores=ScoreSet(**scores) if scores else None,
    )
