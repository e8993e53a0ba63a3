import pytest

from dialspeech.splits import (
    SplitTargets,
    assign_dataset_splits,
    build_benchmark,
    sample_to_duration,
)

from conftest import make_record


def _burst(prefix, n, duration, dataset_id="ds", dialect="arz_EGY", split="unassigned",
           speakers=None):
    records = []
    for i in range(n):
        speaker = None
        if speakers == "unique":
            speaker = f"{prefix}-spk{i}"
        elif isinstance(speakers, int):
            speaker = f"{prefix}-spk{i % speakers}"
        records.append(
            make_record(
                f"{prefix}-{i:04d}",
                duration=duration,
                dataset_id=dataset_id,
                dialect=dialect,
                split=split,
                speaker_id=speaker,
            )
        )
    return records


def test_sample_to_duration_exact_count():
    records = _burst("u", 30, 10.0)
    subset, underfilled = sample_to_duration(records, 60.0, seed=3)
    assert len(subset) == 6
    assert underfilled is False


def test_sample_to_duration_underfilled():
    records = _burst("u", 3, 10.0)
    subset, underfilled = sample_to_duration(records, 60.0, seed=3)
    assert len(subset) == 3
    assert underfilled is True


def test_sample_to_duration_deterministic():
    records = _burst("u", 50, 7.0)
    a, _ = sample_to_duration(records, 100.0, seed=11)
    b, _ = sample_to_duration(records, 100.0, seed=11)
    c, _ = sample_to_duration(records, 100.0, seed=12)
    assert [r.utterance_id for r in a] == [r.utterance_id for r in b]
    assert [r.utterance_id for r in a] != [r.utterance_id for r in c]


def test_sample_overshoot_bounded():
    records = _burst("u", 100, 9.0)
    subset, _ = sample_to_duration(records, 50.0, seed=1)
    total = sum(r.duration for r in subset)
    assert 50.0 <= total < 50.0 + 9.0


def test_canonical_tags_preserved():
    records = _burst("tr", 5, 10.0, split="train") + _burst("te", 3, 10.0, split="test")
    frag = assign_dataset_splits(records, SplitTargets(), seed=0)
    assert frag.mode == "canonical"
    for r in records:
        assert frag.assignments[r.utterance_id] == r.split


def test_canonical_untagged_rows_stay_unassigned():
    records = _burst("a", 2, 10.0, split="train") + _burst("b", 2, 10.0)
    frag = assign_dataset_splits(records, SplitTargets(), seed=0)
    assert frag.assignments["b-0000"] == "unassigned"


def test_sampling_path_hits_targets():
    # 240 x 60 s = 4 h, above the 3 h pooling threshold.
    records = _burst("u", 240, 60.0, speakers="unique")
    targets = SplitTargets()
    frag = assign_dataset_splits(records, targets, seed=5)
    assert frag.mode == "sampled"
    by_split = {}
    for utt, split in frag.assignments.items():
        by_split.setdefault(split, []).append(utt)
    dur = {s: len(v) * 60.0 for s, v in by_split.items()}
    assert targets.test_seconds <= dur["test"] < targets.test_seconds + 60.0
    assert targets.dev_seconds <= dur["dev"] < targets.dev_seconds + 60.0
    assert dur["train"] > 0
    assert sum(dur.values()) == 240 * 60.0


def test_thirds_path_balance():
    # 0.9 h in 108 x 30 s utterances: below the threshold.
    records = _burst("u", 108, 30.0)
    frag = assign_dataset_splits(records, SplitTargets(), seed=5)
    assert frag.mode == "thirds"
    loads = {"train": 0.0, "dev": 0.0, "test": 0.0}
    for utt, split in frag.assignments.items():
        loads[split] += 30.0
    mean = sum(loads.values()) / 3
    for value in loads.values():
        assert abs(value - mean) / mean <= 0.10


def test_speaker_hygiene_on_sampling_path():
    # 40 speakers x 6 utterances x 50 s = 3.3 h.
    records = _burst("u", 240, 50.0, speakers=40)
    frag = assign_dataset_splits(records, SplitTargets(), seed=2)
    assert frag.mode == "sampled"
    assert frag.speaker_grouped is True
    speaker_splits = {}
    for r in records:
        speaker_splits.setdefault(r.speaker_id, set()).add(frag.assignments[r.utterance_id])
    for splits in speaker_splits.values():
        assert len(splits) == 1  # whole speakers flow into one split


def test_build_benchmark_excludes_ambiguous():
    records = (
        _burst("sa", 10, 30.0, dialect="ambiguous:acw,ars")
        + _burst("eg", 10, 30.0, dialect="arz_EGY")
        + _burst("xx", 2, 30.0, dialect="unknown")
    )
    plan = build_benchmark(records, SplitTargets(), seed=0)
    assert len(plan.dropped_ambiguous) == 10
    assert len(plan.dropped_unknown) == 2
    assert set(plan.no_data_dialects) == {"acw", "ars"}
    assert not any(u.startswith("sa-") for u in plan.assignments)
    # Partition: assigned + dropped covers the input exactly once.
    assert len(plan.assignments) + 12 == len(records)


def test_build_benchmark_pools_across_datasets():
    a = _burst("a", 30, 30.0, dataset_id="dsa", dialect="ary_MAR", split="dev")
    b = _burst("b", 30, 30.0, dataset_id="dsb", dialect="ary_MAR", split="dev")
    train = _burst("t", 30, 30.0, dataset_id="dsa", dialect="ary_MAR", split="train")
    targets = SplitTargets(dev_hours=0.2, test_hours=0.2, adapt_hours=0.1, min_pool_hours=3.0)
    plan = build_benchmark(a + b + train, targets, seed=4)
    dev_sources = {
        plan.records[u].dataset_id
        for u, s in plan.assignments.items()
        if s == "dev"
    }
    assert dev_sources == {"dsa", "dsb"}  # both datasets contribute
    prov = plan.provenance()["ary"]
    assert set(prov) == {"dsa", "dsb"}


def test_build_benchmark_adapt_capped_from_train():
    train = _burst("t", 100, 60.0, split="train")  # 100 min of train-tagged
    targets = SplitTargets(adapt_hours=0.5, dev_hours=0.1, test_hours=0.1, min_pool_hours=99.0)
    plan = build_benchmark(train, targets, seed=9)
    adapt = [u for u, s in plan.assignments.items() if s == "adapt"]
    rest = [u for u, s in plan.assignments.items() if s == "train"]
    adapt_seconds = len(adapt) * 60.0
    assert targets.adapt_seconds <= adapt_seconds < targets.adapt_seconds + 60.0
    assert len(adapt) + len(rest) == 100


def test_plan_serialization_deterministic():
    records = (
        _burst("a", 50, 45.0, dataset_id="d1", dialect="arz_EGY")
        + _burst("b", 40, 45.0, dataset_id="d2", dialect="apc_JOR", speakers=8)
        + _burst("c", 10, 45.0, dataset_id="d3", dialect="ambiguous:acw,ars")
    )
    targets = SplitTargets(adapt_hours=0.2, dev_hours=0.1, test_hours=0.1, min_pool_hours=0.3)
    one = build_benchmark(records, targets, seed=7)
    two = build_benchmark(records, targets, seed=7)
    other = build_benchmark(records, targets, seed=8)
    assert one.rows() == two.rows()
    assert one.provenance_text() == two.provenance_text()
    assert one.rows() != other.rows()


def test_no_data_dialect_not_fatal():
    plan = build_benchmark([], SplitTargets(), seed=0)
    assert plan.rows() == []
    assert plan.no_data_dialects == []


def test_targets_validated():
    with pytest.raises(ValueError):
        SplitTargets(adapt_hours=0.0)
