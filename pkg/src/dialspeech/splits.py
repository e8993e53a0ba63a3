"""Benchmark split construction.

Per dataset (within one variety), canonical author splits are preserved
verbatim; otherwise, with enough material, test and dev are sampled to
their duration targets and the rest goes to train; small pools are split
into three duration-balanced parts.  Per variety, the per-dataset
fragments are pooled, dev/test are capped to their targets, and the
adaptation budget is drawn from train-tagged material.  Records with
ambiguous or unknown variety labels never enter the benchmark.

All randomness flows from one integer seed through scoped generators, so
identical inputs yield byte-identical plans.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .schema import Ambiguous, DialectCode, UtteranceRecord, render_dialect

CANONICAL_TAGS = ("train", "dev", "test")


@dataclass(frozen=True)
class SplitTargets:
    adapt_hours: float = 5.0
    dev_hours: float = 1.0
    test_hours: float = 1.0
    min_pool_hours: float = 3.0

    def __post_init__(self):
        for name in ("adapt_hours", "dev_hours", "test_hours", "min_pool_hours"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def adapt_seconds(self) -> float:
        return self.adapt_hours * 3600.0

    @property
    def dev_seconds(self) -> float:
        return self.dev_hours * 3600.0

    @property
    def test_seconds(self) -> float:
        return self.test_hours * 3600.0


def _rng(seed: int, *scope) -> random.Random:
    return random.Random("|".join([str(seed), *scope]))


def sample_to_duration(records, target_seconds: float, seed: int, salt: str = ""):
    """Greedy accumulation over a seeded shuffle until the target is met.

    Returns (subset, underfilled).  Accumulation stops as soon as the
    cumulative duration reaches the target, so any overshoot is bounded by
    the final accepted utterance.  If everything together falls short, the
    whole input is returned with the underfilled flag set.
    """
    if target_seconds <= 0:
        raise ValueError("target duration must be positive")
    pool = sorted(records, key=lambda r: r.utterance_id)
    _rng(seed, "sample", salt).shuffle(pool)
    out = []
    cum = 0.0
    for r in pool:
        if cum >= target_seconds:
            break
        out.append(r)
        cum += r.duration
    return out, cum < target_seconds


def _speaker_groups(records) -> tuple[list[list[UtteranceRecord]], bool]:
    """Group records by speaker (singletons when speaker_id is absent).

    Groups are ordered by their first utterance id for determinism.
    """
    by_speaker: dict[str, list[UtteranceRecord]] = {}
    singles: list[list[UtteranceRecord]] = []
    for r in sorted(records, key=lambda r: r.utterance_id):
        if r.speaker_id:
            by_speaker.setdefault(r.speaker_id, []).append(r)
        else:
            singles.append([r])
    grouped = bool(by_speaker)
    groups = list(by_speaker.values()) + singles
    groups.sort(key=lambda g: g[0].utterance_id)
    return groups, grouped


@dataclass
class DatasetFragment:
    """Stage-one assignment of one dataset's records for one variety."""

    dataset_id: str
    assignments: dict[str, str] = field(default_factory=dict)
    mode: str = "empty"  # canonical | sampled | thirds | empty
    speaker_grouped: bool = False
    underfilled: list[str] = field(default_factory=list)


def assign_dataset_splits(records, targets: SplitTargets, seed: int) -> DatasetFragment:
    records = list(records)
    if not records:
        return DatasetFragment(dataset_id="")
    dataset_id = records[0].dataset_id

    if any(r.split in CANONICAL_TAGS for r in records):
        # Author-released designations are kept verbatim; rows the release
        # left untagged stay unassigned rather than guessing a split.
        assignments = {
            r.utterance_id: (r.split if r.split in CANONICAL_TAGS else "unassigned")
            for r in records
        }
        return DatasetFragment(dataset_id, assignments, mode="canonical")

    total = sum(r.duration for r in records)
    groups, grouped = _speaker_groups(records)
    frag = DatasetFragment(dataset_id, mode="sampled", speaker_grouped=grouped)

    if total >= targets.min_pool_hours * 3600.0:
        # Whole speakers flow into one split so test stays speaker-disjoint.
        rng = _rng(seed, "dataset", dataset_id)
        rng.shuffle(groups)
        budgets = [("test", targets.test_seconds), ("dev", targets.dev_seconds)]
        cursor = 0
        for split, budget in budgets:
            cum = 0.0
            while cum < budget and cursor < len(groups):
                for r in groups[cursor]:
                    frag.assignments[r.utterance_id] = split
                cum += sum(r.duration for r in groups[cursor])
                cursor += 1
            if cum < budget:
                frag.underfilled.append(split)
        for g in groups[cursor:]:
            for r in g:
                frag.assignments[r.utterance_id] = "train"
        return frag

    # Not enough for targeted sampling: three duration-balanced parts.
    frag.mode = "thirds"
    loads = {"train": 0.0, "dev": 0.0, "test": 0.0}
    order = ("train", "dev", "test")
    for g in sorted(groups, key=lambda g: (-sum(r.duration for r in g), g[0].utterance_id)):
        split = min(order, key=lambda s: (loads[s], order.index(s)))
        for r in g:
            frag.assignments[r.utterance_id] = split
        loads[split] += sum(r.duration for r in g)
    return frag


@dataclass
class SplitPlan:
    seed: int
    targets: SplitTargets
    assignments: dict[str, str] = field(default_factory=dict)
    records: dict[str, UtteranceRecord] = field(default_factory=dict)
    dropped_ambiguous: list[str] = field(default_factory=list)
    dropped_unknown: list[str] = field(default_factory=list)
    no_data_dialects: list[str] = field(default_factory=list)
    underfilled: list[str] = field(default_factory=list)
    fragment_modes: dict[str, str] = field(default_factory=dict)

    def rows(self) -> list[tuple[str, str, str, str]]:
        """Deterministic (utterance_id, dialect, split, dataset_id) rows."""
        out = []
        for utt_id in sorted(self.assignments):
            r = self.records[utt_id]
            out.append(
                (utt_id, render_dialect(r.dialect), self.assignments[utt_id], r.dataset_id)
            )
        return out

    def provenance(self) -> dict[str, dict[str, dict[str, float]]]:
        """dialect -> dataset -> split -> hours, over assigned records."""
        table: dict[str, dict[str, dict[str, float]]] = {}
        for utt_id, split in self.assignments.items():
            if split == "unassigned":
                continue
            r = self.records[utt_id]
            iso = r.dialect.iso
            per_ds = table.setdefault(iso, {}).setdefault(r.dataset_id, {})
            per_ds[split] = per_ds.get(split, 0.0) + r.duration / 3600.0
        return table

    def provenance_text(self) -> str:
        lines = [f"seed: {self.seed}"]
        table = self.provenance()
        for iso in sorted(set(table) | set(self.no_data_dialects)):
            if iso in self.no_data_dialects:
                lines.append(f"{iso}: no data (all candidate records excluded)")
                continue
            lines.append(f"{iso}:")
            for split in ("adapt", "dev", "test", "train"):
                contributions = [
                    (ds, hours[split])
                    for ds, hours in table[iso].items()
                    if hours.get(split)
                ]
                if not contributions:
                    continue
                contributions.sort(key=lambda c: (-c[1], c[0]))
                total = sum(h for _, h in contributions)
                detail = ", ".join(f"{ds} {h:.2f}" for ds, h in contributions)
                lines.append(f"  {split}: {total:.2f} h ({detail})")
        if self.underfilled:
            lines.append("underfilled: " + ", ".join(sorted(self.underfilled)))
        return "\n".join(lines) + "\n"


def build_benchmark(all_records, targets: SplitTargets | None = None, seed: int = 0) -> SplitPlan:
    """Pool per-variety material across datasets into the benchmark plan."""
    targets = targets or SplitTargets()
    plan = SplitPlan(seed=seed, targets=targets)

    expected: set[str] = set()
    by_dialect: dict[str, list[UtteranceRecord]] = {}
    for r in all_records:
        if isinstance(r.dialect, Ambiguous):
            plan.dropped_ambiguous.append(r.utterance_id)
            expected.update(r.dialect.candidates)
        elif isinstance(r.dialect, DialectCode):
            expected.add(r.dialect.iso)
            by_dialect.setdefault(r.dialect.iso, []).append(r)
        else:
            plan.dropped_unknown.append(r.utterance_id)
    plan.dropped_ambiguous.sort()
    plan.dropped_unknown.sort()

    for iso in sorted(by_dialect):
        records = by_dialect[iso]
        pools: dict[str, list[UtteranceRecord]] = {"train": [], "dev": [], "test": []}

        by_dataset: dict[str, list[UtteranceRecord]] = {}
        for r in records:
            by_dataset.setdefault(r.dataset_id, []).append(r)
        for dataset_id in sorted(by_dataset):
            frag = assign_dataset_splits(by_dataset[dataset_id], targets, seed)
            plan.fragment_modes[f"{iso}/{dataset_id}"] = frag.mode
            for r in by_dataset[dataset_id]:
                tag = frag.assignments[r.utterance_id]
                plan.assignments[r.utterance_id] = "unassigned"
                plan.records[r.utterance_id] = r
                if tag in pools:
                    pools[tag].append(r)

        # Benchmark selection: cap dev/test, draw adaptation from train.
        for split, budget in (("test", targets.test_seconds), ("dev", targets.dev_seconds)):
            if not pools[split]:
                continue
            chosen, underfilled = sample_to_duration(pools[split], budget, seed, f"{iso}|{split}")
            if underfilled:
                plan.underfilled.append(f"{iso}/{split}")
            for r in chosen:
                plan.assignments[r.utterance_id] = split

        if pools["train"]:
            adapt, underfilled = sample_to_duration(
                pools["train"], targets.adapt_seconds, seed, f"{iso}|adapt"
            )
            if underfilled:
                plan.underfilled.append(f"{iso}/adapt")
            adapt_ids = {r.utterance_id for r in adapt}
            for r in pools["train"]:
                plan.assignments[r.utterance_id] = (
                    "adapt" if r.utterance_id in adapt_ids else "train"
                )

    assigned_isos = {
        plan.records[u].dialect.iso
        for u, s in plan.assignments.items()
        if s != "unassigned"
    }
    plan.no_data_dialects = sorted(expected - assigned_isos)
    plan.underfilled.sort()
    return plan
