"""Stratified review sampling for label sanity checks."""

from __future__ import annotations

import random

from .errors import EmptyCorpus
from .schema import render_dialect

STRATA_KEYS = ("dataset_id", "dialect")


def _stratum_key(record, strata_keys) -> tuple[str, ...]:
    parts = []
    for key in strata_keys:
        if key == "dialect":
            parts.append(render_dialect(record.dialect))
        else:
            parts.append(str(getattr(record, key)))
    return tuple(parts)


def allocate_proportional(sizes: dict, n: int) -> dict:
    """Largest-remainder allocation of n over strata.

    When n is at least the number of nonempty strata, every stratum gets
    at least one slot (repaired by taking from the largest allocations).
    Ties break on the stratum key so the result is deterministic.
    """
    total = sum(sizes.values())
    if total == 0 or n == 0:
        return {k: 0 for k in sizes}
    quotas = {k: n * s / total for k, s in sizes.items()}
    alloc = {k: int(q) for k, q in quotas.items()}
    leftover = n - sum(alloc.values())
    by_remainder = sorted(sizes, key=lambda k: (-(quotas[k] - alloc[k]), k))
    for k in by_remainder[:leftover]:
        alloc[k] += 1

    nonempty = [k for k, s in sizes.items() if s > 0]
    if n >= len(nonempty):
        starving = sorted(k for k in nonempty if alloc[k] == 0)
        for k in starving:
            donor = max(sorted(alloc), key=lambda d: (alloc[d], d))
            alloc[donor] -= 1
            alloc[k] += 1
    for k, s in sizes.items():
        if alloc[k] > s:  # cannot draw more than the stratum holds
            raise ValueError(f"stratum {k} has {s} records, allocation asked {alloc[k]}")
    return alloc


def sanity_sample(records, n: int, strata_keys=("dataset_id",), seed: int = 0):
    """Deterministic proportional stratified sample for manual review.

    Allocation uses largest-remainder rounding; each stratum is drawn with
    its own seeded generator, and strata are emitted in sorted key order.
    """
    records = list(records)
    if not records:
        raise EmptyCorpus("cannot sample from an empty corpus")
    if not set(strata_keys) <= set(STRATA_KEYS):
        raise ValueError(f"strata keys must be a subset of {STRATA_KEYS}")
    if n > len(records):
        raise ValueError(f"sample size {n} exceeds corpus size {len(records)}")

    strata: dict[tuple[str, ...], list] = {}
    for r in records:
        strata.setdefault(_stratum_key(r, strata_keys), []).append(r)

    alloc = allocate_proportional({k: len(v) for k, v in strata.items()}, n)
    out = []
    for key in sorted(strata):
        take = alloc[key]
        if take == 0:
            continue
        rng = random.Random(f"{seed}|sanity|{'|'.join(key)}")
        out.extend(rng.sample(strata[key], take))
    return out
