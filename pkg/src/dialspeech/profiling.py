"""Per-dataset aggregation of dialectness and audio-quality scores.

Summaries are built as mergeable accumulators so chunked corpora can be
profiled in parallel and reduced: counts and hours add, mean/stddev merge
through streaming moments, and the retained score arrays concatenate for
quartiles.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import LengthMismatch, MissingScores, OutOfRangeScore, ZeroVariance


class AldiBin(enum.Enum):
    MSA = "MSA"
    LITTLE_DA = "LittleDA"
    MIXED = "Mixed"
    MOSTLY_DA = "MostlyDA"


BIN_ORDER = (AldiBin.MSA, AldiBin.LITTLE_DA, AldiBin.MIXED, AldiBin.MOSTLY_DA)
BIN_BOUNDARIES = (0.11, 0.44, 0.77)


def bin_aldi(score: float) -> AldiBin:
    """Map a dialectness score to its bin.

    Intervals are left-closed ([0, 0.11), [0.11, 0.44), [0.44, 0.77)) with
    the top bin closed at 1.0 so every valid score has a home.
    """
    if not 0.0 <= score <= 1.0:
        raise OutOfRangeScore(f"dialectness score {score!r} outside [0, 1]")
    if score < 0.11:
        return AldiBin.MSA
    if score < 0.44:
        return AldiBin.LITTLE_DA
    if score < 0.77:
        return AldiBin.MIXED
    return AldiBin.MOSTLY_DA


@dataclass
class _Moments:
    """Streaming mean/variance accumulator with a parallel-safe merge."""

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    def add(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)

    def merge(self, other: "_Moments") -> "_Moments":
        if self.n == 0:
            return _Moments(other.n, other.mean, other.m2)
        if other.n == 0:
            return _Moments(self.n, self.mean, self.m2)
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return _Moments(n, mean, m2)

    @property
    def std(self) -> float:
        # Population convention (divide by N).
        return math.sqrt(self.m2 / self.n) if self.n else 0.0


def _quartiles(values: list[float]) -> tuple[float, float, float]:
    """Linear-interpolation quartiles of a nonempty sample."""
    xs = sorted(values)
    n = len(xs)

    def q(p: float) -> float:
        pos = p * (n - 1)
        lo = int(pos)
        hi = min(lo + 1, n - 1)
        frac = pos - lo
        return xs[lo] * (1 - frac) + xs[hi] * frac

    return q(0.25), q(0.50), q(0.75)


@dataclass
class DialectnessSummary:
    """ALDi distribution of one record set: bin shares, hours, moments."""

    bin_counts: dict[AldiBin, int] = field(default_factory=lambda: {b: 0 for b in BIN_ORDER})
    bin_seconds: dict[AldiBin, float] = field(default_factory=lambda: {b: 0.0 for b in BIN_ORDER})
    moments: _Moments = field(default_factory=_Moments)
    scores: list[float] = field(default_factory=list)

    @classmethod
    def from_records(cls, records) -> "DialectnessSummary":
        missing = [r.utterance_id for r in records if r.scores is None or r.scores.aldi is None]
        if missing:
            raise MissingScores(missing)
        s = cls()
        for r in records:
            b = bin_aldi(r.scores.aldi)
            s.bin_counts[b] += 1
            s.bin_seconds[b] += r.duration
            s.moments.add(r.scores.aldi)
            s.scores.append(r.scores.aldi)
        return s

    def merge(self, other: "DialectnessSummary") -> "DialectnessSummary":
        out = DialectnessSummary()
        for b in BIN_ORDER:
            out.bin_counts[b] = self.bin_counts[b] + other.bin_counts[b]
            out.bin_seconds[b] = self.bin_seconds[b] + other.bin_seconds[b]
        out.moments = self.moments.merge(other.moments)
        out.scores = self.scores + other.scores
        return out

    @property
    def n(self) -> int:
        return sum(self.bin_counts.values())

    @property
    def bin_fractions(self) -> dict[AldiBin, float]:
        n = self.n
        return {b: (c / n if n else 0.0) for b, c in self.bin_counts.items()}

    @property
    def bin_hours(self) -> dict[AldiBin, float]:
        return {b: s / 3600.0 for b, s in self.bin_seconds.items()}

    @property
    def mean(self) -> float:
        return self.moments.mean

    @property
    def quartiles(self) -> tuple[float, float, float]:
        if not self.scores:
            return (0.0, 0.0, 0.0)
        return _quartiles(self.scores)

    def fraction_exceeding(self, boundary: float) -> float:
        if not self.scores:
            return 0.0
        return sum(1 for x in self.scores if x > boundary) / len(self.scores)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "bin_fractions": {b.value: f for b, f in self.bin_fractions.items()},
            "bin_hours": {b.value: h for b, h in self.bin_hours.items()},
            "mean": self.mean,
            "quartiles": list(self.quartiles),
            "fraction_exceeding": {
                str(b): self.fraction_exceeding(b) for b in BIN_BOUNDARIES
            },
        }


QUALITY_METRICS = ("pesq", "stoi", "si_sdr", "nmr_mos")


@dataclass
class QualitySummary:
    """Mean and population standard deviation per quality proxy."""

    moments: dict[str, _Moments] = field(
        default_factory=lambda: {m: _Moments() for m in QUALITY_METRICS}
    )
    missing: dict[str, int] = field(
        default_factory=lambda: {m: 0 for m in QUALITY_METRICS}
    )

    @classmethod
    def from_records(cls, records) -> "QualitySummary":
        s = cls()
        for r in records:
            for m in QUALITY_METRICS:
                value = getattr(r.scores, m, None) if r.scores is not None else None
                if value is None:
                    s.missing[m] += 1
                else:
                    s.moments[m].add(value)
        return s

    def merge(self, other: "QualitySummary") -> "QualitySummary":
        out = QualitySummary()
        for m in QUALITY_METRICS:
            out.moments[m] = self.moments[m].merge(other.moments[m])
            out.missing[m] = self.missing[m] + other.missing[m]
        return out

    def to_dict(self) -> dict:
        out = {}
        for m in QUALITY_METRICS:
            mom = self.moments[m]
            out[m] = (
                None
                if mom.n == 0
                else {"mean": mom.mean, "std": mom.std, "n": mom.n, "missing": self.missing[m]}
            )
        return out


def summarize_dialectness(records) -> DialectnessSummary:
    return DialectnessSummary.from_records(list(records))


def summarize_quality(records) -> QualitySummary:
    return QualitySummary.from_records(list(records))


def pearson(xs, ys) -> float:
    """Product-moment correlation (two-pass, centered)."""
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys):
        raise LengthMismatch(f"{len(xs)} vs {len(ys)} values")
    n = len(xs)
    if n < 2:
        raise LengthMismatch("need at least two pairs")
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = syy = sxy = 0.0
    for x, y in zip(xs, ys):
        dx = x - mx
        dy = y - my
        sxx += dx * dx
        syy += dy * dy
        sxy += dx * dy
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVariance("correlation undefined for a constant sequence")
    return sxy / math.sqrt(sxx * syy)


def msa_da_share(records) -> tuple[float, float]:
    """(msa fraction, da fraction) over records carrying the binary label."""
    missing = [r.utterance_id for r in records if r.scores is None or r.scores.msa_da is None]
    if missing:
        raise MissingScores(missing)
    labels = [r.scores.msa_da for r in records]
    if not labels:
        raise MissingScores([])
    da = sum(labels) / len(labels)
    return (1.0 - da, da)
