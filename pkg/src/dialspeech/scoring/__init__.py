"""WER/CER scoring with shared normalization on both sides.

The alignment kernel is compiled (Cython) when available and falls back
to a pure-Python twin otherwise; ``BACKEND`` names the one in use and
``benchmarks/bench_align.py`` compares them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..textnorm import Normalizer, normalize

try:
    from . import _align_cy as _kernel  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    from . import _align_py as _kernel

from . import _align_py

BACKEND: str = _kernel.BACKEND

__all__ = [
    "BACKEND",
    "EditCounts",
    "PairScore",
    "UtteranceScore",
    "GroupScore",
    "ScoreReport",
    "WerHistogram",
    "HISTOGRAM_LABELS",
    "edit_counts",
    "wer",
    "cer",
    "score_pair",
    "score_corpus",
    "wer_histogram",
]


@dataclass(frozen=True)
class EditCounts:
    """Error counts of one minimum-cost alignment against a reference."""

    substitutions: int
    deletions: int
    insertions: int
    ref_len: int

    @property
    def total(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def _intern(seq) -> list[int]:
    ids: dict = {}
    out = []
    for a in seq:
        out.append(ids.setdefault(a, len(ids)))
    return out


def edit_counts(ref_tokens, hyp_tokens) -> EditCounts:
    """Minimum-edit alignment counts with a pinned backtrace tie-break
    (substitution preferred over insertion over deletion)."""
    ids: dict = {}
    r = [ids.setdefault(t, len(ids)) for t in ref_tokens]
    h = [ids.setdefault(t, len(ids)) for t in hyp_tokens]
    s, d, i = _kernel.align_counts(r, h)
    return EditCounts(s, d, i, len(r))


@dataclass(frozen=True)
class PairScore:
    """Word- and character-level rates for one reference/hypothesis pair."""

    wer: float
    cer: float
    words: EditCounts
    chars: EditCounts
    empty_reference: bool


def _rate(counts: EditCounts, hyp_len: int) -> tuple[float, bool]:
    if counts.ref_len > 0:
        return counts.total / counts.ref_len, False
    if hyp_len > 0:
        # Defined as insertions over a unit reference and flagged.
        return float(counts.insertions), True
    return 0.0, False


def score_pair(ref_text: str, hyp_text: str, normalizer: Normalizer | None = None) -> PairScore:
    """Normalize both sides, then score at word and character level.

    Rates are unbounded above and never clipped.
    """
    norm = normalizer.normalize if normalizer is not None else normalize
    ref = norm(ref_text)
    hyp = norm(hyp_text)

    ref_tokens = ref.split()
    hyp_tokens = hyp.split()
    words = edit_counts(ref_tokens, hyp_tokens)
    wer_value, empty_ref = _rate(words, len(hyp_tokens))

    # Characters of the normalized text, single spaces included.
    sc, dc, ic = _kernel.align_counts([ord(c) for c in ref], [ord(c) for c in hyp])
    chars = EditCounts(sc, dc, ic, len(ref))
    cer_value, _ = _rate(chars, len(hyp))

    return PairScore(wer_value, cer_value, words, chars, empty_ref)


def wer(ref_text: str, hyp_text: str, normalizer: Normalizer | None = None) -> float:
    return score_pair(ref_text, hyp_text, normalizer).wer


def cer(ref_text: str, hyp_text: str, normalizer: Normalizer | None = None) -> float:
    return score_pair(ref_text, hyp_text, normalizer).cer


HISTOGRAM_LABELS = (
    "<=10%",
    "(10,20]%",
    "(20,30]%",
    "(30,40]%",
    "(40,50]%",
    "(50,60]%",
    "(60,70]%",
    "(70,80]%",
    "(80,90]%",
    "(90,100]%",
    ">100%",
)

_EDGES = tuple(k / 10 for k in range(1, 11))


def _bin_index(rate: float) -> int:
    for idx, edge in enumerate(_EDGES):
        if rate <= edge:
            return idx
    return 10


@dataclass(frozen=True)
class WerHistogram:
    """Per-bin utterance fractions over the 11 error-rate ranges."""

    counts: tuple[int, ...]

    @classmethod
    def from_rates(cls, rates) -> "WerHistogram":
        counts = [0] * len(HISTOGRAM_LABELS)
        for r in rates:
            counts[_bin_index(r)] += 1
        return cls(tuple(counts))

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def fractions(self) -> tuple[float, ...]:
        n = self.n
        if n == 0:
            return tuple(0.0 for _ in self.counts)
        return tuple(c / n for c in self.counts)


def wer_histogram(rates) -> WerHistogram:
    """Assign rates to the 11 bins; interior edges are right-closed."""
    return WerHistogram.from_rates(rates)


@dataclass(frozen=True)
class UtteranceScore:
    utterance_id: str
    group: str
    wer: float
    cer: float
    words: EditCounts
    chars: EditCounts
    empty_reference: bool


@dataclass
class GroupScore:
    group: str
    n_utts: int = 0
    word_sub: int = 0
    word_del: int = 0
    word_ins: int = 0
    word_ref_len: int = 0
    char_sub: int = 0
    char_del: int = 0
    char_ins: int = 0
    char_ref_len: int = 0
    wer_rates: list[float] = field(default_factory=list)
    cer_rates: list[float] = field(default_factory=list)

    def add(self, u: UtteranceScore) -> None:
        self.n_utts += 1
        self.word_sub += u.words.substitutions
        self.word_del += u.words.deletions
        self.word_ins += u.words.insertions
        self.word_ref_len += u.words.ref_len
        self.char_sub += u.chars.substitutions
        self.char_del += u.chars.deletions
        self.char_ins += u.chars.insertions
        self.char_ref_len += u.chars.ref_len
        self.wer_rates.append(u.wer)
        self.cer_rates.append(u.cer)

    @property
    def wer_micro(self) -> float:
        errors = self.word_sub + self.word_del + self.word_ins
        return errors / self.word_ref_len if self.word_ref_len else 0.0

    @property
    def cer_micro(self) -> float:
        errors = self.char_sub + self.char_del + self.char_ins
        return errors / self.char_ref_len if self.char_ref_len else 0.0

    @property
    def wer_macro(self) -> float:
        return sum(self.wer_rates) / len(self.wer_rates) if self.wer_rates else 0.0

    @property
    def cer_macro(self) -> float:
        return sum(self.cer_rates) / len(self.cer_rates) if self.cer_rates else 0.0

    @property
    def histogram(self) -> WerHistogram:
        return WerHistogram.from_rates(self.wer_rates)


@dataclass
class ScoreReport:
    """Corpus-level scoring result: per-group aggregates plus retained
    per-utterance detail and the join mismatches."""

    groups: dict[str, GroupScore]
    utterances: list[UtteranceScore]
    unmatched_hypotheses: list[str]
    unmatched_references: list[str]
    empty_reference_ids: list[str]


def score_corpus(
    references: dict[str, str],
    hypotheses: dict[str, str],
    groups: dict[str, str] | None = None,
    normalizer: Normalizer | None = None,
    include_empty_refs: bool = False,
) -> ScoreReport:
    """Score hypothesis texts against references keyed by utterance id.

    Ids present on only one side are reported and excluded.  Pairs whose
    normalized reference is empty are flagged; by default they are kept in
    the detail rows but left out of the pooled and averaged figures.
    """
    unmatched_hyp = sorted(set(hypotheses) - set(references))
    unmatched_ref = sorted(set(references) - set(hypotheses))

    group_scores: dict[str, GroupScore] = {}
    detail: list[UtteranceScore] = []
    empty_ids: list[str] = []

    for utt_id in sorted(set(references) & set(hypotheses)):
        pair = score_pair(references[utt_id], hypotheses[utt_id], normalizer)
        group = groups.get(utt_id, "all") if groups is not None else "all"
        u = UtteranceScore(
            utterance_id=utt_id,
            group=group,
            wer=pair.wer,
            cer=pair.cer,
            words=pair.words,
            chars=pair.chars,
            empty_reference=pair.empty_reference,
        )
        detail.append(u)
        if pair.empty_reference:
            empty_ids.append(utt_id)
            if not include_empty_refs:
                continue
        group_scores.setdefault(group, GroupScore(group)).add(u)

    return ScoreReport(
        groups=group_scores,
        utterances=detail,
        unmatched_hypotheses=unmatched_hyp,
        unmatched_references=unmatched_ref,
        empty_reference_ids=empty_ids,
    )
