"""Transcript standardization: Buckwalter handling, cleanup pipeline, script filtering.

The cleanup applied to every transcript is, in order: Buckwalter
transliteration converted to Arabic script when detected, Unicode NFKD
decomposition, removal of all combining marks (category Mn, which covers
the tashkeel), removal of punctuation (every general-category-P codepoint
plus a configurable extra set), orthographic unification (hamzated alef
forms to bare alef, teh marbuta to heh, alef maksura to yeh, tatweel
dropped), and whitespace trimming/collapsing.

The output is a fixed point of the pipeline.  To keep that guarantee,
Buckwalter detection is evaluated ignoring the characters the later
stages delete (combining marks, punctuation-set members, tatweel):
otherwise deleting punctuation could flip the coverage ratio across the
detection threshold between a first and a second application.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

__all__ = [
    "ScriptClass",
    "TranscriptPair",
    "BuckwalterTable",
    "Normalizer",
    "detect_buckwalter",
    "buckwalter_to_arabic",
    "arabic_to_buckwalter",
    "normalize",
    "classify_script",
]

_TATWEEL = "ـ"

# Arabic script blocks (base + supplement/extended + presentation forms).
_ARABIC_RANGES = (
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0xFB50, 0xFDFF),
    (0xFE70, 0xFEFF),
)

_LATIN_RANGES = (
    (0x0041, 0x005A),
    (0x0061, 0x007A),
    (0x00C0, 0x024F),
    (0x1E00, 0x1EFF),
    (0x2C60, 0x2C7F),
    (0xA720, 0xA7FF),
)


def _in_ranges(ch: str, ranges) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in ranges)


class ScriptClass(enum.Enum):
    ARABIC_ONLY = "ArabicOnly"
    LATIN_ONLY = "LatinOnly"
    MIXED = "Mixed"
    EMPTY = "Empty"


def classify_script(text: str) -> ScriptClass:
    """Classify by the letters present; non-letters never affect the result.

    Letters outside both the Arabic and Latin blocks make the text MIXED.
    """
    letters = [c for c in text if unicodedata.category(c).startswith("L")]
    if not letters:
        return ScriptClass.EMPTY
    if all(_in_ranges(c, _ARABIC_RANGES) for c in letters):
        return ScriptClass.ARABIC_ONLY
    if all(_in_ranges(c, _LATIN_RANGES) for c in letters):
        return ScriptClass.LATIN_ONLY
    return ScriptClass.MIXED


class BuckwalterTable:
    """One-to-one transliteration table loaded from a tab-separated file.

    Each data line is ``symbol<TAB>arabic[<TAB>comment]``.  The inverse map
    keeps the first symbol listed for a target, so alias rows (as in the
    XML-safe variant) do not disturb round-tripping over the canonical
    symbols.
    """

    def __init__(self, forward: dict[str, str]):
        self.forward = dict(forward)
        self.inverse: dict[str, str] = {}
        for sym, ar in self.forward.items():
            self.inverse.setdefault(ar, sym)
        self.alphabet = frozenset(self.forward)

    @classmethod
    def from_file(cls, path: str | Path) -> "BuckwalterTable":
        forward: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                continue
            forward[parts[0]] = parts[1]
        return cls(forward)

    @classmethod
    def default(cls) -> "BuckwalterTable":
        ref = resources.files("dialspeech").joinpath("data/buckwalter.tsv")
        with resources.as_file(ref) as path:
            return cls.from_file(path)


def _load_extra_punctuation(path: str | Path) -> frozenset[str]:
    extras = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        token = line.split("\t", 1)[0].strip()
        if token.upper().startswith("U+"):
            extras.add(chr(int(token[2:], 16)))
        elif len(token) == 1:
            extras.add(token)
    return frozenset(extras)


def _default_extra_punctuation() -> frozenset[str]:
    ref = resources.files("dialspeech").joinpath("data/punctuation.txt")
    with resources.as_file(ref) as path:
        return _load_extra_punctuation(path)


_UNIFY = str.maketrans(
    {
        "أ": "ا",  # hamza-above alef
        "إ": "ا",  # hamza-below alef
        "آ": "ا",  # madda alef
        "ة": "ه",  # teh marbuta -> heh
        "ى": "ي",  # alef maksura -> yeh
        _TATWEEL: None,
    }
)


class Normalizer:
    """Configurable transcript standardizer.

    ``buckwalter`` selects transliteration handling: "auto" (detect, the
    default), "always" (convert unconditionally; for sources known to be
    transliterated) or "never".  Only "auto" and "never" are idempotent.
    """

    def __init__(
        self,
        table: BuckwalterTable | None = None,
        extra_punctuation: frozenset[str] | None = None,
        detection_threshold: float = 0.80,
        buckwalter: str = "auto",
    ):
        if buckwalter not in ("auto", "always", "never"):
            raise ValueError(f"bad buckwalter mode: {buckwalter!r}")
        self.table = table or BuckwalterTable.default()
        self.extra_punctuation = (
            extra_punctuation
            if extra_punctuation is not None
            else _default_extra_punctuation()
        )
        self.detection_threshold = detection_threshold
        self.buckwalter = buckwalter
        self._punct_cache: dict[str, bool] = {}

    # -- punctuation -------------------------------------------------------

    def _is_punct(self, ch: str) -> bool:
        hit = self._punct_cache.get(ch)
        if hit is None:
            hit = ch in self.extra_punctuation or unicodedata.category(ch).startswith("P")
            self._punct_cache[ch] = hit
        return hit

    def strip_punctuation(self, text: str) -> str:
        return "".join(c for c in text if not self._is_punct(c))

    # -- Buckwalter ----------------------------------------------------------

    def detect_buckwalter(self, text: str) -> bool:
        """True when the text looks like Buckwalter transliteration.

        Requires zero Arabic-script codepoints and at least
        ``detection_threshold`` of the remaining significant characters to
        belong to the transliteration alphabet.  Whitespace, combining
        marks, punctuation and tatweel are not counted: the pipeline
        deletes them, and ignoring them here keeps detection stable across
        repeated application.
        """
        return self._detect(unicodedata.normalize("NFKD", text))

    def _detect(self, decomposed: str) -> bool:
        total = 0
        hits = 0
        for ch in decomposed:
            if ch.isspace() or ch == _TATWEEL:
                continue
            if unicodedata.category(ch) == "Mn":
                continue
            if self._is_punct(ch):
                continue
            if _in_ranges(ch, _ARABIC_RANGES):
                return False
            total += 1
            if ch in self.table.alphabet:
                hits += 1
        return total > 0 and hits / total >= self.detection_threshold

    def buckwalter_to_arabic(self, text: str, unmapped: list[str] | None = None) -> str:
        """Map transliteration symbols to Arabic; unknown symbols pass through.

        ``unmapped`` (if given) collects the passed-through non-space symbols
        so callers can tally conversion warnings.
        """
        forward = self.table.forward
        out = []
        for ch in text:
            mapped = forward.get(ch)
            if mapped is None:
                if unmapped is not None and not ch.isspace():
                    unmapped.append(ch)
                out.append(ch)
            else:
                out.append(mapped)
        return "".join(out)

    def arabic_to_buckwalter(self, text: str) -> str:
        """Inverse transliteration over the bijective portion of the table."""
        inverse = self.table.inverse
        return "".join(inverse.get(ch, ch) for ch in text)

    # -- the pipeline --------------------------------------------------------

    def normalize(self, text: str) -> str:
        t = unicodedata.normalize("NFKD", text)
        if self.buckwalter == "always" or (self.buckwalter == "auto" and self._detect(t)):
            t = self.buckwalter_to_arabic(t)
            t = unicodedata.normalize("NFKD", t)
        t = "".join(c for c in t if unicodedata.category(c) != "Mn")
        t = self.strip_punctuation(t)
        t = t.translate(_UNIFY)
        return " ".join(t.split())


@dataclass(frozen=True)
class TranscriptPair:
    """Verbatim release transcript plus its standardized form."""

    raw: str
    standardized: str

    @classmethod
    def from_raw(cls, raw: str, normalizer: "Normalizer | None" = None) -> "TranscriptPair":
        n = normalizer or _DEFAULT
        return cls(raw=raw, standardized=n.normalize(raw))


_DEFAULT = Normalizer()


def detect_buckwalter(text: str) -> bool:
    return _DEFAULT.detect_buckwalter(text)


def buckwalter_to_arabic(text: str, unmapped: list[str] | None = None) -> str:
    return _DEFAULT.buckwalter_to_arabic(text, unmapped)


def arabic_to_buckwalter(text: str) -> str:
    return _DEFAULT.arabic_to_buckwalter(text)


def normalize(text: str) -> str:
    return _DEFAULT.normalize(text)
