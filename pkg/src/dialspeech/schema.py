"""The unified utterance schema and composite dialect labels.

A dialect label is an ISO 639-3 variety code optionally narrowed by an
ISO 3166-1 alpha-3 country and a region token, rendered as
``iso``, ``iso_COUNTRY`` or ``iso_COUNTRY-SUBDIVISION`` (e.g.
``afb_ARE-AZ``).  Records whose variety cannot be resolved carry either
an explicit candidate set (Ambiguous) or no label at all (rendered
"unknown").
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path

from .errors import SubdivisionWithoutCountry, UnknownIsoCode
from .textnorm import Normalizer, normalize

SPLITS = ("train", "adapt", "dev", "test", "unassigned")

_ISO_RE = re.compile(r"^[a-z]{3}$")
_COUNTRY_RE = re.compile(r"^[A-Z]{3}$")
_SUBDIV_RE = re.compile(r"^[A-Z0-9]{1,8}$")


class DialectRegistry:
    """Accepted ISO 639-3 variety codes, loaded from a tab-separated file."""

    def __init__(self, names: dict[str, str]):
        self.names = dict(names)

    def __contains__(self, code: str) -> bool:
        return code in self.names

    def __iter__(self):
        return iter(self.names)

    @classmethod
    def from_file(cls, path: str | Path) -> "DialectRegistry":
        names: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            names[parts[0].strip()] = parts[1].strip() if len(parts) > 1 else ""
        return cls(names)

    @classmethod
    def default(cls) -> "DialectRegistry":
        ref = resources.files("dialspeech").joinpath("data/dialects.tsv")
        with resources.as_file(ref) as path:
            return cls.from_file(path)


_DEFAULT_REGISTRY: DialectRegistry | None = None


def default_registry() -> DialectRegistry:
    global _DEFAULT_REGISTRY
    if _DEFAULT_REGISTRY is None:
        _DEFAULT_REGISTRY = DialectRegistry.default()
    return _DEFAULT_REGISTRY


@dataclass(frozen=True, order=True)
class DialectCode:
    iso: str
    country: str | None = None
    subdivision: str | None = None

    def render(self) -> str:
        out = self.iso
        if self.country:
            out += f"_{self.country}"
            if self.subdivision:
                out += f"-{self.subdivision}"
        return out

    def __str__(self) -> str:
        return self.render()


@dataclass(frozen=True)
class Ambiguous:
    """A location that matches several varieties; candidates are ISO codes."""

    candidates: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(sorted(set(self.candidates))))
        if len(self.candidates) < 2:
            raise ValueError("an ambiguous label needs at least two candidates")

    def render(self) -> str:
        return "ambiguous:" + ",".join(self.candidates)


DialectLabel = "DialectCode | Ambiguous | None"


def make_dialect_code(
    iso: str,
    country: str | None = None,
    subdivision: str | None = None,
    registry: DialectRegistry | None = None,
) -> DialectCode:
    reg = registry or default_registry()
    if not _ISO_RE.match(iso) or iso not in reg:
        raise UnknownIsoCode(f"{iso!r} is not a registered Arabic variety code")
    if subdivision is not None and country is None:
        raise SubdivisionWithoutCountry(f"{iso}: subdivision {subdivision!r} without a country")
    if country is not None and not _COUNTRY_RE.match(country):
        raise ValueError(f"country {country!r} is not an ISO 3166-1 alpha-3 code")
    if subdivision is not None and not _SUBDIV_RE.match(subdivision):
        raise ValueError(f"subdivision token {subdivision!r} is not a plain region token")
    return DialectCode(iso, country, subdivision)


def render_dialect(label) -> str:
    if label is None:
        return "unknown"
    return label.render()


def parse_dialect(text: str, registry: DialectRegistry | None = None):
    """Inverse of render_dialect over labels, ambiguous sets and "unknown"."""
    text = text.strip()
    if not text or text == "unknown":
        return None
    if text.startswith("ambiguous:"):
        return Ambiguous(tuple(text[len("ambiguous:"):].split(",")))
    iso, _, rest = text.partition("_")
    country, _, subdivision = rest.partition("-")
    return make_dialect_code(iso, country or None, subdivision or None, registry)


_SCORE_RANGES = {
    "aldi": (0.0, 1.0),
    "msa_da": (0, 1),
    "pesq": (1.0, 4.5),
    "stoi": (0.0, 1.0),
    "si_sdr": None,  # decibels, unbounded
    "nmr_mos": (1.0, 5.0),
}


@dataclass(frozen=True)
class ScoreSet:
    """Per-utterance characterization scores; all optional, ranges enforced."""

    aldi: float | None = None
    msa_da: int | None = None
    pesq: float | None = None
    stoi: float | None = None
    si_sdr: float | None = None
    nmr_mos: float | None = None

    def problems(self) -> list[str]:
        out = []
        for name, bounds in _SCORE_RANGES.items():
            value = getattr(self, name)
            if value is None or bounds is None:
                continue
            lo, hi = bounds
            if name == "msa_da":
                if value not in (0, 1):
                    out.append(f"msa_da={value!r} not in {{0,1}}")
            elif not lo <= value <= hi:
                out.append(f"{name}={value!r} outside [{lo}, {hi}]")
        return out


@dataclass(frozen=True)
class RecordingMeta:
    sample_rate: int | None = None
    channels: int | None = None
    style: str | None = None


@dataclass
class UtteranceRecord:
    """One audio segment in the common corpus schema."""

    utterance_id: str
    dataset_id: str
    source_id: str
    audio_path: str
    duration: float
    raw_transcript: str
    standardized_transcript: str
    speaker_id: str | None = None
    gender: str | None = None
    age: str | None = None
    recording_meta: RecordingMeta | None = None
    domain_raw: str | None = None
    domain_theme: str | None = None
    dialect: object = None  # DialectCode | Ambiguous | None
    split: str = "unassigned"
    scores: ScoreSet | None = None

    def problems(self, normalizer: Normalizer | None = None) -> list[str]:
        """Invariant check; empty list means the record is schema-clean."""
        out = []
        if not self.utterance_id:
            out.append("empty utterance_id")
        if not self.duration > 0:
            out.append(f"duration {self.duration} not positive")
        norm = normalizer.normalize if normalizer else normalize
        if norm(self.standardized_transcript) != self.standardized_transcript:
            out.append("standardized_transcript is not a normalization fixed point")
        if self.split not in SPLITS:
            out.append(f"split {self.split!r} not one of {SPLITS}")
        if self.scores is not None:
            out.extend(self.scores.problems())
        return out


def validate_records(records, normalizer: Normalizer | None = None) -> dict[str, list[str]]:
    """Validator pass: utterance_id -> problems, plus duplicate-id checks."""
    seen: set[str] = set()
    issues: dict[str, list[str]] = {}
    for r in records:
        probs = r.problems(normalizer)
        if r.utterance_id in seen:
            probs = probs + ["duplicate utterance_id"]
        seen.add(r.utterance_id)
        if probs:
            issues[r.utterance_id] = probs
    return issues


_FIELD_NAMES = tuple(f.name for f in fields(UtteranceRecord))


def record_to_dict(record: UtteranceRecord) -> dict:
    d = {}
    for name in _FIELD_NAMES:
        value = getattr(record, name)
        if name == "dialect":
            value = render_dialect(value)
        elif name == "recording_meta":
            value = None if value is None else vars(value).copy()
        elif name == "scores":
            value = None if value is None else vars(value).copy()
        d[name] = value
    return d


def record_from_dict(d: dict, registry: DialectRegistry | None = None) -> UtteranceRecord:
    kwargs = dict(d)
    kwargs["dialect"] = parse_dialect(kwargs.get("dialect") or "unknown", registry)
    meta = kwargs.get("recording_meta")
    if meta is not None:
        kwargs["recording_meta"] = RecordingMeta(**{k: v for k, v in meta.items() if v is not None}) \
            if any(v is not None for v in meta.values()) else None
    sc = kwargs.get("scores")
    if sc is not None:
        cleaned = {k: v for k, v in sc.items() if v is not None}
        kwargs["scores"] = ScoreSet(**cleaned) if cleaned else None
    return UtteranceRecord(**kwargs)
