"""Domain label harmonization: raw release strings to broad themes."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .errors import UnmappedDomain


class DomainThemeTable:
    """raw label -> theme mapping; lookup is case-insensitive and trimmed."""

    def __init__(self, mapping: dict[str, str]):
        self._mapping = {k.strip().casefold(): v for k, v in mapping.items()}
        self.themes = tuple(sorted(set(self._mapping.values())))

    def __len__(self) -> int:
        return len(self._mapping)

    @classmethod
    def from_file(cls, path: str | Path) -> "DomainThemeTable":
        mapping: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            raw, _, theme = line.partition("\t")
            if raw and theme:
                mapping[raw] = theme.strip()
        return cls(mapping)

    @classmethod
    def default(cls) -> "DomainThemeTable":
        ref = resources.files("dialspeech").joinpath("data/themes.tsv")
        with resources.as_file(ref) as path:
            return cls.from_file(path)

    def normalize(self, raw_label: str) -> str:
        theme = self._mapping.get(raw_label.strip().casefold())
        if theme is None:
            raise UnmappedDomain(f"domain label {raw_label!r} absent from the theme table")
        return theme


def normalize_domain(raw_label: str, theme_table: DomainThemeTable | None = None) -> str:
    table = theme_table or _default_table()
    return table.normalize(raw_label)


_TABLE: DomainThemeTable | None = None


def _default_table() -> DomainThemeTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = DomainThemeTable.default()
    return _TABLE
