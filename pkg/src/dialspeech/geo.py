"""Location to variety lookup for dialect inference.

The table maps (country, city-or-subdivision) to one ISO 639-3 code or to
an explicit candidate set; countries with several major varieties stay
ambiguous unless the subdivision narrows them down.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import UnknownLocation
from .schema import Ambiguous, DialectCode, DialectRegistry, default_registry, make_dialect_code


@dataclass(frozen=True)
class _GeoRow:
    country: str                 # alpha-3
    subdivision: str | None      # canonical token, None for the country default
    aliases: frozenset[str]      # uppercased subdivision aliases incl. the token
    codes: tuple[str, ...]


class GeoLookupTable:
    def __init__(self, rows: list[_GeoRow], country_aliases: dict[str, str]):
        self._defaults: dict[str, _GeoRow] = {}
        self._subdivisions: dict[str, list[_GeoRow]] = {}
        self._country_aliases = country_aliases
        for row in rows:
            if row.subdivision is None:
                self._defaults[row.country] = row
            else:
                self._subdivisions.setdefault(row.country, []).append(row)

    @classmethod
    def from_file(cls, path: str | Path) -> "GeoLookupTable":
        rows: list[_GeoRow] = []
        country_aliases: dict[str, str] = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line or line.startswith("#"):
                continue
            alpha3, names, subdiv, codes = (line.split("\t") + ["", "", "", ""])[:4]
            alpha3 = alpha3.strip().upper()
            country_aliases[alpha3] = alpha3
            for name in names.split("|"):
                name = name.strip().upper()
                if name:
                    country_aliases[name] = alpha3
            code_list = tuple(c.strip() for c in codes.split(",") if c.strip())
            if not code_list:
                continue
            subdiv = subdiv.strip()
            if subdiv == "*" or not subdiv:
                rows.append(_GeoRow(alpha3, None, frozenset(), code_list))
            else:
                aliases = [a.strip().upper() for a in subdiv.split("|") if a.strip()]
                rows.append(_GeoRow(alpha3, aliases[0], frozenset(aliases), code_list))
        return cls(rows, country_aliases)

    @classmethod
    def default(cls) -> "GeoLookupTable":
        ref = resources.files("dialspeech").joinpath("data/geo.tsv")
        with resources.as_file(ref) as path:
            return cls.from_file(path)

    def resolve_country(self, country: str) -> str | None:
        return self._country_aliases.get(country.strip().upper())

    def lookup(self, country: str, city: str | None = None) -> tuple[tuple[str, ...], str | None]:
        """Returns (candidate codes, canonical subdivision token or None)."""
        alpha3 = self.resolve_country(country)
        if alpha3 is None:
            raise UnknownLocation(f"country {country!r} absent from the geo table")
        if city:
            token = city.strip().upper()
            for row in self._subdivisions.get(alpha3, ()):
                if token in row.aliases:
                    return row.codes, row.subdivision
        default = self._defaults.get(alpha3)
        if default is None:
            raise UnknownLocation(f"country {country!r} has no default entry in the geo table")
        return default.codes, None


def infer_dialect(
    country: str,
    city: str | None = None,
    geo_table: GeoLookupTable | None = None,
    registry: DialectRegistry | None = None,
):
    """DialectCode when the location pins one variety, Ambiguous otherwise."""
    table = geo_table or _default_table()
    reg = registry or default_registry()
    codes, subdivision = table.lookup(country, city)
    if len(codes) == 1:
        return make_dialect_code(codes[0], table.resolve_country(country), subdivision, reg)
    return Ambiguous(codes)


_TABLE: GeoLookupTable | None = None


def _default_table() -> GeoLookupTable:
    global _TABLE
    if _TABLE is None:
        _TABLE = GeoLookupTable.default()
    return _TABLE
