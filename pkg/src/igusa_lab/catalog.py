"""Built-in test polynomials and the ``name | n | poly-text`` catalog file format."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .poly import Polynomial, parse_polynomial


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    n: int
    text: str
    max_prime: int | None = None  # keep brute-force sums at desk scale

    @property
    def poly(self) -> Polynomial:
        return parse_polynomial(self.text, self.n)


BUILTIN = (
    CatalogEntry("square", 1, "x1^2"),
    CatalogEntry("cusp", 2, "x1^2 + x2^3"),
    CatalogEntry("fermat-cubic", 2, "x1^3 + x2^3"),
    CatalogEntry("quadric", 2, "x1^2 + x2^2"),
    CatalogEntry("e8", 3, "x1^2 + x2^3 + x3^5", max_prime=13),
)


class CatalogError(ValueError):
    pass


def parse_catalog(text: str) -> list[CatalogEntry]:
    """One entry per line; blank lines and ``#`` comments are skipped."""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [s.strip() for s in line.split("|")]
        if len(parts) != 3:
            raise CatalogError(f"line {lineno}: expected 'name | n | poly-text'")
        name, n_text, poly_text = parts
        try:
            n = int(n_text)
        except ValueError:
            raise CatalogError(f"line {lineno}: variable count {n_text!r} is not an integer") from None
        parse_polynomial(poly_text, n)  # validate eagerly
        entries.append(CatalogEntry(name, n, poly_text))
    return entries


def load_catalog(source: str | None) -> list[CatalogEntry]:
    if source in (None, "", "builtin"):
        return list(BUILTIN)
    return parse_catalog(Path(source).read_text())
