"""Sparse multivariate integer polynomials.

A :class:`Polynomial` is an immutable map from dense exponent tuples to
nonzero Python integers.  Variables are named ``x1 .. xn`` in text form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .lp import RationalLP, lp_solve

__all__ = [
    "Polynomial",
    "ParseError",
    "QuasiWeights",
    "parse_polynomial",
    "support",
    "partial_derivatives",
    "quasi_weights",
    "substitute_torus",
    "restrict_to_face",
    "evaluate_mod",
    "normalize_constant",
]

Exponent = tuple[int, ...]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class Polynomial:
    """Exact sparse polynomial in ``n`` variables with integer coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Sequence[int], int] | None = None):
        if n < 0:
            raise ValueError("variable count must be nonnegative")
        clean: dict[Exponent, int] = {}
        for exp, coeff in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != n:
                raise ValueError(f"exponent {exp} does not have length {n}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            c = clean.get(exp, 0) + int(coeff)
            if c:
                clean[exp] = c
            else:
                clean.pop(exp, None)
        self.n = n
        self._terms = clean
        self._hash = None

    @classmethod
    def parse(cls, text: str, n: int) -> "Polynomial":
        return parse_polynomial(text, n)

    @classmethod
    def monomial(cls, exp: Sequence[int], coeff: int = 1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): coeff})

    @classmethod
    def constant(cls, n: int, c: int) -> "Polynomial":
        return cls(n, {(0,) * n: c})

    @property
    def terms(self) -> Mapping[Exponent, int]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def support(self) -> frozenset[Exponent]:
        return frozenset(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, exp: Sequence[int]) -> int:
        return self._terms.get(tuple(exp), 0)

    def constant_term(self) -> int:
        return self._terms.get((0,) * self.n, 0)

    def total_degrees(self) -> set[int]:
        return {sum(e) for e in self._terms}

    def is_homogeneous(self) -> bool:
        return len(self.total_degrees()) <= 1

    def degree_in(self, j: int) -> int:
        return max((e[j] for e in self._terms), default=0)

    def variables(self) -> list[int]:
        """0-based indices of variables occurring in some term."""
        return [j for j in range(self.n) if any(e[j] for e in self._terms)]

    # arithmetic ------------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if other.n != self.n:
            raise ValueError("polynomials live in different variable counts")

    def __add__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.n, other)
        self._check(other)
        terms = dict(self._terms)
        for e, c in other._terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        if isinstance(other, int):
            other = Polynomial.constant(self.n, other)
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return Polynomial(self.n, {e: c * other for e, c in self._terms.items()})
        self._check(other)
        terms: dict[Exponent, int] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.n, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Polynomial.constant(self.n, 1)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    # calculus and evaluation ----------------------------------------------

    def partial(self, j: int) -> "Polynomial":
        """Partial derivative in the 0-based variable ``j``."""
        terms = {}
        for e, c in self._terms.items():
            if e[j]:
                d = list(e)
                d[j] -= 1
                terms[tuple(d)] = c * e[j]
        return Polynomial(self.n, terms)

    def __call__(self, x: Sequence[int]) -> int:
        total = 0
        for e, c in self._terms.items():
            v = c
            for xi, ei in zip(x, e):
                if ei:
                    v *= xi**ei
            total += v
        return total

    def mod(self, M: int) -> "Polynomial":
        return Polynomial(self.n, {e: c % M for e, c in self._terms.items()})

    def restrict(self, points: Iterable[Sequence[int]]) -> "Polynomial":
        keep = {tuple(p) for p in points}
        return Polynomial(self.n, {e: c for e, c in self._terms.items() if e in keep})

    def extend(self, extra: int = 1) -> "Polynomial":
        """The same polynomial viewed in ``n + extra`` variables."""
        return Polynomial(self.n + extra, {e + (0,) * extra: c for e, c in self._terms.items()})

    # text ------------------------------------------------------------------

    def sorted_terms(self) -> list[tuple[Exponent, int]]:
        return sorted(self._terms.items(), reverse=True)

    def __str__(self):
        if not self._terms:
            return "0"
        out = []
        for i, (e, c) in enumerate(self.sorted_terms()):
            factors = []
            for j, k in enumerate(e):
                if k == 1:
                    factors.append(f"x{j + 1}")
                elif k > 1:
                    factors.append(f"x{j + 1}^{k}")
            mag = abs(c)
            if not factors:
                body = str(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = "*".join([str(mag)] + factors)
            if i == 0:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self):
        return f"Polynomial({self.n}, {str(self)!r})"


_TOKEN = re.compile(r"\s*(?:(\d+)|x(\d+)|(\*\*|[*^+\-]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos
            while j < len(text) and text[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {text[j]!r}", j)
        start = m.end() - len(m.group(0).lstrip())
        if m.group(1) is not None:
            tokens.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            tokens.append(("var", int(m.group(2)), start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


def parse_polynomial(text: str, n: int) -> Polynomial:
    """Parse ``text`` such as ``"3*x1^2*x2 - x3^4"`` into a polynomial in ``n`` variables."""
    if n < 1:
        raise ValueError("n must be positive")
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take():
        nonlocal pos
        tok = tokens[pos]
        pos += 1
        return tok

    def exponent_suffix() -> int:
        if peek()[:2] == ("op", "^"):
            take()
            kind, val, at = take()
            if kind != "int":
                raise ParseError("expected integer exponent", at)
            if val < 1:
                raise ParseError("exponent must be positive", at)
            return val
        return 1

    def factor() -> tuple[int, list[int]]:
        kind, val, at = take()
        exp = [0] * n
        if kind == "int":
            return val ** exponent_suffix(), exp
        if kind == "var":
            if val < 1 or val > n:
                raise ParseError(f"variable x{val} outside x1..x{n}", at)
            exp[val - 1] = exponent_suffix()
            return 1, exp
        raise ParseError("expected a number or a variable", at)

    def term() -> tuple[int, list[int]]:
        coeff, exp = factor()
        while peek()[:2] == ("op", "*"):
            take()
            c, e = factor()
            coeff *= c
            exp = [a + b for a, b in zip(exp, e)]
        return coeff, exp

    terms: dict[Exponent, int] = {}
    sign = 1
    if peek()[0] == "op" and peek()[1] in "+-":
        sign = -1 if take()[1] == "-" else 1
    while True:
        c, e = term()
        key = tuple(e)
        terms[key] = terms.get(key, 0) + sign * c
        kind, val, at = peek()
        if kind == "end":
            break
        if kind == "op" and val in "+-":
            take()
            sign = -1 if val == "-" else 1
            continue
        raise ParseError("expected '+', '-' or end of input", at)
    return Polynomial(n, terms)


def support(f: Polynomial) -> frozenset[Exponent]:
    return f.support()


def partial_derivatives(f: Polynomial) -> list[Polynomial]:
    return [f.partial(j) for j in range(f.n)]


def evaluate_mod(f: Polynomial, x: Sequence[int], M: int) -> int:
    """``f(x) mod M`` with every intermediate product reduced mod ``M``."""
    if M < 2:
        raise ValueError("modulus must be at least 2")
    x = [xi % M for xi in x]
    total = 0
    for e, c in f.items():
        v = c % M
        for xi, ei in zip(x, e):
            if ei:
                v = v * pow(xi, ei, M) % M
        total = (total + v) % M
    return total


def substitute_torus(f: Polynomial, i: int) -> Polynomial:
    """Replace ``x_i`` by ``x_i * y`` with ``y`` appended as variable ``n + 1``.

    ``i`` is 1-based, matching the ``x1..xn`` naming.
    """
    if not 1 <= i <= f.n:
        raise IndexError(f"variable index {i} outside 1..{f.n}")
    return Polynomial(f.n + 1, {e + (e[i - 1],): c for e, c in f.items()})


def restrict_to_face(f: Polynomial, face) -> Polynomial:
    """Keep the terms of ``f`` whose exponents lie on ``face``.

    ``face`` is either a Face (anything with ``support_points``) or an
    iterable of lattice points.
    """
    points = getattr(face, "support_points", face)
    return f.restrict(points)


def normalize_constant(f: Polynomial) -> tuple[Polynomial, str | None]:
    """Return ``f - f(0)`` and a note when the constant term was nonzero."""
    c = f.constant_term()
    if not c:
        return f, None
    return f - c, f"subtracted constant term {c} so that f(0) = 0"


@dataclass(frozen=True)
class QuasiWeights:
    weights: tuple[int, ...]
    degree: int

    def weighted_degree(self, exp: Sequence[int]) -> int:
        return sum(a * e for a, e in zip(self.weights, exp))


def quasi_weights(f: Polynomial) -> QuasiWeights | None:
    """Primitive positive integer weights making ``f`` weighted homogeneous.

    Returns ``None`` when ``f`` is not quasi-homogeneous.  The weights are the
    vertex picked by minimizing the weighted degree over ``a_j >= 1``; absent
    variables get weight 1 before the final primitive rescaling.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has no quasi-homogeneous weights")
    return common_quasi_weights([f])


def common_quasi_weights(polys: Sequence[Polynomial]) -> QuasiWeights | None:
    """Shared weights for several polynomials (one degree per polynomial).

    The returned ``degree`` is the weighted degree of the first nonzero
    polynomial.
    """
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        raise ValueError("no nonzero polynomial given")
    n = polys[0].n
    active = sorted({j for p in polys for j in p.variables()})
    if any(p.constant_term() for p in polys):
        return None
    col = {j: i for i, j in enumerate(active)}
    nd = len(polys)
    nv = len(active) + nd  # weights, then one degree per polynomial
    objective = [Fraction(0)] * len(active) + [Fraction(1)] * nd
    lp = RationalLP(objective)
    for j in active:
        row = [0] * nv
        row[col[j]] = 1
        lp.add_row(row, ">=", 1)
    for k, p in enumerate(polys):
        for e in p.support():
            row = [0] * nv
            for j in active:
                row[col[j]] = e[j]
            row[len(active) + k] = -1
            lp.add_row(row, "==", 0)
    res = lp_solve(lp)
    if not res.optimal:
        return None
    weights = [Fraction(1)] * n
    for j in active:
        weights[j] = res.x[col[j]]
    degree = res.x[len(active)]
    if any(w <= 0 for w in weights) or degree <= 0:
        return None
    scale = lcm(*(w.denominator for w in weights), degree.denominator)
    ints = [int(w * scale) for w in weights]
    d = int(degree * scale)
    g = gcd(*ints, d)
    return QuasiWeights(tuple(w // g for w in ints), d // g)
