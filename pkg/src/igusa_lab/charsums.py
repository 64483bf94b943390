"""Exponential sums through exact value histograms.

Every sum is computed in two stages: an exact integer histogram of the
polynomial's values over the summation domain, then one floating-point pass
``sum_a c_a exp(2 pi i a / M)`` whose rounding error is bounded explicitly.
Polynomials that split into variable-disjoint blocks are summed block by
block; the sum over the product domain is the product of the block sums, so
each block keeps its own histogram (``ExpSumValue.factors``).

Kinds of sum (``p`` prime, twist ``u`` a unit):

* ``S``: ``p^(-mn) sum_{x in (Z/p^m)^n} e(u f(x) / p^m)``
* ``T``: the same over coordinates divisible by ``p``, same normalization
* ``E``: ``(p-1)^(-n) sum_{x in (F_p^x)^n} e(u h(x) / p)``
* ``Eq`` / ``Aq``: torus / affine sums over ``F_q`` with ``psi_p o Tr``
* ``S_laurent``: sums over ``(F_p[t]/t^m)^n`` of ``psi_p`` of the ``t^(m-1)``
  coefficient of ``u f(x)``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Sequence

import numpy as np

from .fields import finite_field, log_tables
from .kernels import (
    DEFAULT_CHUNK,
    SAFE_MODULUS,
    block_polynomial,
    check_budget,
    value_histogram,
    variable_blocks,
)
from .newton import is_prime
from .poly import Polynomial

__all__ = [
    "ValueHistogram",
    "ExpSumValue",
    "S_sum",
    "T_sum",
    "E_sum",
    "E_sum_ext",
    "affine_sum_ext",
    "S_sum_laurent",
    "unit_box_sum",
    "magnitude",
]

EPS = 2.0**-52
DENSE_ZERO_TEST_LIMIT = 1 << 24


@dataclass(frozen=True, eq=False)
class ValueHistogram:
    """Exact counts of residues ``a mod modulus``; ``modulus = prime**k``.

    Residues are distinct but not kept in any particular order.
    """

    modulus: int
    residues: np.ndarray
    counts: np.ndarray
    prime: int

    @classmethod
    def point_mass(cls, modulus: int, prime: int, count: int, at: int = 0) -> "ValueHistogram":
        return cls(modulus, np.array([at % modulus], dtype=np.int64), np.array([count], dtype=np.int64), prime)

    @property
    def total(self) -> int:
        if self.counts.dtype == object:
            return int(sum(int(c) for c in self.counts))
        return int(self.counts.sum())

    @property
    def buckets(self) -> int:
        return len(self.residues)

    def as_dict(self) -> dict[int, int]:
        return {int(a): int(c) for a, c in zip(self.residues, self.counts)}

    def dense(self) -> np.ndarray:
        out = np.zeros(self.modulus, dtype=self.counts.dtype)
        out[np.asarray(self.residues, dtype=np.int64)] = self.counts
        return out

    def _moved(self, residues) -> "ValueHistogram":
        return ValueHistogram(self.modulus, np.asarray(residues), self.counts, self.prime)

    def twisted(self, u: int) -> "ValueHistogram":
        """Histogram of ``u * value``; a permutation of buckets for a unit ``u``."""
        if math.gcd(u, self.prime) != 1:
            raise ValueError(f"twist {u} is not a unit mod {self.prime}")
        if self.modulus == 1:
            return self
        return self._moved(self._as_ints() * (u % self.modulus) % self.modulus)

    def shifted(self, c: int) -> "ValueHistogram":
        if c % self.modulus == 0:
            return self
        return self._moved((self._as_ints() + c % self.modulus) % self.modulus)

    def _as_ints(self) -> np.ndarray:
        dtype = np.int64 if self.modulus <= SAFE_MODULUS else object
        return np.asarray(self.residues).astype(dtype, copy=False)

    def scaled(self, factor: int) -> "ValueHistogram":
        return ValueHistogram(self.modulus, self.residues, self.counts * factor, self.prime)

    def __eq__(self, other):
        if not isinstance(other, ValueHistogram):
            return NotImplemented
        return (self.modulus == other.modulus and self.as_dict() == other.as_dict())

    def __hash__(self):
        return hash((self.modulus, tuple(sorted(self.as_dict().items()))))

    def convolve(self, other: "ValueHistogram") -> "ValueHistogram":
        """Exact histogram of ``a + b`` for independent ``a``, ``b``."""
        if self.modulus != other.modulus:
            raise ValueError("moduli differ")
        M = self.modulus
        big = self.total * other.total >= 2**62
        dtype = object if big else np.int64
        out = np.zeros(M, dtype=dtype)
        dense_other = other.dense().astype(dtype)
        for a, c in zip(self.residues.tolist(), self.counts.tolist()):
            out += c * np.roll(dense_other, a)
        nz = np.flatnonzero(out != 0)
        return ValueHistogram(M, nz.astype(np.int64), out[nz], self.prime)

    def is_zero_sum(self) -> bool:
        """Exact test of ``sum_a c_a zeta_M^a == 0`` for ``M = prime**k``.

        Over ``Q(zeta_{p^k})`` the powers ``zeta^r``, ``0 <= r < p^(k-1)``, are a
        basis over ``Q(zeta_p)``, and ``sum_j c_j zeta_p^j = 0`` iff all ``c_j``
        agree.  So the sum vanishes iff the counts are constant along every
        class ``r + j p^(k-1)``.
        """
        M, p = self.modulus, self.prime
        if M == 1:
            return self.total == 0
        step = M // p
        if M <= DENSE_ZERO_TEST_LIMIT:
            grid = self.dense().reshape(p, step)
            return bool((grid == grid[0]).all())
        if self.buckets % p:
            return False  # every occupied class must hold exactly p residues
        r = self._as_ints()
        if not len(r):
            return True
        order = np.argsort(r % step, kind="stable")
        cls = (r % step)[order]
        cnt = self.counts[order]
        starts = np.concatenate([[0], np.flatnonzero(np.diff(cls)) + 1])
        sizes = np.diff(np.concatenate([starts, [len(cls)]]))
        if (sizes != p).any():
            return False
        return bool((np.minimum.reduceat(cnt, starts) == np.maximum.reduceat(cnt, starts)).all())

    def raw_sum(self) -> tuple[complex, float]:
        """``sum_a c_a exp(2 pi i a / M)`` in floating point and an error bound."""
        M = self.modulus
        if M == 1:
            return complex(self.total), 0.0
        re = im = 0.0
        block = 1 << 20
        for lo in range(0, self.buckets, block):
            r = np.asarray(self.residues[lo:lo + block])
            centred = np.where(r > M // 2, r - M, r)
            theta = (centred.astype(np.float64) / M) * (2 * math.pi)
            c = self.counts[lo:lo + block].astype(np.float64)
            re += float(np.sum(c * np.cos(theta)))
            im += float(np.sum(c * np.sin(theta)))
        # per-term trig + argument error <= 21 eps * c_a; summation <= B eps sum
        err = (30 + 2 * self.buckets) * EPS * self.total
        return complex(re, im), err


@dataclass(frozen=True)
class ExpSumValue:
    kind: str
    factors: tuple[ValueHistogram, ...]
    normalization: Fraction
    complex_value: complex
    abs_error: float
    exact_zero: bool
    params: dict = field(default_factory=dict)

    @property
    def total(self) -> int:
        return reduce(lambda a, b: a * b, (h.total for h in self.factors), 1)

    @property
    def histogram(self) -> ValueHistogram:
        """The merged histogram over the full domain (convolution of the factors)."""
        return reduce(lambda a, b: a.convolve(b), self.factors)

    @property
    def modulus(self) -> int:
        return self.factors[0].modulus

    def magnitude(self) -> tuple[float, float]:
        return magnitude(self)

    def twisted(self, u: int) -> "ExpSumValue":
        params = dict(self.params, u=(self.params.get("u", 1) * u) % self.modulus)
        return _assemble(self.kind, tuple(h.twisted(u) for h in self.factors), self.normalization, params)


def _assemble(kind: str, factors: Sequence[ValueHistogram], normalization: Fraction,
              params: dict) -> ExpSumValue:
    factors = tuple(factors)
    totals = [h.total for h in factors]
    rho = normalization * reduce(lambda a, b: a * b, totals, 1)
    if any(h.is_zero_sum() for h in factors):
        return ExpSumValue(kind, factors, normalization, 0j, 0.0, True, params)
    value = complex(1.0)
    bound_hat = 1.0  # product of (|w_b| + err_b)
    bound_abs = 1.0  # product of |w_b|
    for h, t in zip(factors, totals):
        z, e = h.raw_sum()
        w = z / t
        ew = e / t + 2 * EPS * abs(w)
        value *= w
        bound_hat *= abs(w) + ew
        bound_abs *= abs(w)
    nb = len(factors)
    rho_f = float(rho)
    err = (bound_hat - bound_abs) + (4 * nb + 2) * EPS * bound_hat
    err = rho_f * err * (1 + 4 * EPS) + 2 * EPS * rho_f * abs(value)
    return ExpSumValue(kind, factors, normalization, rho_f * value, err, False, params)


def magnitude(v: ExpSumValue) -> tuple[float, float]:
    if v.exact_zero:
        return 0.0, 0.0
    if v.abs_error == 0.0 and v.complex_value == 1:
        return 1.0, 0.0
    a = abs(v.complex_value)
    return a, v.abs_error + 2 * EPS * a


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


def _check_unit(u: int, p: int) -> None:
    if math.gcd(u, p) != 1:
        raise ValueError(f"twist {u} is not coprime to {p}")


def _block_plan(poly: Polynomial, separate: bool):
    if not separate:
        return [list(range(poly.n))], []
    blocks = variable_blocks(poly)
    used = set(poly.variables())
    live = [b for b in blocks if set(b) <= used]
    absent = [j for b in blocks for j in b if j not in used]
    return live, absent


CACHE_POINT_LIMIT = 1 << 20  # larger histograms are recomputed rather than kept alive


def _base_factors(poly: Polynomial, domain_key: tuple, modulus: int, prime: int, separate: bool,
                  budget: int | None, chunk_size: int) -> tuple[ValueHistogram, ...]:
    kind, p, a = domain_key
    size = {"full": p**a, "maximal": p ** (a - 1), "units": p**a - p ** (a - 1)}[kind]
    if size ** len(poly.variables()) <= CACHE_POINT_LIMIT:
        return _base_factors_cached(poly, domain_key, modulus, prime, separate, budget, chunk_size)
    return _base_factors_large(poly, domain_key, modulus, prime, separate, budget, chunk_size)


@lru_cache(maxsize=4096)
def _base_factors_cached(*args) -> tuple[ValueHistogram, ...]:
    return _compute_base_factors(*args)


@lru_cache(maxsize=1)  # enough for a sweep over twists
def _base_factors_large(*args) -> tuple[ValueHistogram, ...]:
    return _compute_base_factors(*args)


def _compute_base_factors(poly: Polynomial, domain_key: tuple, modulus: int, prime: int, separate: bool,
                          budget: int | None, chunk_size: int) -> tuple[ValueHistogram, ...]:
    domain = _domain_values(domain_key)
    poly = poly.mod(modulus)
    nonconst = poly - poly.constant_term()
    live, absent = _block_plan(nonconst, separate)
    L = len(domain)
    check_budget(sum(L ** len(b) for b in live), budget)
    factors = []
    for b in live:
        bp = block_polynomial(nonconst, b, with_constant=False)
        res, cnt = value_histogram(bp, [domain] * len(b), modulus, chunk_size)
        factors.append(ValueHistogram(modulus, res, cnt, prime))
    if absent or not factors:
        factors.append(ValueHistogram.point_mass(modulus, prime, L ** len(absent)))
    c = poly.constant_term()
    if c:
        factors[0] = factors[0].shifted(c)
    return tuple(factors)


def _domain_values(key: tuple) -> np.ndarray:
    kind, p, a = key
    if p**a <= CACHE_POINT_LIMIT:
        return _domain_values_cached(key)
    return _build_domain(key)


@lru_cache(maxsize=256)
def _domain_values_cached(key: tuple) -> np.ndarray:
    return _build_domain(key)


def _build_domain(key: tuple) -> np.ndarray:
    kind, p, a = key
    if kind == "full":
        return np.arange(p**a, dtype=np.int64)
    if kind == "maximal":
        return p * np.arange(p ** (a - 1), dtype=np.int64)
    if kind == "units":
        d = np.arange(p**a, dtype=np.int64)
        return d[d % p != 0]
    raise ValueError(kind)


def _box_sum(kind, poly, domain_key, modulus, prime, normalization, u, separate, budget,
             chunk_size, params) -> ExpSumValue:
    base = _base_factors(poly, domain_key, modulus, prime, separate, budget, chunk_size)
    factors = tuple(h.twisted(u) for h in base) if u % modulus != 1 else base
    return _assemble(kind, factors, normalization, params)


def _unit_value(kind: str, params: dict) -> ExpSumValue:
    h = ValueHistogram.point_mass(1, params.get("p", 1), 1)
    return ExpSumValue(kind, (h,), Fraction(1), 1 + 0j, 0.0, False, params)


def S_sum(f: Polynomial, p: int, m: int, u: int = 1, *, separate: bool = True,
          budget: int | None = None, chunk_size: int = DEFAULT_CHUNK) -> ExpSumValue:
    """Normalized complete sum of ``e(u f(x) / p^m)`` over ``(Z/p^m)^n``."""
    _check_prime(p)
    _check_unit(u, p)
    params = {"p": p, "m": m, "u": u, "n": f.n}
    if m == 0:
        return _unit_value("S", params)
    M = p**m
    return _box_sum("S", f, ("full", p, m), M, p, Fraction(1, M**f.n), u, separate, budget,
                    chunk_size, params)


def T_sum(g: Polynomial, p: int, m: int, u: int = 1, *, separate: bool = True,
          budget: int | None = None, chunk_size: int = DEFAULT_CHUNK) -> ExpSumValue:
    """Sum over ``x = p j``, ``j in (Z/p^(m-1))^n``, normalized by ``p^(-mn)``."""
    _check_prime(p)
    _check_unit(u, p)
    params = {"p": p, "m": m, "u": u, "n": g.n}
    if m == 0:
        return _unit_value("T", params)
    M = p**m
    return _box_sum("T", g, ("maximal", p, m), M, p, Fraction(1, M**g.n), u, separate, budget,
                    chunk_size, params)


def unit_box_sum(F: Polynomial, p: int, level: int, u: int = 1, *, separate: bool = True,
                 budget: int | None = None) -> ExpSumValue:
    """``p^(-n level) sum`` of ``e(u F(w) / p^level)`` over units ``w`` mod ``p^level``.

    This is the integral of ``e(u F / p^level)`` over ``(Z_p^x)^n``.
    """
    _check_prime(p)
    params = {"p": p, "level": level, "u": u, "n": F.n}
    M = p**level
    return _box_sum("U", F, ("units", p, level), M, p, Fraction(1, M**F.n), u, separate, budget,
                    DEFAULT_CHUNK, params)


def E_sum(h: Polynomial, p: int, u: int = 1, *, separate: bool = True,
          budget: int | None = None, chunk_size: int = DEFAULT_CHUNK) -> ExpSumValue:
    """Torus sum ``(p-1)^(-n) sum_{x in (F_p^x)^n} e(u h(x) / p)``."""
    _check_prime(p)
    _check_unit(u, p)
    params = {"p": p, "q": p, "u": u, "n": h.n}
    return _box_sum("E", h, ("units", p, 1), p, p, Fraction(1, (p - 1) ** h.n), u, separate,
                    budget, chunk_size, params)


def _ext_histogram(poly: Polynomial, q: int, irred, affine: bool, chunk_size: int):
    F = finite_field(q, irred)
    p = F.p
    _, traces = log_tables(F)
    order = q - 1
    n = poly.n
    size = q if affine else order  # index order means the zero element when affine
    terms = [(e, c % p) for e, c in poly.items() if c % p]
    counts = np.zeros(p, dtype=np.int64)
    total = size**n
    strides = [size ** (n - 1 - j) for j in range(n)]
    for start in range(0, total, chunk_size):
        flat = np.arange(start, min(total, start + chunk_size), dtype=np.int64)
        idx = [(flat // strides[j]) % size for j in range(n)]
        acc = np.zeros(len(flat), dtype=np.int64)
        for e, c in terms:
            s = np.zeros(len(flat), dtype=np.int64)
            alive = np.ones(len(flat), dtype=bool)
            for j, ej in enumerate(e):
                if ej:
                    s += ej * idx[j]
                    if affine:
                        alive &= idx[j] != order
            contrib = c * traces[s % order] % p
            acc = (acc + np.where(alive, contrib, 0)) % p
        counts += np.bincount(acc, minlength=p)
    res = np.flatnonzero(counts)
    return F, res.astype(np.int64), counts[res]


@lru_cache(maxsize=1024)
def _ext_factors(poly: Polynomial, q: int, irred, affine: bool, separate: bool,
                 budget: int | None, chunk_size: int):
    F = finite_field(q, irred)
    poly = poly.mod(F.p)
    nonconst = poly - poly.constant_term()
    live, absent = _block_plan(nonconst, separate)
    size = q if affine else q - 1
    check_budget(sum(size ** len(b) for b in live), budget)
    factors = []
    for b in live:
        bp = block_polynomial(nonconst, b, with_constant=False)
        _, res, cnt = _ext_histogram(bp, q, irred, affine, chunk_size)
        factors.append(ValueHistogram(F.p, res, cnt, F.p))
    if absent or not factors:
        factors.append(ValueHistogram.point_mass(F.p, F.p, size ** len(absent)))
    c = poly.constant_term()
    if c:
        # Tr(c) = k c for c in F_p
        factors[0] = factors[0].shifted(c * F.k)
    return F, tuple(factors)


def E_sum_ext(h: Polynomial, q: int, irred: Sequence[int] | None = None, u: int = 1, *,
              separate: bool = True, budget: int | None = None,
              chunk_size: int = DEFAULT_CHUNK) -> ExpSumValue:
    """Torus sum over ``(F_q^x)^n`` with character ``psi_p(u Tr(.))``."""
    irred = tuple(irred) if irred is not None else None
    F, base = _ext_factors(h, q, irred, False, separate, budget, chunk_size)
    _check_unit(u, F.p)
    factors = tuple(f.twisted(u) for f in base)
    return _assemble("Eq", factors, Fraction(1, (q - 1) ** h.n),
                     {"p": F.p, "q": q, "u": u, "n": h.n, "irred": list(F.irred)})


def affine_sum_ext(h: Polynomial, q: int, irred: Sequence[int] | None = None, u: int = 1, *,
                   separate: bool = True, budget: int | None = None,
                   chunk_size: int = DEFAULT_CHUNK) -> ExpSumValue:
    """Affine sum ``q^(-n) sum_{x in F_q^n} psi_p(u Tr h(x))``."""
    irred = tuple(irred) if irred is not None else None
    F, base = _ext_factors(h, q, irred, True, separate, budget, chunk_size)
    _check_unit(u, F.p)
    factors = tuple(f.twisted(u) for f in base)
    return _assemble("Aq", factors, Fraction(1, q**h.n),
                     {"p": F.p, "q": q, "u": u, "n": h.n, "irred": list(F.irred)})


def _trunc_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    m = a.shape[0]
    out = np.zeros_like(a)
    for d in range(m):
        acc = np.zeros(a.shape[1], dtype=np.int64)
        for i in range(d + 1):
            acc += a[i] * b[d - i]
        out[d] = acc % p
    return out


def _laurent_histogram(poly: Polynomial, p: int, m: int, chunk_size: int):
    n = poly.n
    L = p**m
    elems = np.arange(L, dtype=np.int64)
    digits = np.stack([(elems // p**i) % p for i in range(m)])  # (m, L)
    tables = []
    for j in range(n):
        deg = poly.degree_in(j)
        one = np.zeros_like(digits)
        one[0] = 1
        rows = [one]
        for _ in range(deg):
            rows.append(_trunc_mul(rows[-1], digits, p))
        tables.append(rows)
    counts = np.zeros(p, dtype=np.int64)
    total = L**n
    strides = [L ** (n - 1 - j) for j in range(n)]
    terms = [(e, c % p) for e, c in poly.items() if c % p]
    for start in range(0, total, chunk_size):
        flat = np.arange(start, min(total, start + chunk_size), dtype=np.int64)
        idx = [(flat // strides[j]) % L for j in range(n)]
        top = np.zeros(len(flat), dtype=np.int64)
        for e, c in terms:
            v = np.zeros((m, len(flat)), dtype=np.int64)
            v[0] = c
            for j, ej in enumerate(e):
                if ej:
                    v = _trunc_mul(v, tables[j][ej][:, idx[j]], p)
            top = (top + v[m - 1]) % p
        counts += np.bincount(top, minlength=p)
    res = np.flatnonzero(counts)
    return res.astype(np.int64), counts[res]


@lru_cache(maxsize=512)
def _laurent_factors(poly: Polynomial, p: int, m: int, separate: bool, budget, chunk_size):
    poly = poly.mod(p)
    nonconst = poly - poly.constant_term()
    live, absent = _block_plan(nonconst, separate)
    L = p**m
    check_budget(sum(L ** len(b) for b in live), budget)
    factors = []
    for b in live:
        bp = block_polynomial(nonconst, b, with_constant=False)
        res, cnt = _laurent_histogram(bp, p, m, chunk_size)
        factors.append(ValueHistogram(p, res, cnt, p))
    if absent or not factors:
        factors.append(ValueHistogram.point_mass(p, p, L ** len(absent)))
    c = poly.constant_term()
    if c and m == 1:
        factors[0] = factors[0].shifted(c)
    return tuple(factors)


def S_sum_laurent(f: Polynomial, p: int, m: int, u: int = 1, *, separate: bool = True,
                  budget: int | None = None, chunk_size: int = DEFAULT_CHUNK) -> ExpSumValue:
    """Equal-characteristic analogue over ``F_p((t))`` with ``y = u t^(-m)``."""
    _check_prime(p)
    _check_unit(u, p)
    params = {"p": p, "m": m, "u": u, "n": f.n}
    if m == 0:
        return _unit_value("S_laurent", params)
    base = _laurent_factors(f, p, m, separate, budget, chunk_size)
    factors = tuple(h.twisted(u) for h in base)
    return _assemble("S_laurent", factors, Fraction(1, p ** (m * f.n)), params)
