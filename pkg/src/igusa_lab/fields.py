"""Finite fields ``F_q = F_p[t]/(irred)`` for small ``q``.

Elements are encoded as integers ``0 <= z < q`` whose base-``p`` digits are the
coefficients of ``1, t, t^2, ...``.  Only what the character sums need is
provided: multiplication, a primitive element with its discrete-log table,
and the absolute trace to ``F_p``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .newton import is_prime

# monic irreducibles, coefficients listed from the constant term upward
BUILTIN_IRREDUCIBLES: dict[int, tuple[int, tuple[int, ...]]] = {
    4: (2, (1, 1, 1)),        # t^2 + t + 1
    8: (2, (1, 1, 0, 1)),     # t^3 + t + 1
    9: (3, (1, 0, 1)),        # t^2 + 1
    16: (2, (1, 1, 0, 0, 1)),  # t^4 + t + 1
    25: (5, (2, 0, 1)),       # t^2 + 2
    27: (3, (1, 2, 0, 1)),    # t^3 + 2t + 1
}


class ReducibleModulusError(ValueError):
    pass


def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of ``a`` by monic ``m`` over ``F_p`` (coefficient lists, low first)."""
    a = _trim([x % p for x in a])
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1]
        shift = len(a) - 1 - dm
        for i, mi in enumerate(m):
            a[shift + i] = (a[shift + i] - c * mi) % p
        _trim(a)
    return a


def is_irreducible(coeffs: tuple[int, ...], p: int) -> bool:
    """Exhaustive check: no monic factor of degree ``1..deg/2`` divides."""
    m = [c % p for c in coeffs]
    k = len(m) - 1
    if k < 1 or m[-1] != 1:
        return False
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            if not poly_mod(list(m), list(low) + [1], p):
                return False
    return True


@dataclass(frozen=True)
class FiniteField:
    p: int
    k: int
    irred: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.p**self.k

    def digits(self, z: int) -> list[int]:
        out = []
        for _ in range(self.k):
            out.append(z % self.p)
            z //= self.p
        return out

    def encode(self, digits) -> int:
        z = 0
        for d in reversed(list(digits)):
            z = z * self.p + d % self.p
        return z

    def add(self, a: int, b: int) -> int:
        return self.encode(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def mul(self, a: int, b: int) -> int:
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        r = poly_mod(prod, list(self.irred), self.p)
        return self.encode(r + [0] * (self.k - len(r)))

    def power(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def trace(self, a: int) -> int:
        """Absolute trace ``a + a^p + ... + a^(p^(k-1))`` as an element of ``F_p``."""
        total, z = 0, a
        for _ in range(self.k):
            total = self.add(total, z)
            z = self.power(z, self.p)
        d = self.digits(total)
        if any(d[1:]):
            raise AssertionError("trace left the prime field")
        return d[0]


@lru_cache(maxsize=64)
def finite_field(q: int, irred: tuple[int, ...] | None = None) -> FiniteField:
    if irred is None:
        if q in BUILTIN_IRREDUCIBLES:
            p, irred = BUILTIN_IRREDUCIBLES[q]
        elif is_prime(q):
            p, irred = q, (0, 1)
        else:
            raise ValueError(f"no built-in modulus for q = {q}; pass one explicitly")
    else:
        k = len(irred) - 1
        p = round(q ** (1 / k))
        if p**k != q:
            raise ValueError(f"modulus degree {k} does not match q = {q}")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not is_irreducible(irred, p):
        raise ReducibleModulusError(f"{irred} is reducible over F_{p}")
    return FiniteField(p, len(irred) - 1, tuple(irred))


@lru_cache(maxsize=64)
def log_tables(F: FiniteField) -> tuple[int, np.ndarray]:
    """A primitive element ``g`` and ``Tr(g^s)`` for ``s = 0 .. q-2``."""
    q = F.q
    order = q - 1
    primes = [r for r in range(2, order + 1) if order % r == 0 and is_prime(r)]
    for g in range(2 if q > 2 else 1, q):
        if all(F.power(g, order // r) != 1 for r in primes):
            break
    else:
        g = 1
    traces = np.zeros(order, dtype=np.int64)
    z = 1
    for s in range(order):
        traces[s] = F.trace(z)
        z = F.mul(z, g)
    if z != 1:
        raise AssertionError("generator order check failed")
    return g, traces
