"""Independent slow reference implementations used by the tests."""

from __future__ import annotations

import cmath
import itertools
from fractions import Fraction


def naive_sum(f, coords, modulus, u=1):
    """``sum e(u f(x) / modulus)`` with exact integer evaluation of ``f``."""
    total = 0j
    count = 0
    for x in coords:
        total += cmath.exp(2j * cmath.pi * ((u * f(x)) % modulus) / modulus)
        count += 1
    return total, count


def box(values, n):
    return itertools.product(values, repeat=n)


def naive_S(f, p, m, u=1):
    M = p**m
    s, c = naive_sum(f, box(range(M), f.n), M, u)
    return s / c


def naive_T(g, p, m, u=1):
    M = p**m
    s, _ = naive_sum(g, box([p * j for j in range(p ** (m - 1))], g.n), M, u)
    return s / M**g.n


def naive_E(h, p, u=1):
    s, c = naive_sum(h, box(range(1, p), h.n), p, u)
    return s / c


def covector_faces(support, D):
    """Distinct ``(minimizer set, zero coordinates)`` over all ``k`` in ``{0..D}^n``."""
    support = [tuple(s) for s in support]
    n = len(support[0])
    seen = set()
    for k in itertools.product(range(D + 1), repeat=n):
        vals = [sum(a * b for a, b in zip(k, s)) for s in support]
        N = min(vals)
        S = frozenset(s for s, v in zip(support, vals) if v == N)
        Z = frozenset(j for j in range(n) if k[j] == 0)
        seen.add((S, Z))
    return seen


def solve_square(A, b):
    """Exact Gaussian elimination; ``None`` if singular."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(A, b)]
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c] != 0), None)
        if piv is None:
            return None
        M[c], M[piv] = M[piv], M[c]
        for r in range(n):
            if r != c and M[r][c] != 0:
                t = M[r][c] / M[c][c]
                M[r] = [a - t * b for a, b in zip(M[r], M[c])]
    return [M[i][n] / M[i][i] for i in range(n)]


def vertex_lp_min(c, rows):
    """Minimum of ``c.x`` over a bounded polytope ``{x >= 0, a.x <= b}`` by vertex enumeration."""
    n = len(c)
    cons = [(list(a), Fraction(b)) for a, b in rows]
    cons += [([-int(i == j) for i in range(n)], Fraction(0)) for j in range(n)]
    best = None
    for idx in itertools.combinations(range(len(cons)), n):
        x = solve_square([cons[i][0] for i in idx], [cons[i][1] for i in idx])
        if x is None:
            continue
        if all(sum(a * v for a, v in zip(row, x)) <= rhs for row, rhs in cons):
            val = sum(a * v for a, v in zip(c, x))
            best = val if best is None else min(best, val)
    return best


def _polymulmod(a, b, mod, p):
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    k = len(mod) - 1
    for d in range(len(prod) - 1, k - 1, -1):
        c = prod[d]
        if c:
            for i in range(k + 1):
                prod[d - k + i] = (prod[d - k + i] - c * mod[i]) % p
    prod = prod[:k] + [0] * (k - len(prod[:k]))
    return prod


def ext_field_elements(p, mod):
    """All elements of ``F_p[t]/(mod)`` as coefficient tuples, with mul and trace."""
    k = len(mod) - 1
    elems = [list(c) for c in itertools.product(range(p), repeat=k)]

    def mul(a, b):
        return _polymulmod(a, b, mod, p)

    def trace(a):
        total = [0] * k
        z = a
        for _ in range(k):
            total = [(x + y) % p for x, y in zip(total, z)]
            w = [1] + [0] * (k - 1)
            for _ in range(p):
                w = mul(w, z)
            z = w
        assert not any(total[1:])
        return total[0]

    return elems, mul, trace


def naive_ext_sum(h, p, mod, affine, u=1):
    """``sum psi_p(u Tr h(x))`` over ``F_q^n`` or its torus, by direct field arithmetic."""
    elems, mul, trace = ext_field_elements(p, mod)
    k = len(mod) - 1
    dom = elems if affine else [e for e in elems if any(e)]
    total = 0j
    for x in itertools.product(dom, repeat=h.n):
        val = [0] * k
        for e, c in h.items():
            term = [c % p] + [0] * (k - 1)
            for xj, ej in zip(x, e):
                for _ in range(ej):
                    term = mul(term, xj)
            val = [(a + b) % p for a, b in zip(val, term)]
        total += cmath.exp(2j * cmath.pi * (u * trace(val) % p) / p)
    return total / len(dom) ** h.n


def gauss_sum(p):
    return sum(cmath.exp(2j * cmath.pi * (x * x % p) / p) for x in range(p))
