"""Face decomposition of the sums S and T with rigorously enclosed cone sums.

For a face ``tau`` the cone sums are

    A(tau) = sum q^(-nu(k))  over k in N^n, F(k) = tau, N(k) >= m
    B(tau) = sum q^(-nu(k))  over k in N^n, F(k) = tau, N(k) = m - 1

and, at primes where every relevant ``f_tau`` has no critical point on the
torus mod p,

    S = (1 - 1/q)^n sum_tau (A(tau) + E(f_tau) B(tau))

(all faces; for T only compact faces).  The infinite cone sums are truncated
at ``nu(k) <= V`` and enclosed by exact rational intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .charsums import E_sum, ExpSumValue, S_sum, T_sum, unit_box_sum
from .lp import RationalLP, lp_solve
from .newton import Face, NewtonPolyhedron, is_prime, min_and_face, newton_polyhedron, \
    nondegenerate_for_prime
from .poly import Polynomial, normalize_constant

__all__ = [
    "RationalInterval",
    "tail_bound",
    "covectors_up_to",
    "cone_table",
    "A_term",
    "B_term",
    "fiber_unit_integral",
    "verify_decomposition",
    "DecompositionReport",
]

DEFAULT_V = 40
MAX_V = 160
TAIL_RATIO = Fraction(1, 10**15)


@dataclass(frozen=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("empty interval")

    @classmethod
    def point(cls, x) -> "RationalInterval":
        x = Fraction(x)
        return cls(x, x)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def __contains__(self, x) -> bool:
        return self.lo <= Fraction(x) <= self.hi

    def __add__(self, other):
        other = other if isinstance(other, RationalInterval) else RationalInterval.point(other)
        return RationalInterval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __mul__(self, other):
        other = other if isinstance(other, RationalInterval) else RationalInterval.point(other)
        c = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi]
        return RationalInterval(min(c), max(c))

    __rmul__ = __mul__

    def widen(self, r) -> "RationalInterval":
        r = Fraction(r)
        return RationalInterval(self.lo - r, self.hi + r)


def tail_bound(n: int, q: int, V: int) -> Fraction:
    """``sum_{s > V} C(s+n-1, n-1) q^(-s)``, exactly.

    The full series is ``(1 - 1/q)^(-n)``, so the tail is that minus the
    partial sum up to ``V``.  It bounds the mass of every cone sum beyond the
    truncation.
    """
    if q < 2 or V < 0:
        raise ValueError("need q >= 2 and V >= 0")
    x = Fraction(1, q)
    full = (1 / (1 - x)) ** n
    partial = sum((comb(s + n - 1, n - 1) * x**s for s in range(V + 1)), Fraction(0))
    return full - partial


def covectors_up_to(n: int, V: int) -> np.ndarray:
    """All ``k`` in ``N^n`` with ``nu(k) <= V`` as an ``(count, n)`` int64 array."""
    rows = np.zeros((1, 0), dtype=np.int64)
    rem = np.array([V], dtype=np.int64)
    for _ in range(n):
        reps = rem + 1
        parent = np.repeat(np.arange(len(rows)), reps)
        starts = np.cumsum(reps) - reps
        vals = np.arange(len(parent)) - np.repeat(starts, reps)
        rows = np.column_stack([rows[parent], vals])
        rem = rem[parent] - vals
    return rows


@dataclass(frozen=True)
class ConeTable:
    """Per face: counts of covectors ``k`` with ``nu(k) <= V`` by ``(nu, N)``."""

    polyhedron: NewtonPolyhedron
    V: int
    counts: dict  # face -> {(nu, N): count}

    def points(self, face: Face) -> list[tuple[int, ...]]:
        ks = covectors_up_to(self.polyhedron.n, self.V)
        idx = _classify(self.polyhedron, ks)
        sel = ks[idx == self.polyhedron.faces.index(face)]
        return [tuple(int(a) for a in k) for k in sel]


def _classify(P: NewtonPolyhedron, ks: np.ndarray) -> np.ndarray:
    """Index into ``P.faces`` of ``F(k)`` for every row of ``ks``."""
    S = np.array(P.support, dtype=np.int64)
    dots = ks @ S.T
    N = dots.min(axis=1)
    bits = (1 << np.arange(len(P.support), dtype=np.int64))
    smask = ((dots == N[:, None]) * bits).sum(axis=1)
    zmask = ((ks == 0) * (1 << np.arange(P.n, dtype=np.int64))).sum(axis=1)
    lookup = {}
    pos = {s: i for i, s in enumerate(P.support)}
    for i, F in enumerate(P.faces):
        sm = sum(1 << pos[s] for s in F.support_points)
        zm = sum(1 << j for j in F.recession_dirs)
        lookup[(sm, zm)] = i
    keys = smask * (1 << P.n) + zmask
    out = np.empty(len(ks), dtype=np.int64)
    for key in np.unique(keys):
        sm, zm = divmod(int(key), 1 << P.n)
        if (sm, zm) not in lookup:
            raise AssertionError(f"covector cone ({sm}, {zm}) matches no enumerated face")
        out[keys == key] = lookup[(sm, zm)]
    return out


@lru_cache(maxsize=128)
def _cone_table_cached(pts: tuple, V: int) -> ConeTable:
    P = newton_polyhedron(pts)
    ks = covectors_up_to(P.n, V)
    idx = _classify(P, ks)
    S = np.array(P.support, dtype=np.int64)
    N = (ks @ S.T).min(axis=1)
    nu = ks.sum(axis=1)
    counts: dict = {F: {} for F in P.faces}
    keys, cnt = np.unique(np.column_stack([idx, nu, N]), axis=0, return_counts=True)
    for (i, a, b), c in zip(keys.tolist(), cnt.tolist()):
        counts[P.faces[i]][(a, b)] = c
    return ConeTable(P, V, counts)


def cone_table(f_or_support, V: int) -> ConeTable:
    P = newton_polyhedron(f_or_support)
    return _cone_table_cached(P.support, V)


def _max_nu(P: NewtonPolyhedron, face: Face, sense: str, level: int):
    """Max of ``nu`` over the closed cone of ``face`` with ``N sense level``.

    Returns ``("empty", None)``, ``("unbounded", None)`` or ``("bounded", value)``.
    """
    n = P.n
    free = [j for j in range(n) if j not in face.recession_dirs]
    if not free:
        return ("bounded", Fraction(0)) if _level_ok(0, sense, level) else ("empty", None)
    nv = len(free) + 1
    lp = RationalLP([-1] * len(free) + [0])
    for s in P.support:
        row = [s[j] for j in free] + [-1]
        lp.add_row(row, "==" if s in face.support_points else ">=", 0)
    lp.add_row([0] * len(free) + [1], sense, level)
    res = lp_solve(lp)
    if res.status == "infeasible":
        return "empty", None
    if res.status == "unbounded":
        return "unbounded", None
    return "bounded", -res.value


def _level_ok(N, sense, level) -> bool:
    return N >= level if sense == ">=" else N == level


def _cone_sum(f_or_support, face: Face, q: int, V: int, sense: str, level: int,
              local: bool) -> RationalInterval:
    if local and not face.compact:
        return RationalInterval.point(0)
    table = cone_table(f_or_support, V)
    x = Fraction(1, q)
    lo = Fraction(0)
    for (nu, N), c in table.counts[face].items():
        if _level_ok(N, sense, level):
            lo += c * x**nu
    status, vmax = _max_nu(table.polyhedron, face, sense, level)
    if status == "empty" or (status == "bounded" and vmax <= V):
        return RationalInterval(lo, lo)
    return RationalInterval(lo, lo + tail_bound(table.polyhedron.n, q, V))


def A_term(f_or_support, face: Face, q: int, m: int, V: int = DEFAULT_V,
           local: bool = False) -> RationalInterval:
    """Enclosure of the cone sum over ``F(k) = face`` with ``N(k) >= m``."""
    return _cone_sum(f_or_support, face, q, V, ">=", m, local)


def B_term(f_or_support, face: Face, q: int, m: int, V: int = DEFAULT_V,
           local: bool = False) -> RationalInterval:
    """Enclosure of the cone sum over ``F(k) = face`` with ``N(k) = m - 1``."""
    return _cone_sum(f_or_support, face, q, V, "==", m - 1, local)


# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberIntegral:
    kind: str  # "full-measure" | "E-case" | "vanishing"
    N: int
    value: ExpSumValue

    @property
    def is_zero(self) -> bool:
        return self.value.exact_zero


def fiber_unit_integral(f: Polynomial, face: Face, k, p: int, m: int, u: int = 1) -> FiberIntegral:
    """Integral of ``e(u f(p^k w) / p^m)`` over units ``w``, by brute force.

    With ``f(p^k w) = p^N F(w)`` the integrand depends on ``w`` mod ``p^(m-N)``.
    """
    k = tuple(int(a) for a in k)
    N, Fk = min_and_face(f.support(), k)
    if Fk != face:
        raise ValueError(f"covector {k} does not lie in the cone of {face.label()}")
    N = int(N)
    level = m - N
    if level <= 0:
        kind = "full-measure"
        scaled = Polynomial(f.n, {})
        level = 1
    else:
        kind = "E-case" if level == 1 else "vanishing"
        terms = {}
        for e, c in f.items():
            shift = sum(a * b for a, b in zip(k, e)) - N
            terms[e] = c * p**shift
        scaled = Polynomial(f.n, terms)
    return FiberIntegral(kind, N, unit_box_sum(scaled, p, level, u))


# ---------------------------------------------------------------------------


@dataclass
class FaceTerm:
    face_id: str
    label: str
    compact: bool
    A: RationalInterval
    B: RationalInterval
    E: ExpSumValue | None
    k_points: list | None = None


@dataclass
class DecompositionReport:
    mode: str
    p: int
    m: int
    u: int
    V: int
    verdict: str  # "verified" | "failed" | "not applicable at p"
    d_K: Fraction
    terms: list[FaceTerm] = field(default_factory=list)
    assembled_re: RationalInterval | None = None
    assembled_im: RationalInterval | None = None
    brute: ExpSumValue | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def verified(self) -> bool:
        return self.verdict == "verified"


def _float_interval(x: float, err: float) -> RationalInterval:
    return RationalInterval(Fraction(x) - Fraction(err), Fraction(x) + Fraction(err))


def _assemble_terms(terms: list[FaceTerm], d_K: Fraction):
    re = RationalInterval.point(0)
    im = RationalInterval.point(0)
    for t in terms:
        re = re + t.A
        if t.E is None or t.E.exact_zero:
            continue
        z, err = t.E.complex_value, t.E.abs_error
        re = re + _float_interval(z.real, err) * t.B
        im = im + _float_interval(z.imag, err) * t.B
    return re * d_K, im * d_K


def verify_decomposition(f: Polynomial, p: int, m: int, u: int = 1, V: int = DEFAULT_V,
                         mode: str = "global", adaptive: bool = True,
                         dump_terms: bool = False, budget: int | None = None) -> DecompositionReport:
    """Assemble the face decomposition and compare it with the brute-force sum."""
    if mode not in ("global", "local"):
        raise ValueError("mode must be 'global' or 'local'")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if m < 1:
        raise ValueError("m must be positive")
    f, note = normalize_constant(f)
    if f.is_zero():
        raise ValueError("zero polynomial")
    n = f.n
    d_K = (1 - Fraction(1, p)) ** n
    report = DecompositionReport(mode, p, m, u, V, "verified", d_K)
    if note:
        report.notes.append(note)
    P = newton_polyhedron(f)
    local = mode == "local"
    faces = [F for F in P.faces if F.compact or not local]
    certs = nondegenerate_for_prime(f, faces, p, compact_only=local)
    bad = [c for c in certs if not c.passes]
    if bad:
        report.verdict = "not applicable at p"
        for c in bad:
            report.notes.append(f"{c.face.label()} has a torus critical point mod {p} at {c.critical_point}")
        return report

    brute = T_sum(f, p, m, u, budget=budget) if local else S_sum(f, p, m, u, budget=budget)
    report.brute = brute
    E_cache = {}
    while True:
        terms = []
        for F in faces:
            A = A_term(P.support, F, p, m, V, local)
            B = B_term(P.support, F, p, m, V, local)
            E = None
            if B.hi > 0:
                if F not in E_cache:
                    E_cache[F] = E_sum(f.restrict(F.support_points), p, u)
                E = E_cache[F]
            pts = cone_table(P.support, V).points(F) if dump_terms else None
            terms.append(FaceTerm(P.face_id(F), F.label(), F.compact, A, B, E, pts))
        re, im = _assemble_terms(terms, d_K)
        tail = tail_bound(n, p, V) * len(faces)
        scale = max(abs(re.lo), abs(re.hi), abs(im.lo), abs(im.hi))
        if not adaptive or V >= MAX_V or tail <= TAIL_RATIO * scale or scale == 0 and tail < TAIL_RATIO:
            break
        V = min(MAX_V, V + 20)
    report.V = V
    report.terms = terms
    report.assembled_re, report.assembled_im = re, im
    z, err = brute.complex_value, brute.abs_error
    ok_re = _float_interval(z.real, err)
    ok_im = _float_interval(z.imag, err)
    inside = (ok_re.hi >= re.lo and ok_re.lo <= re.hi and ok_im.hi >= im.lo and ok_im.lo <= im.hi)
    report.verdict = "verified" if inside else "failed"
    return report
