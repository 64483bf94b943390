"""Newton polyhedra at the origin and their faces.

Faces of ``Delta0 = conv(Supp) + R_+^n`` are realized as minimizer sets
``F(k)`` of covectors ``k >= 0``.  Such a face equals
``conv(S) + R_+^Z`` where ``S`` is the set of support points minimizing
``k . s`` and ``Z = {j : k_j = 0}``; the pair ``(S, Z)`` determines the face
and is used as its identity.  Recession directions are stored as 0-based
coordinate indices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Sequence

import numpy as np

from .lp import RationalLP, lp_solve
from .poly import Polynomial

__all__ = [
    "Face",
    "NewtonPolyhedron",
    "EnumerationLimitError",
    "SUPPORT_LIMIT",
    "min_and_face",
    "enumerate_faces",
    "sigma_kappa",
    "face_dimension",
    "newton_polyhedron",
    "nondegenerate_for_prime",
    "affine_rank",
]

SUPPORT_LIMIT = 14

Point = tuple[int, ...]


class EnumerationLimitError(ValueError):
    pass


def affine_rank(vectors: Sequence[Sequence]) -> int:
    """Rank of a list of rational vectors (Gaussian elimination)."""
    rows = [[Fraction(v) for v in vec] for vec in vectors]
    rows = [r for r in rows if any(r)]
    rank = 0
    if not rows:
        return 0
    ncols = len(rows[0])
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][c] != 0:
                f = rows[i][c] / pr[c]
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
        if rank == len(rows):
            break
    return rank


def _dimension(points: Iterable[Point], recession: Iterable[int], n: int) -> int:
    points = sorted(points)
    v0 = points[0]
    vecs = [[a - b for a, b in zip(p, v0)] for p in points[1:]]
    for j in recession:
        e = [0] * n
        e[j] = 1
        vecs.append(e)
    return affine_rank(vecs)


@dataclass(frozen=True, eq=False)
class Face:
    """A face ``conv(support_points) + R_+^{recession_dirs}`` of ``Delta0``."""

    support_points: frozenset[Point]
    recession_dirs: frozenset[int]
    witness: tuple = field(compare=False)
    min_value: Fraction = field(compare=False)
    dim: int = field(compare=False)
    n: int = field(compare=False)

    @property
    def compact(self) -> bool:
        return not self.recession_dirs

    @property
    def key(self) -> tuple[frozenset[Point], frozenset[int]]:
        return (self.support_points, self.recession_dirs)

    def sort_key(self):
        return (self.dim, len(self.support_points), sorted(self.support_points, reverse=True),
                sorted(self.recession_dirs))

    def __eq__(self, other):
        if not isinstance(other, Face):
            return NotImplemented
        return self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __le__(self, other: "Face") -> bool:
        return self.support_points <= other.support_points and self.recession_dirs <= other.recession_dirs

    def __lt__(self, other: "Face") -> bool:
        return self <= other and self != other

    def label(self) -> str:
        pts = ",".join("(" + ",".join(map(str, p)) + ")" for p in sorted(self.support_points, reverse=True))
        rec = ",".join(f"e{j + 1}" for j in sorted(self.recession_dirs))
        return f"conv{{{pts}}}" + (f"+R+<{rec}>" if rec else "")

    def __repr__(self):
        return f"Face({self.label()}, dim={self.dim})"


def _support_tuple(support) -> tuple[Point, ...]:
    if isinstance(support, Polynomial):
        support = support.support()
    pts = tuple(sorted({tuple(int(a) for a in s) for s in support}, reverse=True))
    if not pts:
        raise ValueError("empty support")
    return pts


def min_and_face(support, k: Sequence) -> tuple[Fraction, Face]:
    """``N(k) = min_s k.s`` and the face ``F(k)`` of minimizers."""
    pts = _support_tuple(support)
    n = len(pts[0])
    k = tuple(Fraction(a) for a in k)
    if len(k) != n:
        raise ValueError("covector length mismatch")
    if any(a < 0 for a in k):
        raise ValueError("covector entries must be nonnegative")
    vals = [sum((a * b for a, b in zip(k, s)), Fraction(0)) for s in pts]
    N = min(vals)
    S = frozenset(s for s, v in zip(pts, vals) if v == N)
    Z = frozenset(j for j in range(n) if k[j] == 0)
    return N, Face(S, Z, k, N, _dimension(S, Z, n), n)


def _face_lp(pts: tuple[Point, ...], S: frozenset[Point], Z: frozenset[int], n: int):
    """Feasibility LP for ``F(k) = conv(S) + R_+^Z``.

    Variables are ``k_j`` (j not in Z) followed by ``N``.  Strict conditions
    are written with slack 1, valid because the system is homogeneous.
    """
    free = [j for j in range(n) if j not in Z]
    nv = len(free) + 1
    lp = RationalLP([1] * nv)
    for i, _ in enumerate(free):
        row = [0] * nv
        row[i] = 1
        lp.add_row(row, ">=", 1)
    for s in pts:
        row = [s[j] for j in free] + [-1]
        lp.add_row(row, "==" if s in S else ">=", 0 if s in S else 1)
    return lp, free


def _witness_face(pts, S, Z, n) -> Face | None:
    lp, free = _face_lp(pts, S, Z, n)
    res = lp_solve(lp)
    if not res.optimal:
        return None
    k = [Fraction(0)] * n
    for i, j in enumerate(free):
        k[j] = res.x[i]
    scale = lcm(*(a.denominator for a in k)) if k else 1
    ints = [int(a * scale) for a in k]
    g = gcd(*ints) if any(ints) else 1
    ints = tuple(a // g for a in ints)
    N, face = min_and_face(pts, ints)
    if face.key != (S, Z):
        raise AssertionError("face LP witness does not reproduce the face")
    return face


@lru_cache(maxsize=256)
def _enumerate_cached(pts: tuple[Point, ...]) -> tuple[Face, ...]:
    n = len(pts[0])
    faces = []
    for zsize in range(n + 1):
        for Z in itertools.combinations(range(n), zsize):
            Zs = frozenset(Z)
            free = [j for j in range(n) if j not in Zs]
            if not free:
                faces.append(min_and_face(pts, (0,) * n)[1])
                continue
            # points with equal projection onto the free coordinates are tied
            classes: dict[tuple, list[Point]] = {}
            for s in pts:
                classes.setdefault(tuple(s[j] for j in free), []).append(s)
            groups = list(classes.values())
            for r in range(1, len(groups) + 1):
                for chosen in itertools.combinations(groups, r):
                    S = frozenset(s for g in chosen for s in g)
                    face = _witness_face(pts, S, Zs, n)
                    if face is not None:
                        faces.append(face)
    faces.sort(key=Face.sort_key)
    return tuple(faces)


def enumerate_faces(support) -> list[Face]:
    """All faces ``F(k)``, ``k`` in ``Q_+^n``, each with an exact integer witness."""
    pts = _support_tuple(support)
    if len(pts) > SUPPORT_LIMIT:
        raise EnumerationLimitError(f"support has {len(pts)} points, limit is {SUPPORT_LIMIT}")
    return list(_enumerate_cached(pts))


def face_dimension(face: Face) -> int:
    return _dimension(face.support_points, face.recession_dirs, face.n)


def _diagonal_lp(pts: tuple[Point, ...]):
    n = len(pts[0])
    m = len(pts)
    lp = RationalLP([0] * m + [1])
    for j in range(n):
        lp.add_row([s[j] for s in pts] + [-1], "<=", 0)
    lp.add_row([1] * m + [0], "==", 1)
    return lp


def face_contains(face: Face, point: Sequence) -> bool:
    """Exact membership of ``point`` in ``conv(S) + R_+^Z``."""
    pts = sorted(face.support_points)
    n = face.n
    rec = sorted(face.recession_dirs)
    nv = len(pts) + len(rec)
    lp = RationalLP([0] * nv)
    for j in range(n):
        row = [s[j] for s in pts] + [1 if r == j else 0 for r in rec]
        lp.add_row(row, "==", Fraction(point[j]))
    lp.add_row([1] * len(pts) + [0] * len(rec), "==", 1)
    return lp_solve(lp).optimal


@dataclass(frozen=True)
class DiagonalData:
    t_star: Fraction
    weights: dict  # support point -> convex weight
    sigma: Fraction
    F0: Face
    kappa: int


def sigma_kappa(support) -> DiagonalData:
    """``sigma``, ``F0`` and ``kappa`` of ``Delta0`` via exact LP."""
    pts = _support_tuple(support)
    n = len(pts[0])
    if (0,) * n in pts:
        raise ValueError("support contains the origin; normalize f(0) = 0 first")
    res = lp_solve(_diagonal_lp(pts))
    if not res.optimal:
        raise AssertionError("diagonal LP failed on nonempty support")
    t = res.x[-1]
    weights = {s: w for s, w in zip(pts, res.x[:-1]) if w}
    diag = (t,) * n
    containing = [F for F in enumerate_faces(pts) if face_contains(F, diag)]
    minimal = [F for F in containing if all(F <= G for G in containing)]
    if len(minimal) != 1:
        raise AssertionError("no unique minimal face meets the diagonal")
    F0 = minimal[0]
    return DiagonalData(t, weights, 1 / t, F0, n - F0.dim)


@dataclass(frozen=True)
class NewtonPolyhedron:
    n: int
    support: tuple[Point, ...]
    faces: tuple[Face, ...]
    sigma: Fraction
    kappa: int
    F0: Face
    t_star: Fraction

    @property
    def compact_faces(self) -> tuple[Face, ...]:
        return tuple(F for F in self.faces if F.compact)

    @property
    def whole(self) -> Face:
        return next(F for F in self.faces if len(F.recession_dirs) == self.n)

    def face_id(self, face: Face) -> str:
        return f"F{self.faces.index(face)}"


@lru_cache(maxsize=256)
def _polyhedron_cached(pts: tuple[Point, ...]) -> NewtonPolyhedron:
    faces = tuple(enumerate_faces(pts))
    dd = sigma_kappa(pts)
    return NewtonPolyhedron(len(pts[0]), pts, faces, dd.sigma, dd.kappa, dd.F0, dd.t_star)


def newton_polyhedron(f_or_support) -> NewtonPolyhedron:
    return _polyhedron_cached(_support_tuple(f_or_support))


def sigma_of(f_or_support) -> Fraction:
    return sigma_kappa(f_or_support).sigma


# ---------------------------------------------------------------------------
# nondegeneracy over F_p by exhaustive torus search


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


def critical_points_mod_p(polys: Sequence[Polynomial], p: int, domain: str = "torus", limit: int = 1):
    """Points of ``(F_p^x)^n`` (or ``F_p^n``) where all ``polys`` vanish mod ``p``.

    Returns ``(count, examples)`` where ``examples`` holds up to ``limit`` points.
    """
    from .kernels import iterate_values

    n = polys[0].n
    values = np.arange(1, p) if domain == "torus" else np.arange(p)
    domains = [values] * n
    count = 0
    examples: list[tuple[int, ...]] = []
    for offset, vals, coords in iterate_values(polys, domains, p, with_coords=True):
        zero = np.ones(len(vals[0]) if vals else 0, dtype=bool)
        for v in vals:
            zero &= v == 0
        hits = np.flatnonzero(zero)
        count += len(hits)
        for h in hits[: max(0, limit - len(examples))]:
            examples.append(tuple(int(c[h]) for c in coords))
    return count, examples


@dataclass(frozen=True)
class NondegCertificate:
    face: Face
    passes: bool
    critical_point: tuple[int, ...] | None


def nondegenerate_for_prime(f: Polynomial, faces: Iterable[Face], p: int,
                            compact_only: bool = True) -> list[NondegCertificate]:
    """Exhaustive search for torus critical points of ``f_tau mod p`` per face."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    out = []
    for F in faces:
        if compact_only and not F.compact:
            continue
        ftau = f.restrict(F.support_points)
        partials = [ftau.partial(j).mod(p) for j in range(f.n)]
        if all(d.is_zero() for d in partials):
            out.append(NondegCertificate(F, False, (1,) * f.n))
            continue
        nonzero = [d for d in partials if not d.is_zero()]
        count, ex = critical_points_mod_p(nonzero, p, "torus", limit=1)
        out.append(NondegCertificate(F, count == 0, ex[0] if ex else None))
    return out


def is_nondegenerate_at(f: Polynomial, p: int, all_faces: bool = False) -> bool:
    P = newton_polyhedron(f)
    certs = nondegenerate_for_prime(f, P.faces, p, compact_only=not all_faces)
    return all(c.passes for c in certs)
