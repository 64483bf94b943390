"""Desk-scale checks of the exponential-sum bounds and the lemmas behind them.

Every asymptotic "there exists c" statement is checked the same way: compute
the ratio of the left side to the bound shape over a grid, report the largest
ratio as the fitted constant, and compare the constant on ``p <= P0`` with
the one on ``p <= 2 P0``.  Exact statements (inequalities between rationals,
vanishing sums) are reported as violations when they fail.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .charsums import E_sum, E_sum_ext, S_sum, T_sum, affine_sum_ext, magnitude
from .decomp import A_term, B_term, DEFAULT_V, covectors_up_to
from .lp import RationalLP, lp_solve
from .newton import (Face, affine_rank, critical_points_mod_p, is_prime, min_and_face,
                     newton_polyhedron, nondegenerate_for_prime, sigma_kappa)
from .poly import Polynomial, common_quasi_weights, normalize_constant, quasi_weights

__all__ = [
    "BoundCheckReport",
    "DimensionEstimate",
    "TrivlemVerdict",
    "twists_for",
    "primes_between",
    "check_nu_inequality",
    "check_cone_lemma",
    "check_cone_lemma_on_faces",
    "face_cone_flat_dimension",
    "check_AB_bounds",
    "fit_mt1",
    "locus_dimension",
    "critical_dim_estimate",
    "check_katz_bounds",
    "check_quasinondeg_bound",
    "check_face_E_bounds",
    "check_intersect",
    "check_intersect_and_fg",
    "check_trivlem",
    "check_mt2",
]

TREND_LIMIT = 1.2
DIM_TOLERANCE = 0.25
ALL_TWISTS_UP_TO = 31
SAMPLED_TWISTS = 8


def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in range(max(2, lo), hi + 1) if is_prime(p)]


def twists_for(p: int, all_up_to: int = ALL_TWISTS_UP_TO, samples: int = SAMPLED_TWISTS) -> list[int]:
    """Every unit ``1..p-1`` for small ``p``, else ``1`` plus a seeded sample."""
    if p <= all_up_to or p - 1 <= samples:
        return list(range(1, p))
    rng = random.Random(p)
    return sorted([1] + rng.sample(range(2, p), samples - 1))


@dataclass
class BoundCheckReport:
    inequality: str
    grid: dict
    points: list[dict] = field(default_factory=list)
    fitted_c: float | None = None
    trend: dict | None = None
    violations: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def trend_flagged(self) -> bool:
        return bool(self.trend and self.trend["flagged"])

    def margins(self) -> dict:
        ratios = [pt["ratio"] for pt in self.points if pt.get("ratio") is not None]
        if not ratios:
            return {"count": 0}
        return {"count": len(ratios), "min_ratio": min(ratios), "max_ratio": max(ratios)}

    def finish(self, P0: int | None = None) -> "BoundCheckReport":
        """Set the fitted constant and the doubling trend from ``points``."""
        ratios = [pt["ratio"] for pt in self.points if pt.get("ratio") is not None]
        self.fitted_c = max(ratios) if ratios else 0.0
        ps = sorted({pt["p"] for pt in self.points if "p" in pt})
        if not ps:
            return self
        if P0 is None:
            P0 = max(ps) // 2
        P1 = 2 * P0

        def fit(limit):
            r = [pt["ratio"] for pt in self.points if pt.get("p", 0) <= limit and pt.get("ratio") is not None]
            return max(r) if r else None

        c0, c1 = fit(P0), fit(P1)
        if c0 is None or c1 is None:
            self.trend = None
            return self
        growth = (c1 / c0) if c0 > 0 else (1.0 if c1 == 0 else math.inf)
        self.trend = {"P0": P0, "P1": P1, "c_P0": c0, "c_P1": c1, "growth": growth,
                      "flagged": growth >= TREND_LIMIT}
        return self


def _upper(v) -> float:
    if v.exact_zero:
        return 0.0
    mag, err = magnitude(v)
    return mag + err


# ---------------------------------------------------------------------------
# lattice-cone inequalities


def check_nu_inequality(h: Polynomial, face: Face | None = None, cap: int = 20) -> BoundCheckReport:
    """``nu(k) >= sigma(h) (N(k) + 1) - sigma(h_tau)`` for all ``k`` with ``nu(k) <= cap``."""
    h, note = normalize_constant(h)
    P = newton_polyhedron(h)
    report = BoundCheckReport("nu-lower-bound", {"cap": cap, "n": h.n})
    if note:
        report.notes.append(note)
    sigma = P.sigma
    faces = [face] if face is not None else list(P.faces)
    sig_face = {F: sigma_kappa(F.support_points).sigma for F in faces}
    ks = covectors_up_to(h.n, cap)
    S = np.array(P.support, dtype=np.int64)
    N_all = (ks @ S.T).min(axis=1)
    checked = 0
    for k, N in zip(ks.tolist(), N_all.tolist()):
        _, F = min_and_face(P.support, k)
        if F not in sig_face:
            continue
        checked += 1
        nu = sum(k)
        rhs = sigma * (N + 1) - sig_face[F]
        slack = nu - rhs
        if slack < 0:
            report.violations.append(f"k={tuple(k)} on {F.label()}: nu={nu} < {rhs}")
        report.points.append({"k": tuple(k), "face": P.face_id(F), "nu": nu, "N": N,
                              "rhs": rhs, "slack": slack, "ratio": None})
    report.grid["checked"] = checked
    report.grid["faces"] = {P.face_id(F): sig_face[F] for F in faces}
    report.fitted_c = None
    return report


def _relint_cone(generators: Sequence[Sequence[int]], k: Sequence[int]) -> bool:
    """Whether ``k`` is a strictly positive combination of ``generators``."""
    r = len(generators)
    n = len(k)
    # variables: lambda_1..lambda_r, t ; maximize t with lambda_i >= t, t <= 1
    lp = RationalLP([0] * r + [-1])
    for j in range(n):
        lp.add_row([g[j] for g in generators] + [0], "==", k[j])
    for i in range(r):
        row = [0] * (r + 1)
        row[i], row[r] = 1, -1
        lp.add_row(row, ">=", 0)
    lp.add_row([0] * r + [1], "<=", 1)
    res = lp_solve(lp)
    return res.optimal and -res.value > 0


def _cone_slice_max_nu(generators, L, m):
    """Max of ``nu`` over ``{k in C : L(k) = m}``; ``None`` if unbounded or empty."""
    r = len(generators)
    gnu = [sum(g) for g in generators]
    gL = [sum(a * b for a, b in zip(L, g)) for g in generators]
    lp = RationalLP([-x for x in gnu])
    lp.add_row(gL, "==", m)
    res = lp_solve(lp)
    if res.status == "infeasible":
        return "empty", None
    if res.status == "unbounded":
        return "unbounded", None
    return "bounded", -res.value


def check_cone_lemma(generators: Sequence[Sequence[int]], L: Sequence[int], sigma, gamma,
                     q_grid: Iterable[int] = (2, 3, 5, 7), m_grid: Iterable[int] = range(1, 7),
                     cap: int = 30) -> BoundCheckReport:
    """Cone-sum bound ``sum q^-nu <= c q^(-m sigma - gamma) (m+1)^max(0, e-1)`` over the slice ``L(k) = m``.

    The hypothesis ``nu >= sigma L + gamma`` is checked on all interior lattice
    points with ``nu <= cap``; ``e`` is the dimension of the face of the cone
    where ``nu = sigma L``.
    """
    from .decomp import tail_bound

    sigma, gamma = Fraction(sigma), Fraction(gamma)
    gens = [tuple(int(a) for a in g) for g in generators]
    n = len(L)
    q_grid, m_grid = list(q_grid), list(m_grid)
    report = BoundCheckReport("cone-lemma", {"generators": gens, "L": tuple(L), "sigma": sigma,
                                             "gamma": gamma, "q": q_grid, "m": m_grid, "cap": cap})
    interior = []
    for k in covectors_up_to(n, cap).tolist():
        if _relint_cone(gens, k):
            interior.append(k)
    for k in interior:
        Lk = sum(a * b for a, b in zip(L, k))
        if sum(k) < Lk * sigma + gamma:
            report.violations.append(f"hypothesis fails at k={tuple(k)}: nu={sum(k)} < {Lk * sigma + gamma}")
    flat = [g for g in gens if sum(g) - sigma * sum(a * b for a, b in zip(L, g)) == 0]
    e = affine_rank([(0,) * n] + flat) if flat else 0
    report.grid["e"] = e
    if report.violations:
        report.notes.append("precondition violated; bound not fitted")
        return report
    for q in q_grid:
        x = Fraction(1, q)
        for m in m_grid:
            lo = sum((x ** sum(k) for k in interior
                      if sum(a * b for a, b in zip(L, k)) == m), Fraction(0))
            status, vmax = _cone_slice_max_nu(gens, L, m)
            hi = lo
            if status == "unbounded" or (status == "bounded" and vmax > cap):
                hi = lo + tail_bound(n, q, cap)
            shape = float(q) ** (-m * float(sigma) - float(gamma)) * (m + 1) ** max(0, e - 1)
            report.points.append({"q": q, "m": m, "lhs_lo": lo, "lhs_hi": hi, "shape": shape,
                                  "ratio": float(hi) / shape})
    return report.finish()


def _cone_dimension(n: int, eqs: list, ineqs: list) -> int:
    """Dimension of ``{k >= 0 : a.k = 0 (eqs), b.k >= 0 (ineqs)}``.

    Inequalities that cannot be strict anywhere on the cone are implicit
    equalities; the dimension is ``n`` minus the rank of all equalities.
    """
    ineqs = list(ineqs) + [tuple(int(i == j) for i in range(n)) for j in range(n)]
    implicit = []
    for b in ineqs:
        lp = RationalLP([-Fraction(x) for x in b])
        for a in eqs:
            lp.add_row(a, "==", 0)
        for c in ineqs:
            lp.add_row(c, ">=", 0)
        lp.add_row(b, "<=", 1)
        res = lp_solve(lp)
        if res.optimal and -res.value == 0:
            implicit.append(b)
    rows = list(eqs) + implicit
    return n - (affine_rank([(0,) * n] + rows) if rows else 0)


def face_cone_flat_dimension(f_or_support, face: Face) -> int:
    """Dimension of ``{k in closed cone of face : nu(k) = sigma N(k)}``."""
    P = newton_polyhedron(f_or_support)
    n = P.n
    pts = sorted(face.support_points)
    s0 = pts[0]
    eqs = [tuple(int(i == j) for i in range(n)) for j in sorted(face.recession_dirs)]
    eqs += [tuple(a - b for a, b in zip(s, s0)) for s in pts[1:]]
    ineqs = [tuple(a - b for a, b in zip(t, s0)) for t in P.support if t not in face.support_points]
    eqs.append(tuple(1 - P.sigma * a for a in s0))
    return _cone_dimension(n, eqs, ineqs)


def check_cone_lemma_on_faces(f: Polynomial, q_grid: Iterable[int] = (2, 3, 5, 7, 11),
                              m_grid: Iterable[int] = range(1, 7), V: int = DEFAULT_V,
                              local: bool = False) -> BoundCheckReport:
    """The cone-sum bound on each face cone with ``L = N``, ``gamma = sigma - sigma(f_tau)``.

    The hypothesis is the ``nu`` lower bound; ``e <= kappa`` is checked exactly
    and the slice sums over ``N(k) = m`` are fitted against
    ``q^(-m sigma - gamma) (m+1)^max(0, e-1)``.
    """
    f, note = normalize_constant(f)
    P = newton_polyhedron(f)
    q_grid, m_grid = list(q_grid), list(m_grid)
    report = BoundCheckReport("cone-lemma-faces", {"q": q_grid, "m": m_grid, "V": V,
                                                   "sigma": P.sigma, "kappa": P.kappa})
    if note:
        report.notes.append(note)
    hyp = check_nu_inequality(f, cap=min(V, 20))
    report.violations.extend(hyp.violations)
    faces = [F for F in P.faces if F.compact or not local]
    for F in faces:
        gamma = P.sigma - sigma_kappa(F.support_points).sigma
        e = face_cone_flat_dimension(P.support, F)
        fid = P.face_id(F)
        if gamma < 0:
            report.violations.append(f"{F.label()}: negative gamma {gamma}")
        if e > P.kappa:
            report.violations.append(f"{F.label()}: flat dimension {e} exceeds kappa {P.kappa}")
        for q in q_grid:
            for m in m_grid:
                B = B_term(P.support, F, q, m + 1, V, local)
                shape = float(q) ** (-m * float(P.sigma) - float(gamma)) * (m + 1) ** max(0, e - 1)
                report.points.append({"face": fid, "q": q, "m": m, "e": e, "gamma": gamma,
                                      "lhs_hi": B.hi, "ratio": float(B.hi) / shape})
    return report.finish()


def check_AB_bounds(f: Polynomial, p_grid: Iterable[int], m_grid: Iterable[int] = (1, 2, 3),
                    local: bool = False, V: int = DEFAULT_V) -> BoundCheckReport:
    """Fit ``A <= c p^(-m sigma) m^(kappa-1)`` and ``B <= c p^(-m sigma) p^sigma(f_tau) m^(kappa-1)``.

    The ``B`` bound uses the face polynomial of the same polynomial whose
    cone sums are bounded.
    """
    f, note = normalize_constant(f)
    P = newton_polyhedron(f)
    sigma, kappa = P.sigma, P.kappa
    p_grid, m_grid = list(p_grid), list(m_grid)
    report = BoundCheckReport("AB-cone-sums", {"p": p_grid, "m": m_grid, "local": local, "V": V,
                                               "sigma": sigma, "kappa": kappa})
    if note:
        report.notes.append(note)
    faces = [F for F in P.faces if F.compact or not local]
    sig_face = {F: float(sigma_kappa(F.support_points).sigma) for F in faces}
    for p in p_grid:
        for m in m_grid:
            base = float(p) ** (-m * float(sigma)) * m ** (kappa - 1)
            for F in faces:
                A = A_term(P.support, F, p, m, V, local)
                B = B_term(P.support, F, p, m, V, local)
                fid = P.face_id(F)
                report.points.append({"term": "A", "p": p, "m": m, "face": fid,
                                      "value_hi": A.hi, "ratio": float(A.hi) / base})
                report.points.append({"term": "B", "p": p, "m": m, "face": fid,
                                      "value_hi": B.hi,
                                      "ratio": float(B.hi) / (base * p ** sig_face[F])})
    return report.finish()


def fit_mt1(f: Polynomial, p_grid: Iterable[int], m_grid: Iterable[int] = (1, 2, 3),
            u_grid: Sequence[int] | None = None, mode: str = "global", P0: int | None = None,
            budget: int | None = None) -> BoundCheckReport:
    """Ratios ``|S| p^(m sigma) / m^(kappa-1)`` (``T`` in local mode) over the grid."""
    if mode not in ("global", "local"):
        raise ValueError("mode must be 'global' or 'local'")
    f, note = normalize_constant(f)
    P = newton_polyhedron(f)
    sigma, kappa = P.sigma, P.kappa
    p_grid, m_grid = list(p_grid), list(m_grid)
    report = BoundCheckReport("main-bound-" + mode, {"p": p_grid, "m": m_grid, "sigma": sigma,
                                                       "kappa": kappa})
    if note:
        report.notes.append(note)
    for p in p_grid:
        certs = nondegenerate_for_prime(f, P.compact_faces, p, compact_only=True)
        if not all(c.passes for c in certs):
            report.notes.append(f"p={p} excluded: degenerate on a compact face")
            continue
        for m in m_grid:
            scale = float(p) ** (m * float(sigma)) / m ** (kappa - 1)
            for u in (u_grid if u_grid is not None else twists_for(p)):
                if u % p == 0:
                    continue
                v = (T_sum if mode == "local" else S_sum)(f, p, m, u, budget=budget)
                report.points.append({"p": p, "m": m, "u": u, "abs_upper": _upper(v),
                                      "ratio": _upper(v) * scale})
    return report.finish(P0)


# ---------------------------------------------------------------------------
# point-count dimensions


@dataclass
class DimensionEstimate:
    counts: dict  # p -> number of common zeros in F_p^n
    slope: float | None
    d: int | None
    residuals: list[float]
    status: str  # "ok" | "empty" | "inconclusive"
    excluded: list[int] = field(default_factory=list)


def _divides_some_coefficient(polys: Sequence[Polynomial], p: int) -> bool:
    return any(c % p == 0 for f in polys for _, c in f.items())


def locus_dimension(polys: Sequence[Polynomial], p_grid: Iterable[int],
                    tolerance: float = DIM_TOLERANCE) -> DimensionEstimate:
    """Dimension of the common zero locus in affine space from ``F_p`` point counts.

    With every count at least one the dimension is the slope of ``log count``
    against ``log p``; no points at any prime gives ``-1``.  Primes dividing a
    coefficient are skipped since reduction changes the locus there.
    """
    polys = [g for g in polys]
    n = polys[0].n if polys else 0
    live = [g for g in polys if not g.is_zero()]
    counts, excluded = {}, []
    for p in p_grid:
        if _divides_some_coefficient(live, p):
            excluded.append(p)
            continue
        if not live:
            counts[p] = p**n
            continue
        c, _ = critical_points_mod_p(live, p, domain="affine", limit=0)
        counts[p] = c
    if len(counts) < 2:
        return DimensionEstimate(counts, None, None, [], "inconclusive", excluded)
    vals = list(counts.values())
    if all(c == 0 for c in vals):
        return DimensionEstimate(counts, None, -1, [], "empty", excluded)
    if any(c == 0 for c in vals):
        return DimensionEstimate(counts, None, None, [], "inconclusive", excluded)
    x = np.log(np.array(list(counts), dtype=float))
    y = np.log(np.array(vals, dtype=float))
    slope, icpt = np.polyfit(x, y, 1)
    residuals = (y - (slope * x + icpt)).tolist()
    d = int(round(slope))
    status = "ok" if abs(slope - d) <= tolerance else "inconclusive"
    return DimensionEstimate(counts, float(slope), d if status == "ok" else None, residuals,
                             status, excluded)


def critical_dim_estimate(h: Polynomial, p_grid: Iterable[int] = (7, 11, 13, 17, 19, 23)) -> DimensionEstimate:
    """Dimension of ``{grad h = 0}`` estimated from ``F_p`` point counts."""
    return locus_dimension([h.partial(j) for j in range(h.n)], p_grid)


def _zero_is_critical(h: Polynomial) -> bool:
    return all(h.partial(j).constant_term() == 0 for j in range(h.n))


def check_katz_bounds(h: Polynomial, p_grid: Iterable[int], q_list: Iterable[int] = (),
                      require_critical: bool = True, dim_grid: Iterable[int] | None = None,
                      u_policy=twists_for) -> BoundCheckReport:
    """Fit ``a`` in ``|E|, |affine sum| < a q^((d-n)/2)`` over primes and prime powers."""
    h, note = normalize_constant(h)
    if quasi_weights(h) is None:
        raise ValueError("polynomial is not quasi-homogeneous")
    if require_critical and not _zero_is_critical(h):
        raise ValueError("0 is not a critical point")
    p_grid, q_list = list(p_grid), list(q_list)
    dim = critical_dim_estimate(h, dim_grid if dim_grid is not None else p_grid)
    report = BoundCheckReport("finite-field-critical", {"p": p_grid, "q": q_list, "n": h.n,
                                                        "d": dim.d, "dim_status": dim.status})
    if note:
        report.notes.append(note)
    if dim.d is None:
        report.violations.append("dimension estimate inconclusive")
        return report
    expo = (dim.d - h.n) / 2
    for p in p_grid:
        shape = float(p) ** expo
        for u in u_policy(p):
            for kind, v in (("torus", E_sum(h, p, u)), ("affine", S_sum(h, p, 1, u))):
                report.points.append({"p": p, "q": p, "u": u, "kind": kind, "abs_upper": _upper(v),
                                      "ratio": _upper(v) / shape})
    for q in q_list:
        p = _prime_of(q)
        shape = float(q) ** expo
        for u in range(1, p):
            for kind, v in (("torus", E_sum_ext(h, q, u=u)), ("affine", affine_sum_ext(h, q, u=u))):
                report.points.append({"p": p, "q": q, "u": u, "kind": kind, "abs_upper": _upper(v),
                                      "ratio": _upper(v) / shape})
    return report.finish()


def _prime_of(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise ValueError(q)


def check_quasinondeg_bound(f: Polynomial, p_grid: Iterable[int], q_list: Iterable[int] = (),
                            u_policy=twists_for) -> BoundCheckReport:
    """Fit ``a`` in ``|E(f)|, |affine sum| < a q^(-sigma(f))`` at nondegenerate primes."""
    f, note = normalize_constant(f)
    if quasi_weights(f) is None:
        raise ValueError("polynomial is not quasi-homogeneous")
    P = newton_polyhedron(f)
    sigma = float(P.sigma)
    p_grid, q_list = list(p_grid), list(q_list)
    report = BoundCheckReport("quasi-homogeneous-nondegenerate", {"p": p_grid, "q": q_list,
                                                                  "sigma": P.sigma})
    if note:
        report.notes.append(note)
    for p in p_grid:
        if not all(c.passes for c in nondegenerate_for_prime(f, P.compact_faces, p)):
            report.notes.append(f"p={p} excluded: degenerate on a compact face")
            continue
        for u in u_policy(p):
            for kind, v in (("torus", E_sum(f, p, u)), ("affine", S_sum(f, p, 1, u))):
                report.points.append({"p": p, "q": p, "u": u, "kind": kind, "abs_upper": _upper(v),
                                      "ratio": _upper(v) * p**sigma})
    for q in q_list:
        p = _prime_of(q)
        for u in range(1, p):
            for kind, v in (("torus", E_sum_ext(f, q, u=u)), ("affine", affine_sum_ext(f, q, u=u))):
                report.points.append({"p": p, "q": q, "u": u, "kind": kind, "abs_upper": _upper(v),
                                      "ratio": _upper(v) * q**sigma})
    return report.finish()


def check_face_E_bounds(f: Polynomial, p_grid: Iterable[int], local: bool = False,
                        u_policy=twists_for) -> BoundCheckReport:
    """Per-face torus bound ``|E(f_tau)| < c p^(-sigma(f_tau))``.

    All faces in global mode, compact faces in local mode.
    """
    f, note = normalize_constant(f)
    P = newton_polyhedron(f)
    faces = [F for F in P.faces if F.compact or not local]
    p_grid = list(p_grid)
    report = BoundCheckReport("face-torus-sums-" + ("local" if local else "global"), {"p": p_grid})
    if note:
        report.notes.append(note)
    for p in p_grid:
        if not all(c.passes for c in nondegenerate_for_prime(f, faces, p, compact_only=local)):
            report.notes.append(f"p={p} excluded: degenerate face")
            continue
        for F in faces:
            fF = f.restrict(F.support_points)
            s = float(sigma_kappa(F.support_points).sigma)
            for u in u_policy(p):
                v = E_sum(fF, p, u)
                report.points.append({"p": p, "u": u, "face": P.face_id(F), "abs_upper": _upper(v),
                                      "ratio": _upper(v) * p**s})
    return report.finish()


def check_intersect(polys: Sequence[Polynomial], p_grid: Iterable[int]) -> BoundCheckReport:
    """``dim X <= dim Y + 1`` for ``X = V(f_1..f_(d-1))`` and ``Y = V(f_1..f_d)``.

    The polynomials must share quasi-homogeneous weights and ``f_d`` must be
    nonconstant.
    """
    p_grid = list(p_grid)
    report = BoundCheckReport("locus-intersection", {"p": p_grid, "count": len(polys)})
    if not polys:
        raise ValueError("need at least one polynomial")
    if len(polys[-1].total_degrees() - {0}) == 0:
        raise ValueError("last polynomial must be nonconstant")
    w = common_quasi_weights([g for g in polys if not g.is_zero()])
    if w is None:
        report.violations.append("polynomials do not share quasi-homogeneous weights")
        return report
    report.grid["weights"] = tuple(w.weights)
    X = locus_dimension(list(polys[:-1]), p_grid)
    Y = locus_dimension(list(polys), p_grid)
    report.points.append({"dim_X": X.d, "dim_Y": Y.d, "X_status": X.status, "Y_status": Y.status,
                          "ratio": None})
    if X.d is None or Y.d is None:
        report.notes.append("dimension estimate inconclusive")
    elif X.d > Y.d + 1:
        report.violations.append(f"dim X = {X.d} exceeds dim Y + 1 = {Y.d + 1}")
    return report


def check_intersect_and_fg(f: Polynomial, p_grid: Iterable[int] = (7, 11, 13, 17, 19, 23)) -> BoundCheckReport:
    """Critical loci of ``f`` and ``f(x1 y, x2, ..)``: ``dim C_g <= dim C_f + 1``."""
    from .poly import substitute_torus

    f, note = normalize_constant(f)
    p_grid = list(p_grid)
    report = BoundCheckReport("critical-locus-growth", {"p": p_grid})
    if note:
        report.notes.append(note)
    if quasi_weights(f) is None:
        raise ValueError("polynomial is not quasi-homogeneous")
    if not _zero_is_critical(f):
        raise ValueError("0 is not a critical point")
    g = substitute_torus(f, 1)
    Cf = critical_dim_estimate(f, p_grid)
    Cg = critical_dim_estimate(g, p_grid)
    report.points.append({"dim_C_f": Cf.d, "dim_C_g": Cg.d, "counts_f": Cf.counts,
                          "counts_g": Cg.counts, "ratio": None})
    if Cf.d is None or Cg.d is None:
        report.notes.append("dimension estimate inconclusive")
    elif Cg.d > Cf.d + 1:
        report.violations.append(f"dim C_g = {Cg.d} exceeds dim C_f + 1 = {Cf.d + 1}")
    # the same statement through the intersection lemma on the partials
    parts = [f.partial(j) for j in range(f.n)]
    if len(parts) > 1 and not parts[0].is_zero():
        sub = check_intersect(parts[1:] + parts[:1], p_grid)
        report.notes.extend(sub.notes)
        report.violations.extend(sub.violations)
    return report


@dataclass(frozen=True)
class TrivlemVerdict:
    case: str  # "critical" | "linear"
    zero_critical: bool
    linear_terms: tuple
    exclusive: bool


def check_trivlem(f: Polynomial) -> TrivlemVerdict:
    """Exactly one of: ``0`` is critical, or ``f`` has a nonzero term ``a x_i``."""
    if not (f.total_degrees() - {0}):
        raise ValueError("constant polynomial")
    if quasi_weights(normalize_constant(f)[0]) is None:
        raise ValueError("polynomial is not quasi-homogeneous")
    linear = tuple(sorted(e.index(1) + 1 for e, c in f.items() if sum(e) == 1))
    critical = _zero_is_critical(f)
    exclusive = critical != bool(linear)
    return TrivlemVerdict("critical" if critical else "linear", critical, linear, exclusive)


def check_mt2(h: Polynomial, p_grid: Iterable[int], m_grid: Iterable[int] = (1, 2),
              dim_grid: Iterable[int] | None = None, u_policy=twists_for) -> BoundCheckReport:
    """Fit ``c`` in ``|S| < c p^(m (d-n)/2) m^(n-1)`` for ``m = 1, 2``.

    When ``0`` is not critical the sums must vanish exactly at primes not
    dividing the linear coefficients.
    """
    h, note = normalize_constant(h)
    if quasi_weights(h) is None:
        raise ValueError("polynomial is not quasi-homogeneous")
    p_grid, m_grid = list(p_grid), list(m_grid)
    verdict = check_trivlem(h)
    report = BoundCheckReport("order-one-two", {"p": p_grid, "m": m_grid, "n": h.n,
                                                "case": verdict.case})
    if note:
        report.notes.append(note)
    if verdict.case == "linear":
        lin = [c for e, c in h.items() if sum(e) == 1]
        for p in p_grid:
            if all(c % p == 0 for c in lin):
                report.notes.append(f"p={p} excluded: divides every linear coefficient")
                continue
            for m in m_grid:
                for u in u_policy(p):
                    v = S_sum(h, p, m, u)
                    report.points.append({"p": p, "m": m, "u": u, "exact_zero": v.exact_zero,
                                          "ratio": 0.0 if v.exact_zero else _upper(v)})
                    if not v.exact_zero:
                        report.violations.append(f"S nonzero at p={p}, m={m}, u={u}")
        return report.finish()
    dim = critical_dim_estimate(h, dim_grid if dim_grid is not None else p_grid)
    report.grid["d"] = dim.d
    if dim.d is None:
        report.violations.append("dimension estimate inconclusive")
        return report
    expo = (dim.d - h.n) / 2
    for p in p_grid:
        for m in m_grid:
            shape = float(p) ** (m * expo) * m ** (h.n - 1)
            for u in u_policy(p):
                v = S_sum(h, p, m, u)
                report.points.append({"p": p, "m": m, "u": u, "abs_upper": _upper(v),
                                      "ratio": _upper(v) / shape})
    return report.finish()
