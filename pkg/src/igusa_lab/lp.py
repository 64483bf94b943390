"""Exact rational linear programming.

A dense two-phase simplex over :class:`fractions.Fraction` with Bland's
anti-cycling rule.  Problems are stated as

    minimize  c . x   subject to   rows,  x >= 0

where every row is ``(coeffs, sense, rhs)`` with sense one of ``"<="``,
``">="`` or ``"=="``.  The solver is deterministic: the same problem always
yields the same basic optimal solution.

Infeasible problems come back with a Farkas certificate ``z`` (one multiplier
per original row) satisfying

    sum_i z_i a_i <= 0 componentwise,   sum_i z_i b_i > 0,
    z_i <= 0 on "<=" rows,  z_i >= 0 on ">=" rows,

which :func:`check_farkas` verifies independently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

__all__ = [
    "RationalLP",
    "LPResult",
    "lp_solve",
    "check_farkas",
]

SENSES = ("<=", ">=", "==")


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass
class RationalLP:
    """``minimize objective . x`` over ``x >= 0`` subject to ``rows``."""

    objective: list[Fraction]
    rows: list[tuple[list[Fraction], str, Fraction]] = field(default_factory=list)

    def __post_init__(self):
        self.objective = [_frac(c) for c in self.objective]
        rows = []
        for coeffs, sense, rhs in self.rows:
            if sense not in SENSES:
                raise ValueError(f"unknown row sense {sense!r}")
            if len(coeffs) != len(self.objective):
                raise ValueError("row length does not match objective length")
            rows.append(([_frac(a) for a in coeffs], sense, _frac(rhs)))
        self.rows = rows

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    def add_row(self, coeffs: Sequence, sense: str, rhs) -> None:
        if sense not in SENSES:
            raise ValueError(f"unknown row sense {sense!r}")
        if len(coeffs) != self.num_vars:
            raise ValueError("row length does not match objective length")
        self.rows.append(([_frac(a) for a in coeffs], sense, _frac(rhs)))


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: list[Fraction] | None = None
    value: Fraction | None = None
    certificate: list[Fraction] | None = None

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


class _Tableau:
    """Equality-form tableau ``A x = b`` with ``b >= 0`` and an explicit basis."""

    def __init__(self, A, b, basis):
        self.A = A
        self.b = b
        self.basis = basis

    def pivot(self, r: int, c: int) -> None:
        A, b = self.A, self.b
        row = A[r]
        piv = row[c]
        if piv != 1:
            inv = 1 / piv
            A[r] = row = [a * inv for a in row]
            b[r] *= inv
        for i, other in enumerate(A):
            if i == r:
                continue
            f = other[c]
            if f:
                A[i] = [a - f * ra for a, ra in zip(other, row)]
                b[i] -= f * b[r]
        self.basis[r] = c

    def reduced_costs(self, cost):
        y_terms = [(cost[bv], self.A[i]) for i, bv in enumerate(self.basis) if cost[bv]]
        red = list(cost)
        for cb, row in y_terms:
            for j, a in enumerate(row):
                if a:
                    red[j] -= cb * a
        return red

    def run(self, cost, allowed) -> str:
        """Bland's rule simplex on columns flagged in ``allowed``."""
        while True:
            red = self.reduced_costs(cost)
            entering = next((j for j in range(len(red)) if allowed[j] and red[j] < 0), None)
            if entering is None:
                return "optimal"
            best = None
            for i, row in enumerate(self.A):
                a = row[entering]
                if a > 0:
                    ratio = self.b[i] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            self.pivot(best[1], entering)


def lp_solve(lp: RationalLP) -> LPResult:
    nv = lp.num_vars
    m = len(lp.rows)
    if m == 0:
        if any(c < 0 for c in lp.objective):
            return LPResult("unbounded")
        return LPResult("optimal", [Fraction(0)] * nv, Fraction(0))

    n_slack = sum(1 for _, s, _ in lp.rows if s != "==")
    total = nv + n_slack + m  # structural, slack, artificial
    art0 = nv + n_slack
    A, b, signs = [], [], []
    slack_idx = nv
    for i, (coeffs, sense, rhs) in enumerate(lp.rows):
        row = list(coeffs) + [Fraction(0)] * (n_slack + m)
        if sense == "<=":
            row[slack_idx] = Fraction(1)
            slack_idx += 1
        elif sense == ">=":
            row[slack_idx] = Fraction(-1)
            slack_idx += 1
        sign = 1
        if rhs < 0:
            sign = -1
            row = [-a for a in row]
            rhs = -rhs
        row[art0 + i] = Fraction(1)
        A.append(row)
        b.append(rhs)
        signs.append(sign)

    tab = _Tableau(A, b, [art0 + i for i in range(m)])
    phase1_cost = [Fraction(0)] * art0 + [Fraction(1)] * m
    tab.run(phase1_cost, [True] * total)
    infeas = sum(tab.b[i] for i, bv in enumerate(tab.basis) if bv >= art0)
    if infeas > 0:
        # y = c_B B^{-1}; B^{-1} sits in the artificial columns.
        y = [Fraction(0)] * m
        for i, bv in enumerate(tab.basis):
            cb = phase1_cost[bv]
            if cb:
                for r in range(m):
                    y[r] += cb * tab.A[i][art0 + r]
        z = [yi * s for yi, s in zip(y, signs)]
        return LPResult("infeasible", certificate=z)

    # Drive zero-level artificials out of the basis; drop redundant rows.
    keep = []
    for i, bv in enumerate(tab.basis):
        if bv < art0:
            keep.append(i)
            continue
        col = next((j for j in range(art0) if tab.A[i][j] != 0), None)
        if col is None:
            continue
        tab.pivot(i, col)
        keep.append(i)
    tab.A = [tab.A[i] for i in keep]
    tab.b = [tab.b[i] for i in keep]
    tab.basis = [tab.basis[i] for i in keep]

    cost = list(lp.objective) + [Fraction(0)] * (n_slack + m)
    allowed = [j < art0 for j in range(total)]
    status = tab.run(cost, allowed)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [Fraction(0)] * nv
    for i, bv in enumerate(tab.basis):
        if bv < nv:
            x[bv] = tab.b[i]
    value = sum((c * xi for c, xi in zip(lp.objective, x)), Fraction(0))
    return LPResult("optimal", x, value)


def check_farkas(lp: RationalLP, z: Sequence[Fraction]) -> bool:
    """Verify an infeasibility certificate for ``lp`` exactly."""
    if len(z) != len(lp.rows):
        return False
    for zi, (_, sense, _) in zip(z, lp.rows):
        if sense == "<=" and zi > 0:
            return False
        if sense == ">=" and zi < 0:
            return False
    for j in range(lp.num_vars):
        if sum((zi * row[0][j] for zi, row in zip(z, lp.rows)), Fraction(0)) > 0:
            return False
    return sum((zi * row[2] for zi, row in zip(z, lp.rows)), Fraction(0)) > 0
