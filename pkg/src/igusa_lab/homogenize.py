"""Turning a quasi-homogeneous polynomial into a homogeneous one by torus substitutions.

Substituting ``x_i -> x_i y`` with a fresh variable ``y`` raises the total
degree of each term by its ``x_i`` exponent.  Doing this ``a_i - 1`` times for
every variable makes each term have total degree ``sum a_i e_i = d``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .charsums import E_sum
from .newton import newton_polyhedron, nondegenerate_for_prime
from .poly import Polynomial, QuasiWeights, normalize_constant, quasi_weights, substitute_torus

__all__ = [
    "ChainStep",
    "HomogenizationChain",
    "homogenization_chain",
    "verify_sigma_invariance",
    "verify_nondeg_transport",
    "verify_torus_sum_invariance",
]


class NotQuasiHomogeneous(ValueError):
    pass


@dataclass(frozen=True)
class ChainStep:
    variable: int  # 1-based original variable that was substituted
    repetition: int  # 1 .. a_i - 1
    new_variable: int  # 1-based index of the appended variable
    poly: Polynomial


@dataclass(frozen=True)
class HomogenizationChain:
    start: Polynomial
    weights: QuasiWeights
    steps: tuple[ChainStep, ...]

    @property
    def final(self) -> Polynomial:
        return self.steps[-1].poly if self.steps else self.start

    @property
    def total_new_vars(self) -> int:
        return len(self.steps)

    @property
    def stages(self) -> list[Polynomial]:
        return [self.start] + [s.poly for s in self.steps]


def homogenization_chain(f: Polynomial) -> HomogenizationChain:
    """Substitute each variable ``a_i - 1`` times, in increasing variable order."""
    f, _ = normalize_constant(f)
    if f.is_zero():
        raise NotQuasiHomogeneous("zero polynomial")
    w = quasi_weights(f)
    if w is None:
        raise NotQuasiHomogeneous(f"{f} is not quasi-homogeneous")
    steps = []
    g = f
    for i, a in enumerate(w.weights, start=1):
        for r in range(1, a):
            g = substitute_torus(g, i)
            steps.append(ChainStep(i, r, g.n, g))
    chain = HomogenizationChain(f, w, tuple(steps))
    if not chain.final.is_homogeneous():
        raise AssertionError("homogenization chain did not end homogeneous")
    return chain


@dataclass
class InvarianceVerdict:
    name: str
    holds: bool
    per_stage: list = field(default_factory=list)
    notes: list[str] = field(default_factory=list)


def verify_sigma_invariance(chain: HomogenizationChain) -> InvarianceVerdict:
    """``sigma`` is the same exact rational at every stage."""
    sigmas: list[Fraction] = [newton_polyhedron(g).sigma for g in chain.stages]
    return InvarianceVerdict("sigma", len(set(sigmas)) == 1, sigmas)


def verify_nondeg_transport(chain: HomogenizationChain, p: int) -> InvarianceVerdict:
    """Nondegeneracy on compact faces at ``p`` carries over from each stage to the next.

    A stage that is degenerate while its predecessor is not is reported as a
    counterexample candidate; a degenerate start makes the claim vacuous.
    """
    flags = []
    for g in chain.stages:
        P = newton_polyhedron(g)
        flags.append(all(c.passes for c in nondegenerate_for_prime(g, P.compact_faces, p)))
    verdict = InvarianceVerdict("nondegeneracy", True, flags)
    if not flags[0]:
        verdict.notes.append(f"start is degenerate at p={p}; transport is vacuous")
    for j in range(1, len(flags)):
        if flags[j - 1] and not flags[j]:
            verdict.holds = False
            verdict.notes.append(f"stage {j} degenerate at p={p} after nondegenerate stage {j - 1}")
    return verdict


def verify_torus_sum_invariance(chain: HomogenizationChain, p: int, u: int = 1) -> InvarianceVerdict:
    """Torus value histograms agree at every stage up to the factor ``(p-1)^(new vars)``.

    Each step is split into adding a dummy variable and the torus substitution;
    both must leave the normalized torus sum unchanged, which at histogram level
    means counts scale by exactly ``p - 1``.
    """
    base = E_sum(chain.start, p, u).histogram.as_dict()
    verdict = InvarianceVerdict("torus-sum", True)
    prev = chain.start
    for j, g in enumerate(chain.stages[1:], start=1):
        scale = (p - 1) ** j
        expected = {a: c * scale for a, c in base.items()}
        dummy = E_sum(prev.extend(1), p, u).histogram.as_dict()
        subst = E_sum(g, p, u).histogram.as_dict()
        ok_dummy = dummy == expected
        ok_subst = subst == expected
        verdict.per_stage.append({"stage": j, "dummy": ok_dummy, "substituted": ok_subst})
        if not (ok_dummy and ok_subst):
            verdict.holds = False
            verdict.notes.append(f"histogram mismatch at stage {j}, p={p}, u={u}")
        prev = g
    return verdict
