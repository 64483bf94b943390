import pytest

from igusa_lab.fields import (BUILTIN_IRREDUCIBLES, ReducibleModulusError, finite_field, is_irreducible,
                              log_tables, poly_mod)
from oracles import ext_field_elements


def test_poly_mod():
    # t^2 mod (t^2 + t + 1) over F_2 is t + 1
    assert poly_mod([0, 0, 1], [1, 1, 1], 2) == [1, 1]
    assert poly_mod([1, 1, 1], [1, 1, 1], 2) == []


@pytest.mark.parametrize("q", sorted(BUILTIN_IRREDUCIBLES))
def test_builtins_irreducible(q):
    p, irred = BUILTIN_IRREDUCIBLES[q]
    assert is_irreducible(irred, p)
    assert finite_field(q).q == q


def test_reducible_rejected():
    assert not is_irreducible((1, 0, 1), 2)  # t^2 + 1 = (t + 1)^2
    with pytest.raises(ReducibleModulusError):
        finite_field(4, (1, 0, 1))
    with pytest.raises(ValueError):
        finite_field(6)
    with pytest.raises(ValueError):
        finite_field(9, (1, 1, 0, 1))


def test_alternate_modulus_for_f9():
    F = finite_field(9, (2, 1, 1))  # t^2 + t + 2
    assert F.k == 2 and F.p == 3


@pytest.mark.parametrize("q", [4, 8, 9, 25])
def test_arithmetic_against_reference(q):
    F = finite_field(q)
    elems, mul, trace = ext_field_elements(F.p, list(F.irred))
    for a in elems:
        za = F.encode(a)
        assert F.trace(za) == trace(a)
        for b in elems[:: max(1, len(elems) // 7)]:
            assert F.digits(F.mul(za, F.encode(b))) == mul(a, b)


@pytest.mark.parametrize("q", [4, 8, 9, 16, 25, 27, 7])
def test_log_table_covers_units(q):
    F = finite_field(q)
    g, traces = log_tables(F)
    seen, z = set(), 1
    for _ in range(q - 1):
        seen.add(z)
        z = F.mul(z, g)
    assert len(seen) == q - 1 and z == 1
    # trace is F_p-linear and onto: every residue hit q/p times over all of F_q, minus Tr(0) = 0
    counts = [int((traces == r).sum()) for r in range(F.p)]
    assert counts[0] == q // F.p - 1 and all(c == q // F.p for c in counts[1:])
