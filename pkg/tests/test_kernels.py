import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import igusa_lab.kernels as kn
from igusa_lab.kernels import BudgetExceeded, block_polynomial, check_budget, value_histogram, variable_blocks
from igusa_lab.poly import parse_polynomial
from strategies import polynomials


def reference(f, domains, M):
    import itertools
    counts = {}
    for x in itertools.product(*[list(d) for d in domains]):
        a = f(x) % M
        counts[a] = counts.get(a, 0) + 1
    return counts


@settings(max_examples=40, deadline=None)
@given(polynomials(n=2, max_exp=3), st.sampled_from([(3, 2), (5, 2), (2, 4)]),
       st.sampled_from(["bincount", "dense", "merge"]), st.booleans(), st.sampled_from([1, 5, 64]))
def test_histogram_paths_agree(f, mod, path, tables, chunk):
    p, k = mod
    M = p**k
    domains = [np.arange(M), np.arange(0, M, p)]
    saved = kn.BINCOUNT_LIMIT, kn.DENSE_LIMIT, kn.TABLE_LIMIT
    try:
        if path != "bincount":
            kn.BINCOUNT_LIMIT = 0
        if path == "merge":
            kn.DENSE_LIMIT = 0
        if not tables:
            kn.TABLE_LIMIT = 0
        res, cnt = value_histogram(f, domains, M, chunk)
    finally:
        kn.BINCOUNT_LIMIT, kn.DENSE_LIMIT, kn.TABLE_LIMIT = saved
    got = dict(zip(res.tolist(), cnt.tolist()))
    assert got == reference(f, domains, M)
    assert list(res) == sorted(res)


def test_budget():
    check_budget(10, 10)
    with pytest.raises(BudgetExceeded):
        check_budget(11, 10)


def test_budget_from_environment(monkeypatch):
    monkeypatch.setenv("IGUSA_LAB_BUDGET", "5")
    with pytest.raises(BudgetExceeded):
        check_budget(6)


def test_variable_blocks():
    f = parse_polynomial("x1*x3 + x2^2 + x4 + x3^2", 5)
    blocks = variable_blocks(f)
    assert sorted(map(sorted, blocks)) == [[0, 2], [1], [3], [4]]
    g = block_polynomial(f, [0, 2], with_constant=False)
    assert g == parse_polynomial("x1*x2 + x2^2", 2)
