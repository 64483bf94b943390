import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import igusa_lab.charsums as cs
from igusa_lab.charsums import (E_sum, E_sum_ext, S_sum, S_sum_laurent, T_sum, ValueHistogram,
                                affine_sum_ext, magnitude, unit_box_sum)
from igusa_lab.kernels import BudgetExceeded
from igusa_lab.poly import parse_polynomial
from oracles import gauss_sum, naive_E, naive_ext_sum, naive_S, naive_T, naive_sum, box
from strategies import polynomials

TOL = 1e-9
small_primes = st.sampled_from([2, 3, 5, 7])


def P(text, n):
    return parse_polynomial(text, n)


def close(v, expected, tol=TOL):
    return abs(v.complex_value - expected) <= v.abs_error + tol


class TestExamples:
    def test_gauss_square(self):
        v = S_sum(P("x1^2", 1), 5, 1)
        mag, err = magnitude(v)
        assert abs(mag - 5 ** -0.5) < 1e-12 and err < 1e-12
        assert close(v, gauss_sum(5) / 5)

    def test_square_level_two(self):
        mag, _ = magnitude(S_sum(P("x1^2", 1), 7, 2))
        assert abs(mag - 1 / 7) < 1e-12

    def test_level_zero(self):
        v = S_sum(P("x1^3 + x1*x2", 2), 5, 0)
        assert v.complex_value == 1 and magnitude(v) == (1.0, 0.0)

    def test_local_level_one(self):
        for p in (3, 5):
            v = T_sum(P("x1^2 + x1*x2 + x2^5", 2), p, 1)
            assert close(v, p**-2)

    def test_local_square(self):
        assert close(T_sum(P("x1^2", 1), 5, 2), 1 / 5)

    def test_local_linear_vanishes(self):
        v = T_sum(P("x1", 1), 5, 2)
        assert v.exact_zero and magnitude(v) == (0.0, 0.0)

    def test_torus_linear(self):
        for p in (2, 3, 5, 11):
            v = E_sum(P("x1", 1), p)
            assert close(v, -1 / (p - 1))

    def test_torus_square(self):
        assert close(E_sum(P("x1^2", 1), 5), (gauss_sum(5) - 1) / 4)

    def test_torus_cusp(self):
        f = P("x1^2 + x2^3", 2)
        assert close(E_sum(f, 7), naive_E(f, 7))

    def test_extension_linear(self):
        assert close(E_sum_ext(P("x1", 1), 4), -1 / 3)

    def test_extension_square(self):
        v = E_sum_ext(P("x1^2", 1), 9)
        assert close(v, naive_ext_sum(P("x1^2", 1), 3, [1, 0, 1], affine=False))
        a = affine_sum_ext(P("x1^2", 1), 9)
        assert abs(magnitude(a)[0] - 9 ** -0.5) < 1e-12

    def test_extension_product(self):
        h = P("x1*x2", 2)
        assert close(E_sum_ext(h, 4), naive_ext_sum(h, 2, [1, 1, 1], affine=False))

    def test_laurent_examples(self):
        assert abs(magnitude(S_sum_laurent(P("x1^2", 1), 5, 1))[0] - 5 ** -0.5) < 1e-12
        assert S_sum_laurent(P("x1", 1), 3, 2).exact_zero
        assert S_sum_laurent(P("x1^2", 1), 3, 0).complex_value == 1

    def test_errors(self):
        with pytest.raises(ValueError):
            S_sum(P("x1", 1), 4, 1)
        with pytest.raises(ValueError):
            S_sum(P("x1", 1), 5, 1, u=10)
        with pytest.raises(BudgetExceeded):
            S_sum(P("x1*x2*x3", 3), 7, 2, budget=1000)


class TestAgainstBruteForce:
    @settings(max_examples=40, deadline=None)
    @given(polynomials(n=2, max_exp=3), small_primes, st.integers(1, 2), st.data())
    def test_global_and_local(self, f, p, m, data):
        u = data.draw(st.sampled_from([u for u in range(1, p**m) if u % p]))
        assert close(S_sum(f, p, m, u), naive_S(f, p, m, u))
        assert close(T_sum(f, p, m, u), naive_T(f, p, m, u))

    @settings(max_examples=40, deadline=None)
    @given(polynomials(max_exp=3), st.sampled_from([3, 5, 7]), st.data())
    def test_torus(self, f, p, data):
        u = data.draw(st.integers(1, p - 1))
        assert close(E_sum(f, p, u), naive_E(f, p, u))

    @settings(max_examples=15, deadline=None)
    @given(polynomials(n=2, max_exp=2, max_terms=3), st.sampled_from([(4, 2, [1, 1, 1]), (9, 3, [1, 0, 1])]),
           st.booleans())
    def test_extensions(self, h, field, affine):
        q, p, mod = field
        fn = affine_sum_ext if affine else E_sum_ext
        assert close(fn(h, q), naive_ext_sum(h, p, mod, affine))

    @settings(max_examples=25, deadline=None)
    @given(polynomials(n=2, max_exp=3), st.sampled_from([2, 3]), st.integers(1, 2))
    def test_unit_box(self, F, p, level):
        M = p**level
        units = [a for a in range(M) if a % p]
        s, _ = naive_sum(F, box(units, F.n), M)
        assert close(unit_box_sum(F, p, level), s / M**F.n)


class TestInvariants:
    @settings(max_examples=40, deadline=None)
    @given(polynomials(max_exp=3), small_primes, st.integers(1, 2))
    def test_histogram_mass(self, f, p, m):
        if p ** (m * f.n) > 5000:
            m = 1
        assert S_sum(f, p, m).total == p ** (m * f.n)
        assert T_sum(f, p, m).total == p ** ((m - 1) * f.n)
        assert E_sum(f, p).total == (p - 1) ** f.n
        assert S_sum_laurent(f, p, m).total == p ** (m * f.n)

    @settings(max_examples=40, deadline=None)
    @given(polynomials(max_exp=3), small_primes, st.integers(1, 2))
    def test_trivial_bound(self, f, p, m):
        for v in (S_sum(f, p, m), T_sum(f, p, m), E_sum(f, p), S_sum_laurent(f, p, m)):
            mag, err = magnitude(v)
            assert mag <= 1 + err
            assert abs(v.complex_value) <= float(v.normalization) * v.total + v.abs_error

    @settings(max_examples=40, deadline=None)
    @given(polynomials(n=2, max_exp=3), small_primes, st.integers(1, 2), st.data())
    def test_unit_twist_equivalence(self, f, p, m, data):
        M = p**m
        u = data.draw(st.sampled_from([u for u in range(1, M) if u % p]))
        twisted = S_sum(f, p, m, u)
        scaled = S_sum((f * u).mod(M), p, m, 1)
        assert twisted.histogram == scaled.histogram
        assert twisted.complex_value == pytest.approx(scaled.complex_value, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(polynomials(max_exp=3), st.sampled_from([2, 3, 5, 7]))
    def test_laurent_matches_prime_field_at_level_one(self, f, p):
        a, _ = magnitude(S_sum(f, p, 1))
        b, _ = magnitude(S_sum_laurent(f, p, 1))
        assert S_sum(f, p, 1).histogram == S_sum_laurent(f, p, 1).histogram
        assert a == b

    @settings(max_examples=25, deadline=None)
    @given(polynomials(n=3, max_exp=3), st.sampled_from([3, 5]), st.sampled_from([1, 7, 64, 1000]))
    def test_chunking_does_not_change_histograms(self, f, p, chunk):
        ref = S_sum(f, p, 1, separate=False)
        got = S_sum(f, p, 1, separate=False, chunk_size=chunk)
        assert got.histogram == ref.histogram
        assert got.complex_value == ref.complex_value
        assert E_sum_ext(f, 4, chunk_size=chunk).histogram == E_sum_ext(f, 4).histogram

    @settings(max_examples=25, deadline=None)
    @given(polynomials(n=3, max_exp=3), st.sampled_from([3, 5]))
    def test_block_splitting_matches_joint_sum(self, f, p):
        a = S_sum(f, p, 1)
        b = S_sum(f, p, 1, separate=False)
        assert a.histogram == b.histogram
        assert a.exact_zero == b.exact_zero
        assert abs(a.complex_value - b.complex_value) <= a.abs_error + b.abs_error

    @settings(max_examples=40, deadline=None)
    @given(st.sampled_from([(2, 3), (3, 2), (5, 1), (7, 1)]), st.data())
    def test_exact_zero_test(self, mod, data):
        p, k = mod
        M = p**k
        counts = data.draw(st.lists(st.integers(0, 3), min_size=M, max_size=M))
        dense = np.array(counts, dtype=np.int64)
        nz = np.flatnonzero(dense)[::-1]
        h = ValueHistogram(M, nz, dense[nz], p)
        verdict = h.is_zero_sum()
        saved, cs.DENSE_ZERO_TEST_LIMIT = cs.DENSE_ZERO_TEST_LIMIT, 0
        try:
            assert h.is_zero_sum() == verdict
        finally:
            cs.DENSE_ZERO_TEST_LIMIT = saved
        z = sum(c * cmath.exp(2j * math.pi * a / M) for a, c in enumerate(counts))
        if verdict:
            assert abs(z) < 1e-9
        else:
            # nonzero algebraic integer: |norm| >= 1 and conjugates are <= 3M, so |z| >= (3M)^(1-phi(M))
            assert abs(z) > 1e-12

    def test_normalization_is_exact(self):
        v = S_sum(P("x1^2 + x2", 2), 3, 2)
        assert v.normalization == Fraction(1, 9**2)
