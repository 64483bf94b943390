import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from igusa_lab.newton import (EnumerationLimitError, affine_rank, enumerate_faces, face_contains,
                              face_dimension, is_nondegenerate_at, min_and_face, newton_polyhedron,
                              nondegenerate_for_prime, sigma_kappa)
from igusa_lab.poly import parse_polynomial, substitute_torus
from oracles import covector_faces
from strategies import nonzero_origin_free

CUSP = [(2, 0), (0, 3)]


def P(text, n):
    return parse_polynomial(text, n)


def keys(faces):
    return {F.key for F in faces}


class TestMinAndFace:
    def test_vertex(self):
        N, F = min_and_face(CUSP, (1, 1))
        assert N == 2 and F.support_points == {(2, 0)} and F.compact

    def test_edge(self):
        N, F = min_and_face(CUSP, (3, 2))
        assert N == 6 and F.support_points == {(2, 0), (0, 3)} and F.dim == 1

    def test_zero_covector_gives_whole_polyhedron(self):
        N, F = min_and_face(CUSP, (0, 0))
        assert N == 0 and F.recession_dirs == {0, 1} and F.dim == 2

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            min_and_face(CUSP, (-1, 2))


class TestFaces:
    def test_cusp_has_six_faces(self):
        faces = enumerate_faces(CUSP)
        assert len(faces) == 6
        assert sorted(F.dim for F in faces) == [0, 0, 1, 1, 1, 2]
        assert sum(F.compact for F in faces) == 3

    def test_one_variable(self):
        faces = enumerate_faces([(2,)])
        assert len(faces) == 2
        assert {F.dim for F in faces} == {0, 1}

    def test_linear_form_has_unbounded_edges(self):
        # k = (0, 1) has minimizer set {(1,0)} and zero set {e1}: the ray (1,0) + R+ e1 is a face
        faces = enumerate_faces([(1, 0), (0, 1)])
        assert keys(faces) == covector_faces([(1, 0), (0, 1)], 3)
        assert len(faces) == 6

    def test_dimensions(self):
        faces = {F.label(): F for F in enumerate_faces(CUSP)}
        assert face_dimension(faces["conv{(2,0)}"]) == 0
        assert face_dimension(faces["conv{(2,0)}+R+<e1>"]) == 1
        assert face_dimension(faces["conv{(2,0),(0,3)}+R+<e1,e2>"]) == 2

    def test_witnesses_are_exact(self):
        for F in enumerate_faces([(4, 0), (1, 1), (0, 3), (2, 2)]):
            N, G = min_and_face([(4, 0), (1, 1), (0, 3), (2, 2)], F.witness)
            assert G == F and N == F.min_value
            assert all(Fraction(a).denominator == 1 for a in F.witness)
            assert F.compact == all(a > 0 for a in F.witness)

    def test_limit(self):
        pts = [(i, 15 - i) for i in range(15)]
        with pytest.raises(EnumerationLimitError):
            enumerate_faces(pts)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(any),
                    min_size=1, max_size=5, unique=True))
    def test_against_covector_scan(self, support):
        D = 3 * max(max(s) for s in support)
        assert keys(enumerate_faces(support)) == covector_faces(support, D)

    @settings(max_examples=30, deadline=None)
    @given(nonzero_origin_free(max_terms=4))
    def test_lattice_completeness(self, f):
        faces = keys(newton_polyhedron(f).faces)
        rng = random.Random(len(f) * 7919 + f.n)
        for _ in range(200):
            k = [rng.randint(0, 20) for _ in range(f.n)]
            assert min_and_face(f.support(), k)[1].key in faces

    @settings(max_examples=40, deadline=None)
    @given(nonzero_origin_free(max_terms=4))
    def test_face_invariants(self, f):
        for F in newton_polyhedron(f).faces:
            assert F.support_points
            assert F.compact == (not F.recession_dirs)
            v0 = next(iter(F.support_points))
            diffs = [tuple(a - b for a, b in zip(s, v0)) for s in F.support_points]
            rec = [tuple(int(i == j) for i in range(f.n)) for j in F.recession_dirs]
            assert F.dim == affine_rank(diffs + rec)


class TestSigmaKappa:
    def test_cusp(self):
        d = sigma_kappa(CUSP)
        assert d.sigma == Fraction(5, 6) and d.kappa == 1
        assert d.F0.support_points == set(CUSP) and d.F0.compact

    def test_square(self):
        d = sigma_kappa([(2,)])
        assert d.sigma == Fraction(1, 2) and d.kappa == 1 and d.F0.support_points == {(2,)}

    def test_quadric(self):
        d = sigma_kappa([(2, 0), (0, 2)])
        assert d.sigma == 1 and d.kappa == 1 and d.F0.dim == 1

    def test_diagonal_through_vertex(self):
        d = sigma_kappa([(1, 1)])
        assert d.sigma == 1 and d.kappa == 2 and d.F0.dim == 0

    def test_origin_rejected(self):
        with pytest.raises(ValueError):
            sigma_kappa([(0, 0), (1, 1)])

    @settings(max_examples=40, deadline=None)
    @given(nonzero_origin_free(max_terms=4))
    def test_diagonal_properties(self, f):
        P_ = newton_polyhedron(f)
        d = sigma_kappa(f.support())
        t = d.t_star
        assert d.sigma > 0 and d.sigma == 1 / t
        assert sum(d.weights.values()) == 1
        for j in range(f.n):
            assert sum(w * s[j] for s, w in d.weights.items()) <= t
        diag = (t,) * f.n
        assert face_contains(d.F0, diag)
        for F in P_.faces:
            if F < d.F0:
                assert not face_contains(F, diag)
        # no smaller diagonal point is in the polyhedron
        whole = P_.whole
        assert not face_contains(whole, (t * Fraction(99, 100),) * f.n)
        assert d.kappa == f.n - d.F0.dim

    @settings(max_examples=30, deadline=None)
    @given(nonzero_origin_free(max_terms=4), st.data())
    def test_torus_substitution_support_bijection(self, f, data):
        i = data.draw(st.integers(1, f.n))
        g = substitute_torus(f, i)
        assert g.support() == {e + (e[i - 1],) for e in f.support()}


class TestNondegeneracy:
    def test_cusp_at_seven(self):
        f = P("x1^2+x2^3", 2)
        certs = nondegenerate_for_prime(f, newton_polyhedron(f).faces, 7)
        assert len(certs) == 3 and all(c.passes for c in certs)

    def test_square_of_linear_form(self):
        f = P("x1^2 + 2*x1*x2 + x2^2", 2)
        edge = next(F for F in newton_polyhedron(f).compact_faces if F.dim == 1)
        (c,) = nondegenerate_for_prime(f, [edge], 5)
        assert not c.passes
        x1, x2 = c.critical_point
        assert (x1 + x2) % 5 == 0

    def test_characteristic_two(self):
        assert not is_nondegenerate_at(P("x1^2", 1), 2)
        assert is_nondegenerate_at(P("x1^2", 1), 3)

    def test_requires_prime(self):
        with pytest.raises(ValueError):
            nondegenerate_for_prime(P("x1", 1), [], 4)
