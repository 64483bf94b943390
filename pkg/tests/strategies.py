from hypothesis import strategies as st

from igusa_lab.poly import Polynomial


@st.composite
def polynomials(draw, n=None, max_exp=4, max_terms=5, coeff=5, constant=True):
    n = draw(st.integers(1, 3)) if n is None else n
    exps = st.tuples(*[st.integers(0, max_exp)] * n)
    if not constant:
        exps = exps.filter(lambda e: any(e))
    terms = draw(st.dictionaries(exps, st.integers(-coeff, coeff).filter(bool), max_size=max_terms))
    return Polynomial(n, terms)


@st.composite
def nonzero_origin_free(draw, n=None, max_exp=4, max_terms=5):
    f = draw(polynomials(n=n, max_exp=max_exp, max_terms=max_terms, constant=False)
             .filter(lambda g: not g.is_zero()))
    return f
