from fractions import Fraction

from hypothesis import strategies as st

from painleve_atlas.symcore import Polynomial, RationalFunction, var

VARS = [var(n) for n in ("x", "y", "w", "t")]

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4).filter(lambda c: c != 0)
monomials = st.dictionaries(st.sampled_from(VARS), st.integers(0, 3), max_size=3)


@st.composite
def polynomials(draw, max_terms=4):
    out = Polynomial()
    for _ in range(draw(st.integers(0, max_terms))):
        out = out + Polynomial.monomial(draw(monomials), draw(coeffs))
    return out


@st.composite
def nonzero_polynomials(draw, max_terms=3):
    p = draw(polynomials(max_terms))
    return p if not p.is_zero() else Polynomial.constant(Fraction(draw(coeffs)))


@st.composite
def rational_functions(draw):
    return RationalFunction(draw(polynomials(3)), draw(nonzero_polynomials(2)))


@st.composite
def laurent_bindings(draw):
    """Small substitutions ``x, y -> polynomial / monomial`` in the other variables."""
    out = {}
    for v in VARS[:2]:
        num = Polynomial()
        for _ in range(draw(st.integers(1, 2))):
            exps = draw(st.dictionaries(st.sampled_from(VARS[2:]), st.integers(0, 2), max_size=2))
            num = num + Polynomial.monomial(exps, draw(coeffs))
        den = Polynomial.monomial(draw(st.dictionaries(st.sampled_from(VARS[2:]), st.integers(0, 2), max_size=1)))
        out[v] = RationalFunction(num if not num.is_zero() else Polynomial.constant(1), den)
    return out
