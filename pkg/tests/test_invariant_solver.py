import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from painleve_atlas.atlas import ChartId, sigma, xy_to_zw_map
from painleve_atlas.hamiltonian import K_TEXT
from painleve_atlas.invariant_solver import (
    PARTICULAR,
    InvariantDecomposition,
    NotInvariantError,
    assemble,
    check_invariants,
    constancy_certificate,
    decompose,
    decompose_even,
    decompose_odd,
    even_odd_split,
    push_to_xy,
    random_coefficient,
    random_decomposition,
    uniqueness_scan,
    verify_ED_identities,
)
from painleve_atlas.symcore import as_rf, parse, substitute, var

X, Y, Z, W, T, XI = (var(n) for n in ("x", "y", "z", "w", "t", "xi"))
E, D = as_rf(PARTICULAR.E), as_rf(PARTICULAR.Delta)


def test_builtin_suite_passes():
    rep = check_invariants(seed=3)
    assert rep.passed, rep.first_failure()


def test_particular_invariants_under_tau():
    assert substitute(E, PARTICULAR.tau) == E
    assert substitute(D, PARTICULAR.tau) == -D


def test_E_Delta_identities():
    rep = verify_ED_identities()
    assert rep.passed, rep.first_failure()


def test_E_through_Delta():
    # the even invariant is a polynomial in the skew one
    assert E * as_rf(XI) ** 3 == D**2 - (as_rf(T) * as_rf(XI) ** 2 + 4) ** 2


def test_even_odd_split_example():
    plus, minus = even_odd_split(parse("z + w + z*w^3 + w^2"))
    assert plus == parse("z + w^2")
    assert minus == parse("w + z*w^3")


def test_decompose_even_examples():
    dec = decompose_even((3 * E**2 + as_rf(XI)).as_polynomial())
    assert [str(c) for c in dec.even_coeffs] == ["xi", "0", "3"]
    assert dec.M == 2 and dec.N == -1


def test_decompose_odd_example():
    dec = decompose_odd((D * (as_rf(T) + E)).as_polynomial())
    assert [str(c) for c in dec.odd_coeffs] == ["t", "1"]


def test_decompose_full_example():
    K = parse("z*(w^6*z - 2*t*w^4 - 8) + w^3*(w^6*z - t*w^4 - 4)")
    dec = decompose(K)
    assert [str(c) for c in dec.even_coeffs] == ["0", "1"]
    assert [str(c) for c in dec.odd_coeffs] == ["xi"]
    assert assemble(dec) == K


def test_rejections():
    with pytest.raises(NotInvariantError) as exc:
        decompose_even(parse("z").as_polynomial())
    assert not as_rf(exc.value.witness).is_zero()
    with pytest.raises(NotInvariantError):
        decompose(parse(K_TEXT))
    with pytest.raises(ValueError):
        decompose(parse("1/w"))


def test_decompose_of_zero_is_empty():
    dec = decompose(as_rf(0))
    assert dec.M == -1 and dec.N == -1


def _y_degree(f):
    return as_rf(f).num.degree(Y)


def test_hundred_seeded_round_trips():
    rng = random.Random(20240)
    for _ in range(100):
        dec = random_decomposition(rng)
        assert dec.M <= 3 and dec.N <= 3
        K = assemble(dec)
        back = decompose(K)
        assert back.even_coeffs == dec.even_coeffs
        assert back.odd_coeffs == dec.odd_coeffs
        assert _y_degree(push_to_xy(dec)) == max(2 * dec.M, 2 * dec.N + 1)


@given(st.integers(0, 2**32))
def test_round_trip_property(seed):
    dec = random_decomposition(random.Random(seed), max_M=2, max_N=2, max_deg=3)
    back = decompose(assemble(dec))
    assert (back.even_coeffs, back.odd_coeffs) == (dec.even_coeffs, dec.odd_coeffs)


@given(st.integers(0, 2**32))
def test_push_agrees_with_chart_substitution(seed):
    """Independent route: rewrite K through the (y, w) lift and compare."""
    dec = random_decomposition(random.Random(seed), max_M=2, max_N=1, max_deg=3)
    K = assemble(dec)
    lifted = xy_to_zw_map(ChartId.ZW).pullback(K)
    assert substitute(lifted, {W: -as_rf(W)}) == lifted
    pushed = substitute(push_to_xy(dec), {X: as_rf(W) ** -2})
    assert pushed == lifted


def _t_only(K):
    return {v.name for v in as_rf(K).variables()} <= {"t"}


@given(st.integers(0, 2**32), st.booleans())
def test_constancy_exactly_for_phase_constants(seed, phase_free):
    rng = random.Random(seed)
    if phase_free:
        coeff = substitute(random_coefficient(rng), {XI: 0})
        dec = InvariantDecomposition([coeff], [])
    else:
        dec = random_decomposition(rng, max_M=2, max_N=2, max_deg=3)
    K = assemble(dec)
    verdict = constancy_certificate(K)
    assert verdict.constant == _t_only(K)


def test_constancy_verdicts():
    assert constancy_certificate(parse("t^2 - 3")).kind == "constant"
    assert constancy_certificate(parse("w^2")).kind == "has-poles-in-x"
    assert constancy_certificate(parse("z")).kind == "not-sigma-invariant"


def test_lyapunov_decomposition():
    dec = InvariantDecomposition([parse("xi*(t^2 - xi)/4"), parse("1/4")], [])
    assert push_to_xy(dec) == parse("y^2 - 4*x^3 - 2*t*x + y/x")


def test_uniqueness_scan_recovers_K():
    scan = uniqueness_scan(2, 8, 1)
    assert scan.feasible
    assert scan.particular == parse(K_TEXT)
    assert scan.phase_homogeneous == []
    assert [str(h) for h in scan.homogeneous] == ["1"]


def test_uniqueness_scan_polynomial_t():
    # with t-coefficients bounded by degree 1 the t^2 term of K is out of reach
    assert not uniqueness_scan(2, 8, 1, mode="polynomial_t").feasible
    scan = uniqueness_scan(2, 8, 2, mode="polynomial_t")
    assert scan.particular == parse(K_TEXT)
    assert [str(h) for h in scan.homogeneous] == ["1", "t", "t^2"]


def test_uniqueness_scan_bounds():
    assert not uniqueness_scan(1, 8, 1).feasible
    assert not uniqueness_scan(2, 5, 1).feasible
    assert uniqueness_scan(3, 9, 1).particular == parse(K_TEXT)


def test_uniqueness_needs_the_entire_condition():
    scan = uniqueness_scan(2, 8, 1, require_entire=False)
    assert len(scan.phase_homogeneous) > 0


def test_uniqueness_scan_invariant_rhs():
    scan = uniqueness_scan(2, 8, 1, sigma_rhs="invariant")
    assert scan.particular.is_zero() and scan.phase_homogeneous == []


def test_scan_argument_errors():
    with pytest.raises(ValueError):
        uniqueness_scan(-1, 2, 0)
    with pytest.raises(ValueError):
        uniqueness_scan(1, 2, 0, mode="complex")
