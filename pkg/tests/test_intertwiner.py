import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from skeintrace.cyclotomic import RootOfUnity, abs_sq
from skeintrace.intertwiner import (
    TRACE_VARIANT,
    VARIANT_ONE_MINUS_D,
    VARIANT_ONE_PLUS_D,
    NotCoprime,
    NotInvariant,
    TooLarge,
    abs_det_check,
    asymptotic_sweep,
    bezout,
    build_intertwiner,
    build_r_coeffs,
    build_verified_intertwiner,
    closed_form_for,
    closed_form_sum,
    closed_form_trace,
    gauss_sum,
    matrix_power_exact,
    periodic_power_check,
    trace_bound_holds,
    trace_independence_check,
    trace_row,
    verify_intertwining,
)
from skeintrace.quantum_torus import MappingClass, NotPeriodic
from skeintrace.torus_rep import TorusCharacter, solve_invariant_characters

EXAMPLE_A = MappingClass(2, 1, -7, -3)
THIRDS = TorusCharacter(Fraction(1, 3), Fraction(2, 3))
S = MappingClass(0, -1, 1, 0)
T = MappingClass(1, 1, 0, 1)


def brute_gauss(k, n):
    hq = cmath.exp(1j * math.pi / n)
    return sum((-hq) ** (k * t * t) for t in range(n))


@st.composite
def sl2z(draw):
    A = MappingClass.identity()
    for g in draw(st.lists(st.sampled_from([S, T, MappingClass(1, -1, 0, 1)]), min_size=1, max_size=6)):
        A = A @ g
    return A


@st.composite
def invariant_instances(draw):
    A = draw(sl2z())
    sign = draw(st.sampled_from(["plus", "minus"]))
    k1, k2 = draw(st.integers(-2, 2)), draw(st.integers(-2, 2))
    fam = solve_invariant_characters(A, sign, k1, k2)
    assume(fam.solution is not None)
    t = draw(st.fractions(min_value=0, max_value=3, max_denominator=5))
    ch = fam.character(draw(st.integers(-2, 2)), draw(st.integers(-2, 2)), t)
    n = draw(st.sampled_from([3, 5, 7, 9, 15]))
    assume(ch.ring_order(n) <= 3000)
    return A, n, ch


# weight vector -------------------------------------------------------------


def test_bezout():
    for b, n in [(1, 5), (3, 9), (5, 15), (0, 7), (-7, 9), (6, 15)]:
        m, r, s = bezout(b, n)
        assert m == math.gcd(b, n) and b * r + s * n == m


def test_b_zero_gives_delta_vector():
    ch = TorusCharacter(Fraction(1, 2), Fraction(1, 5))
    rc = build_r_coeffs(MappingClass(1, 0, 2, 1), 9, ch)
    assert rc.m == 9 and rc.n_prime == 1
    assert len(rc.support) == 1 and rc.support[0] == rc.k0


def test_example_r_coefficients_full_support():
    rc = build_r_coeffs(EXAMPLE_A, 5, THIRDS, mode="exact")
    assert rc.m == 1 and rc.n_prime == 5 and rc.k0 == 0
    assert all(v is not None for v in rc.values())


def test_r_recursion_holds():
    """r_{k+tb} = r_k v^{tb} u^{t(a-1)} q^{a(tk + b t^2/2)} for every k in the support and every t."""
    A, n = MappingClass(2, 3, 1, 2), 9
    ch = TorusCharacter(Fraction(-1, 2), Fraction(1, 2))
    rc = build_r_coeffs(A, n, ch, mode="exact")
    u, v = ch.lifts(n)
    a, b = A.a, A.b
    hq = RootOfUnity(2 * n, 1)
    vals = rc.values()
    for k in rc.support:
        for t in range(n):
            expected = vals[k] * v ** (t * b) * u ** (t * (a - 1)) * hq ** (a * (2 * t * k + b * t * t))
            assert vals[(k + t * b) % n] == expected


@pytest.mark.parametrize("A, ch, n", [
    (EXAMPLE_A, THIRDS, 9),
    (MappingClass(2, 3, 1, 2), TorusCharacter(Fraction(-1, 2), Fraction(1, 2)), 15),
    (MappingClass(5, 3, 3, 2), TorusCharacter.trivial("minus"), 9),
    (MappingClass(2, 5, 1, 3), TorusCharacter(Fraction(-1, 3), Fraction(2, 3)), 25),
])
def test_bezout_pair_independence(A, ch, n):
    base = build_r_coeffs(A, n, ch, method="step")
    for shift in range(-2, 3):
        other = build_r_coeffs(A, n, ch, method="bezout", bezout_shift=shift)
        assert other.same_values(base)


def test_non_invariant_character_rejected():
    with pytest.raises(NotInvariant):
        build_intertwiner(EXAMPLE_A, 5, TorusCharacter(Fraction(1, 7), Fraction(0)))


# intertwiner ------------------------------------------------------------------


@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(invariant_instances())
def test_intertwining_property(inst):
    A, n, ch = inst
    res = build_intertwiner(A, n, ch, mode="exact")
    assert verify_intertwining(res)
    counts = res.matrix.nnz_per_row()
    assert np.all(counts == res.n_prime) and np.all(res.matrix.nnz_per_col() == res.n_prime)
    assert abs_det_check(res).ok
    assert trace_bound_holds(res)
    if math.gcd(A.b, n) == 1:
        cmp = closed_form_for(A, n, ch).compare(res.matrix.trace())
        assert cmp[TRACE_VARIANT[ch.sign]] == "equal"


def test_identity_intertwiner_is_scalar_pattern():
    for sign in ("plus", "minus"):
        ch = TorusCharacter(Fraction(1, 5), Fraction(2, 7), sign) if sign == "plus" else TorusCharacter.trivial("minus")
        A = MappingClass.identity() if sign == "plus" else MappingClass(-1, 0, 0, -1)
        res = build_intertwiner(A, 5, ch)
        assert verify_intertwining(res)
        if sign == "plus":
            assert np.array_equal(res.matrix.mask, np.eye(5, dtype=bool))


def test_dehn_twist_example():
    ch = TorusCharacter(Fraction(0), Fraction(0))
    res = build_intertwiner(MappingClass(1, 1, 0, 1), 5, ch)
    assert verify_intertwining(res)
    with pytest.raises(NotInvariant):
        build_intertwiner(MappingClass(1, 1, 0, 1), 5, TorusCharacter(Fraction(0), Fraction(1, 3)))


def test_example_zero_and_unit_traces():
    assert build_intertwiner(EXAMPLE_A, 9, THIRDS).matrix.trace().is_zero()
    assert verify_intertwining(build_intertwiner(EXAMPLE_A, 15, THIRDS))
    minus = build_intertwiner(EXAMPLE_A, 7, TorusCharacter.trivial("minus"))
    assert minus.abs_trace_sq_exact() == 1


def test_wrong_matrix_fails_verification():
    res = build_intertwiner(EXAMPLE_A, 5, THIRDS)
    tampered = type(res)(**{**res.__dict__, "matrix": res.matrix.transpose()})
    assert not verify_intertwining(tampered)


def test_verified_builder_reports_no_fallback_on_minus():
    res, ok, fallback = build_verified_intertwiner(MappingClass(5, 3, 3, 2), 9, TorusCharacter.trivial("minus"))
    assert ok and not fallback


def test_float_mode_matches_exact():
    for A, ch, n in [(EXAMPLE_A, THIRDS, 7), (MappingClass(2, 3, 1, 2), TorusCharacter(Fraction(-1, 2), Fraction(1, 2)), 9)]:
        ex = build_intertwiner(A, n, ch, mode="exact")
        fl = build_intertwiner(A, n, ch, mode="float")
        assert verify_intertwining(fl)
        assert np.allclose(fl.complex_matrix(), ex.complex_matrix(), atol=1e-9)
        assert cmath.isclose(fl.trace_complex, ex.trace_complex, abs_tol=1e-9)


def test_float_mode_non_unit_character():
    # a continuous family member: b = 0 and A = [[1,0],[2,1]] leave lambda2 free
    ch = TorusCharacter.from_lambdas(-1, 1.7 * cmath.exp(0.3j))
    res = build_intertwiner(MappingClass(1, 0, 2, 1), 7, ch, mode="float")
    assert verify_intertwining(res)


# determinants --------------------------------------------------------------


@pytest.mark.parametrize("A, ch, n, m", [
    (MappingClass(1, 0, 2, 1), TorusCharacter(Fraction(1, 2), Fraction(1, 5)), 9, 9),
    (MappingClass(2, 3, 1, 2), TorusCharacter(Fraction(-1, 2), Fraction(1, 2)), 9, 3),
    (EXAMPLE_A, THIRDS, 5, 1),
])
def test_determinant_examples(A, ch, n, m):
    res = build_intertwiner(A, n, ch)
    det = abs_det_check(res)
    assert det.ok and det.blocks == m
    assert math.isclose(det.log_abs_det, 0.5 * n * math.log(n // m), abs_tol=1e-9)


def test_determinant_guard():
    res = build_intertwiner(MappingClass(1, 0, 2, 1), 403, TorusCharacter(Fraction(1, 2), Fraction(0)))
    with pytest.raises(TooLarge):
        abs_det_check(res)


# closed forms and Gauss sums -------------------------------------------------


@pytest.mark.parametrize("k, n, expected", [(0, 7, 49), (1, 3, 3), (6, 9, 27)])
def test_gauss_examples(k, n, expected):
    assert abs_sq(gauss_sum(k, n)).as_integer() == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(-30, 30), st.sampled_from([1, 3, 5, 9, 15, 21, 25, 27, 45]))
def test_gauss_against_brute_force(k, n):
    S = gauss_sum(k, n)
    assert cmath.isclose(S.eval_complex(), brute_gauss(k, n), abs_tol=1e-8)
    assert abs_sq(S).as_integer() == math.gcd(k, n) * n


def test_closed_form_example_sum():
    n = 7
    got = closed_form_sum(EXAMPLE_A, n, 1, 1, 1, "plus", VARIANT_ONE_MINUS_D)
    hq = cmath.exp(1j * math.pi / n)
    expected = sum((-1) ** t * hq ** (-3 * t * t + 10 * t) for t in range(n))
    assert cmath.isclose(got.eval_complex(), expected, abs_tol=1e-9)


def test_closed_form_sqrt_n_case():
    # a + d = 2 and a vanishing linear term: every summand is 1
    A = MappingClass(1, 1, 0, 1)
    for n in (3, 5, 11):
        assert closed_form_sum(A, n, 0, 0, 1, "plus", VARIANT_ONE_MINUS_D).as_integer() == n


def test_closed_form_minus_reduces_to_gauss():
    A = MappingClass(0, 1, -1, 1)  # trace 1
    for n in (5, 7, 9):
        value = closed_form_sum(A, n, 0, 0, 1, "minus", VARIANT_ONE_PLUS_D)
        assert value == gauss_sum(3, n)


def test_closed_form_needs_coprime():
    with pytest.raises(NotCoprime):
        closed_form_trace(MappingClass(2, 3, 1, 2), 9, 0, 0, 1, "plus")


def test_variant_resolution_on_examples():
    plus = build_intertwiner(EXAMPLE_A, 7, THIRDS)
    assert closed_form_for(EXAMPLE_A, 7, THIRDS).compare(plus.matrix.trace())[VARIANT_ONE_MINUS_D] == "equal"
    ch = TorusCharacter.trivial("minus")
    A = MappingClass(5, 3, 3, 2)
    minus = build_intertwiner(A, 7, ch)
    assert closed_form_for(A, 7, ch).compare(minus.matrix.trace())[VARIANT_ONE_PLUS_D] == "equal"


# periodicity and independence ----------------------------------------------


@pytest.mark.parametrize("A, sign, k", [
    (MappingClass(0, 1, -1, 0), "plus", 4),
    (MappingClass(0, 1, -1, -1), "minus", 6),
    (MappingClass(0, -1, 1, 1), "plus", 6),
    (MappingClass.identity(), "plus", 1),
])
def test_periodic_powers(A, sign, k):
    for n in (3, 5, 9):
        res = build_intertwiner(A, n, TorusCharacter.trivial(sign))
        pc = periodic_power_check(A, res)
        assert pc.k == k and pc.is_scalar and pc.unit_after_normalization


def test_periodic_power_check_rejects_hyperbolic():
    A = MappingClass(2, 1, 1, 1)
    res = build_intertwiner(A, 5, TorusCharacter.trivial("plus"))
    with pytest.raises(NotPeriodic):
        periodic_power_check(A, res)


def test_power_paths_agree():
    res = build_intertwiner(MappingClass(0, 1, -1, -1), 7, TorusCharacter.trivial("plus"))
    fast = matrix_power_exact(res.matrix, 3, method="evaluation")
    slow = matrix_power_exact(res.matrix, 3, method="product")
    assert fast.equals(slow)


@pytest.mark.parametrize("A, ch, n, lifts", [
    (EXAMPLE_A, THIRDS, 5, [(0, 0), (1, 0), (2, 3)]),
    (MappingClass(1, 0, 2, 1), TorusCharacter(Fraction(1, 2), Fraction(1, 5)), 9, [(0, 0), (3, 0), (0, 4)]),
    (MappingClass.identity(), TorusCharacter(Fraction(1, 3), Fraction(0)), 5, [(0, 0), (1, 1)]),
    (MappingClass(5, 3, 3, 2), TorusCharacter.trivial("minus"), 9, [(0, 0), (1, 2), (-1, 4)]),
])
def test_trace_independent_of_lifts(A, ch, n, lifts):
    assert trace_independence_check(A, n, ch, lifts)


# sweeps ---------------------------------------------------------------------


def test_sweep_example_family():
    sw = asymptotic_sweep(EXAMPLE_A, THIRDS, range(3, 100, 2))
    assert sw.zeros == list(range(3, 100, 6))
    assert sw.bound_ok
    assert all(r.abs_trace_sq_exact == 1 for r in sw.rows if not r.is_exact_zero)


def test_sweep_sqrt_n_rows():
    sw = asymptotic_sweep(MappingClass(1, 1, 0, 1), TorusCharacter.trivial(), [5, 7, 9])
    for r in sw.rows:
        assert r.abs_trace_sq_exact == r.n
        assert math.isclose(r.log_trace_over_n, math.log(r.n) / (2 * r.n))


def test_sweep_periodic_rows():
    sw = asymptotic_sweep(MappingClass(0, 1, -1, 0), TorusCharacter.trivial(), [3, 5, 7])
    assert sw.max_log_trace_over_n == 0.0


def test_trace_row_paths_agree():
    for path in ("closed", "exact", "float"):
        row = trace_row(EXAMPLE_A, 7, THIRDS, path=path, verify=path != "float")
        assert math.isclose(row.abs_trace, 1.0, abs_tol=1e-9)
        if row.verified is not None:
            assert row.verified
