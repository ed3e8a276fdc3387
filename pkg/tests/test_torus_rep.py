import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from skeintrace.cyclotomic import CycInt, RootOfUnity
from skeintrace.exactmat import ScaledPermMatrix
from skeintrace.quantum_torus import MappingClass, QTElement, fg_image
from skeintrace.torus_rep import (
    EvenLevel,
    NotDegenerate,
    TooSmall,
    TorusCharacter,
    build_rho,
    classical_shadow_check,
    decompose_subreps,
    evaluate_qt,
    invariance_integers,
    solve_invariant_characters,
)

odd_n = st.sampled_from([1, 3, 5, 7, 9])
angles = st.fractions(min_value=-2, max_value=2, max_denominator=7)


def q_of(n):
    return cmath.exp(2j * math.pi / n)


def test_build_rho_small_cases():
    X, Y = build_rho(1, RootOfUnity(4, 1), RootOfUnity(6, 1))
    assert np.allclose(X.to_complex(), [[1j]])
    assert np.allclose(Y.to_complex(), [[cmath.exp(1j * math.pi / 3)]])
    X, _ = build_rho(3, RootOfUnity(1, 0), RootOfUnity(1, 0))
    q = q_of(3)
    assert np.allclose(X.to_complex(), np.diag([1, q, q * q]))


def test_build_rho_rejects_even():
    with pytest.raises(EvenLevel):
        build_rho(4, RootOfUnity(1), RootOfUnity(1))


@given(odd_n, st.integers(0, 29), st.integers(0, 29))
def test_q_commutation_and_nth_powers(n, eu, ev):
    u, v = RootOfUnity(30, eu), RootOfUnity(30, ev)
    X, Y = build_rho(n, u, v)
    q = ScaledPermMatrix.identity(n, n).scale(RootOfUnity(n, 1))
    assert (X @ Y).equals(q @ Y @ X)
    I = ScaledPermMatrix.identity(n, 1)
    assert X.power(n).equals(I.scale(u**n))
    assert Y.power(n).equals(I.scale(v**n))


def test_relation_q_commutation_n5():
    X, Y = build_rho(5, RootOfUnity(10, 1), RootOfUnity(10, 3))
    lhs = (X @ Y).to_dense()
    rhs = (Y @ X).scale(RootOfUnity(5, 1))
    assert (lhs - rhs).is_zero()


def test_evaluate_qt_examples():
    n = 3
    X, Y = build_rho(n, RootOfUnity(1), RootOfUnity(1))
    assert evaluate_qt(X, Y, QTElement.one(n)).equals(ScaledPermMatrix.identity(n, 6))
    assert evaluate_qt(X, Y, QTElement.monomial(1, 0, n)).equals(X)
    # (1,1) curve: q^{-1/2} (XY + X^-1 Y^-1) straight from the theta definition;
    # equivalently q^{-1/2} XY + q^{1/2} (XY)^-1
    Xc, Yc = X.to_complex(), Y.to_complex()
    hq = cmath.exp(-1j * math.pi / n)
    Xi, Yi = np.linalg.inv(Xc), np.linalg.inv(Yc)
    expected = hq * (Xc @ Yc + Xi @ Yi)
    assert np.allclose(expected, hq * Xc @ Yc + np.linalg.inv(hq * Xc @ Yc))
    assert np.allclose(evaluate_qt(X, Y, fg_image(1, 1, n)).to_complex(), expected)


@settings(max_examples=40, deadline=None)
@given(odd_n, st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_evaluate_qt_is_multiplicative(n, a, b, c, d):
    X, Y = build_rho(n, RootOfUnity(6, 1), RootOfUnity(10, 3))
    x, y = QTElement.monomial(a, b, n), QTElement.monomial(c, d, n)
    lhs = evaluate_qt(X, Y, x * y)
    rhs = evaluate_qt(X, Y, x) @ evaluate_qt(X, Y, y)
    assert lhs.equals(rhs)


def test_lifts_satisfy_branch_equations():
    for sign in ("plus", "minus"):
        ch = TorusCharacter(Fraction(1, 3), Fraction(-2, 5), sign, 1, -2)
        for n in (3, 5, 9):
            u, v = ch.lifts(n)
            l1, l2 = ch.lambdas()
            e = 1 if sign == "plus" else -1
            assert u**n == -(l1**e)
            assert v**n == -(l2**e)


def test_shadow_examples():
    ch = TorusCharacter(Fraction(1, 3), Fraction(2, 3))
    assert classical_shadow_check(3, ch, 2, 1)
    assert classical_shadow_check(5, ch, 1, 0)
    # the predicted scalar for (2,1) at n = 3 is exactly 1
    l1, l2 = ch.lambdas()
    mono = l1**2 * l2
    assert -(CycInt.from_root(mono) + CycInt.from_root(mono.inverse())) == CycInt.integer(1)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 5, 7, 9]), angles, angles, st.integers(-6, 6), st.integers(-6, 6),
       st.sampled_from(["plus", "minus"]))
def test_shadow_property(n, p1, p2, a, b, sign):
    if (a, b) == (0, 0) or math.gcd(a, b) != 1:
        return
    ch = TorusCharacter(p1, p2, sign)
    if ch.ring_order(n) > 2000:
        return
    assert classical_shadow_check(n, ch, a, b)


def test_shadow_scalar_depends_on_character():
    # lambda1 = zeta_3: the (1,0) image is -(zeta_3 + zeta_3^-1) = 1, not the trivial -2
    ch = TorusCharacter(Fraction(1, 3), Fraction(0))
    u, v = ch.lifts(3)
    X, Y = build_rho(3, u, v)
    image = evaluate_qt(X, Y, QTElement(3, {(3, 0): 1, (-3, 0): 1})).scalar_value()
    assert image == CycInt.integer(1)


def test_invariant_characters_thirds_example():
    A = MappingClass(2, 1, -7, -3)
    fam = solve_invariant_characters(A, "plus", 1, 1)
    assert fam.solution == (Fraction(-5, 3), Fraction(8, 3))  # theta = -10 pi / 3, 16 pi / 3
    l1, l2 = fam.character().lambdas()
    assert l1 == RootOfUnity(3, 1) and l2 == RootOfUnity(3, 2)
    minus = solve_invariant_characters(A, "minus")
    assert minus.determinant in (1, -1)
    assert minus.solution == (Fraction(0), Fraction(0))


def test_identity_makes_everything_invariant():
    fam = solve_invariant_characters(MappingClass.identity(), "plus")
    assert fam.determinant == 0 and fam.solution is not None
    assert fam.contains(Fraction(1, 7), Fraction(2, 9))


def test_b_zero_family():
    fam = solve_invariant_characters(MappingClass(1, 0, 2, 1), "plus", 0, 1)
    assert fam.direction is not None
    assert solve_invariant_characters(MappingClass(1, 0, 2, 1), "plus", 1, 0).solution is None
    for t in (Fraction(0), Fraction(1, 5), Fraction(3, 7)):
        ch = fam.character(t=t)
        assert fam.contains(ch.angle1, ch.angle2)


S = MappingClass(0, -1, 1, 0)
T = MappingClass(1, 1, 0, 1)


@st.composite
def sl2z(draw):
    A = MappingClass.identity()
    for g in draw(st.lists(st.sampled_from([S, T, MappingClass(1, -1, 0, 1)]), max_size=7)):
        A = A @ g
    return A


@given(sl2z(), st.sampled_from(["plus", "minus"]), st.integers(-3, 3), st.integers(-3, 3), angles)
def test_solutions_satisfy_the_congruences(A, sign, k1, k2, t):
    fam = solve_invariant_characters(A, sign, k1, k2)
    if fam.solution is None:
        return
    ch = fam.character(t=t)
    got = invariance_integers(A, sign, ch.angle1, ch.angle2)
    if fam.determinant != 0:
        assert got == (k1, k2)
        e = 1 if sign == "plus" else -1
        D = abs(2 - e * A.trace)
        assert (ch.angle1 * D).denominator == 1 and (ch.angle2 * D).denominator == 1
    assert all(Fraction(x).denominator == 1 for x in got)


def test_decompose_small_bases():
    sub = decompose_subreps(3, 1, 1)
    assert sub.V1 == ((1, 0, 0), (0, 1, 1))
    assert sub.V2 == ((0, 1, -1),)
    assert sub.closed and sub.complementary
    sub5 = decompose_subreps(5, -1, 1)
    assert (len(sub5.V1), len(sub5.V2)) == (3, 2)


def test_decompose_closure_by_hand_n5():
    n = 5
    X, Y = build_rho(n, RootOfUnity(1), RootOfUnity(1))
    M = evaluate_qt(X, Y, fg_image(1, 0, n)).to_complex()
    w = np.zeros(n)
    w[1], w[4] = 1, -1
    image = M @ w
    # V2 vectors are antisymmetric under i -> -i
    assert np.allclose(image[1:], -image[1:][::-1])
    assert abs(image[0]) < 1e-12


def test_decompose_rank_oracle():
    for n in (3, 5, 7):
        sub = decompose_subreps(n, 1, -1)
        assert sympy.Matrix(list(sub.V1) + list(sub.V2)).rank() == n


def test_decompose_errors():
    with pytest.raises(NotDegenerate):
        decompose_subreps(5, RootOfUnity(10, 1), 1)
    with pytest.raises(TooSmall):
        decompose_subreps(1, 1, 1)
