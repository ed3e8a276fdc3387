import math

import pytest
import sympy
from hypothesis import given, strategies as st

from skeintrace.cyclotomic import CycInt, RootOfUnity
from skeintrace.quantum_torus import (
    MappingClass,
    NotPeriodic,
    NotSL2Z,
    QTElement,
    ThetaMonomial,
    UndefinedLink,
    apply_FA,
    chebyshev_T,
    fg_image,
    gcd_parity_check,
    theta_mul,
)

S = MappingClass(0, -1, 1, 0)
T = MappingClass(1, 1, 0, 1)


@st.composite
def sl2z(draw):
    A = MappingClass.identity()
    for g in draw(st.lists(st.sampled_from([S, T, MappingClass(1, -1, 0, 1)]), max_size=6)):
        A = A @ g
    return A


small = st.integers(-4, 4)
odd_n = st.sampled_from([1, 3, 5, 7])


def test_theta_mul_example():
    n = 5
    m = theta_mul(ThetaMonomial(1, 0, n), ThetaMonomial(0, 1, n))
    assert (m.a, m.b) == (1, 1)
    assert m.scalar == RootOfUnity(2 * n, 1)
    back = theta_mul(ThetaMonomial(0, 1, n), ThetaMonomial(1, 0, n))
    assert back.scalar == RootOfUnity(2 * n, -1)


@given(small, small, small, small, odd_n)
def test_theta_mul_parallel_vectors_commute(a, b, k, l, n):
    m1, m2 = ThetaMonomial(k * a, k * b, n), ThetaMonomial(l * a, l * b, n)
    assert theta_mul(m1, m2).scalar.is_one()


@given(small, small, small, small, small, small, odd_n)
def test_theta_mul_associative(a, b, c, d, e, f, n):
    x, y, z = ThetaMonomial(a, b, n), ThetaMonomial(c, d, n), ThetaMonomial(e, f, n)
    assert theta_mul(theta_mul(x, y), z) == theta_mul(x, theta_mul(y, z))


@pytest.mark.parametrize("k", range(0, 12))
def test_chebyshev_matches_z_plus_inverse(k):
    z = sympy.Symbol("z")
    poly = sum(c * (z + 1 / z) ** i for i, c in enumerate(chebyshev_T(k)))
    expected = 2 if k == 0 else z**k + z**-k
    assert sympy.simplify(sympy.expand(poly) - expected) == 0


def test_chebyshev_small_cases():
    assert chebyshev_T(0) == [2]
    assert chebyshev_T(1) == [0, 1]
    assert chebyshev_T(2) == [-2, 0, 1]
    assert chebyshev_T(3) == [0, -3, 0, 1]


def test_fg_image_primitive_and_multicurve():
    assert fg_image(1, 0, 5) == QTElement(5, {(1, 0): 1, (-1, 0): 1})
    assert fg_image(2, 0, 5) == QTElement(5, {(2, 0): 1, (-2, 0): 1})
    assert fg_image(3, 3, 7) == QTElement(7, {(3, 3): 1, (-3, -3): 1})
    with pytest.raises(UndefinedLink):
        fg_image(0, 0)


@given(small, small, odd_n)
def test_fg_image_is_theta_sum(a, b, n):
    if (a, b) == (0, 0):
        return
    assert fg_image(a, b, n) == QTElement(n, {(a, b): 1, (-a, -b): 1})


@given(sl2z(), sl2z(), small, small)
def test_composition_law(A, B, i, j):
    x = QTElement.monomial(i, j, 5)
    for s1 in ("plus", "minus"):
        for s2 in ("plus", "minus"):
            lhs = apply_FA(A, s1, apply_FA(B, s2, x))
            composite = "plus" if s1 == s2 else "minus"
            assert lhs == apply_FA(B @ A, composite, x)


@given(sl2z(), small, small, small, small, st.sampled_from(["plus", "minus"]))
def test_FA_is_an_algebra_map(A, a, b, c, d, sign):
    n = 7
    x, y = QTElement.monomial(a, b, n), QTElement.monomial(c, d, n)
    assert apply_FA(A, sign, x * y) == apply_FA(A, sign, x) * apply_FA(A, sign, y)


def test_skein_product_to_sum():
    # (1,0)*(0,1) = q^{1/2}(1,1) + q^{-1/2}(1,-1)
    n = 5
    lhs = fg_image(1, 0, n) * fg_image(0, 1, n)
    hq = RootOfUnity(2 * n, 1)
    rhs = fg_image(1, 1, n).scale(CycInt.from_root(hq)) + fg_image(1, -1, n).scale(CycInt.from_root(hq.inverse()))
    assert lhs == rhs


@given(small, small)
def test_gcd_parity(a, b):
    if (a, b) == (0, 0):
        return
    assert gcd_parity_check(a, b) == ((a * b + a + b) % 2 == math.gcd(a, b) % 2)
    assert gcd_parity_check(a, b)


def test_mapping_class_validation_and_order():
    with pytest.raises(NotSL2Z):
        MappingClass(2, 0, 0, 1)
    assert MappingClass(0, 1, -1, 0).order() == 4
    assert MappingClass(0, 1, -1, -1).order() == 3
    assert MappingClass(0, -1, 1, 1).order() == 6
    assert MappingClass(2, 1, -7, -3).order() == 3  # trace -1
    with pytest.raises(NotPeriodic):
        MappingClass(2, 1, 1, 1).order()
    assert not MappingClass(2, 1, 1, 1).is_periodic()
    assert MappingClass.parse("2, 1, -7, -3").entries() == (2, 1, -7, -3)
