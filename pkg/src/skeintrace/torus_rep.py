"""Irreducible representations rho_{u,v} of the quantum torus at odd level n.

rho(X) e_i = u q^i e_i and rho(Y) e_i = v e_{i+1} (indices mod n), with
q = e^{2 pi i / n}.  A character (lambda1, lambda2) is given by angles
phi = theta / 2pi.  Exact characters use Fraction angles; lambda_j is then
a root of unity and everything lives in Z[zeta_N] with
N = n * lcm(2, denominators).  The lifts are

    u = -e^{2 pi i s phi1 / n} q^{r1},   v = -e^{2 pi i s phi2 / n} q^{r2},

with s = +1 on the plus branch (u^n = -lambda1) and s = -1 on the minus
branch (u^n = -lambda1^{-1}).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Union

import numpy as np
import sympy

from .cyclotomic import CycInt, RootOfUnity, check_order, lcm
from .exactmat import CycMatrix, ScaledPermMatrix
from .quantum_torus import MappingClass, QTElement, UndefinedLink, fg_image, sign_value

Angle = Union[Fraction, float, complex]


class EvenLevel(ValueError):
    """Raised for even n; the constructions need q^{1/2} a primitive n-th root of -1."""


class NotDegenerate(ValueError):
    """Raised when the explicit V1 + V2 splitting is requested for u, v not in {+1, -1}."""


class TooSmall(ValueError):
    """Raised when n = 1, where the splitting is empty."""


def require_odd(n: int) -> int:
    if n < 1 or n % 2 == 0:
        raise EvenLevel(f"n must be an odd positive integer, got {n}")
    return n


def parse_angle(text: str) -> Fraction:
    return Fraction(text.strip())


@dataclass(frozen=True)
class TorusCharacter:
    """lambda_j = e^{2 pi i angle_j} together with a lift branch and offsets."""

    angle1: Angle
    angle2: Angle
    sign: str = "plus"
    r1: int = 0
    r2: int = 0

    def __post_init__(self) -> None:
        sign_value(self.sign)

    @classmethod
    def trivial(cls, sign: str = "plus") -> "TorusCharacter":
        return cls(Fraction(0), Fraction(0), sign)

    @classmethod
    def from_lambdas(cls, l1: complex, l2: complex, sign: str = "plus") -> "TorusCharacter":
        """Float-mode character from arbitrary nonzero complex eigenvalues."""
        to_turns = lambda z: cmath.log(z) / (2j * math.pi)  # noqa: E731
        return cls(to_turns(l1), to_turns(l2), sign)

    @property
    def exact(self) -> bool:
        return isinstance(self.angle1, Fraction) and isinstance(self.angle2, Fraction)

    @property
    def s(self) -> int:
        return sign_value(self.sign)

    def with_lifts(self, r1: int, r2: int) -> "TorusCharacter":
        return replace(self, r1=r1, r2=r2)

    def with_sign(self, sign: str) -> "TorusCharacter":
        return replace(self, sign=sign)

    def lambdas(self) -> tuple[RootOfUnity, RootOfUnity]:
        if not self.exact:
            raise TypeError("lambdas as roots of unity need rational angles")
        f1, f2 = Fraction(self.angle1), Fraction(self.angle2)
        return (
            RootOfUnity(f1.denominator, f1.numerator),
            RootOfUnity(f2.denominator, f2.numerator),
        )

    def lambdas_complex(self) -> tuple[complex, complex]:
        return (
            cmath.exp(2j * math.pi * complex(self.angle1)),
            cmath.exp(2j * math.pi * complex(self.angle2)),
        )

    def angle_lcm(self) -> int:
        return lcm(2, Fraction(self.angle1).denominator, Fraction(self.angle2).denominator)

    def ring_order(self, n: int) -> int:
        """N with u, v, q^{1/2} all in mu_N."""
        return n * self.angle_lcm()

    def lift_exponents(self, n: int) -> tuple[int, int, int]:
        """(N, e_u, e_v) with u = zeta_N^{e_u}, v = zeta_N^{e_v}."""
        require_odd(n)
        L = self.angle_lcm()
        N = check_order(n * L)
        s = self.s
        f1, f2 = Fraction(self.angle1), Fraction(self.angle2)
        eu = N // 2 + int(s * f1 * L) + self.r1 * L
        ev = N // 2 + int(s * f2 * L) + self.r2 * L
        return N, eu % N, ev % N

    def lifts(self, n: int) -> tuple[RootOfUnity, RootOfUnity]:
        N, eu, ev = self.lift_exponents(n)
        return RootOfUnity(N, eu), RootOfUnity(N, ev)

    def lift_turns(self, n: int) -> tuple[complex, complex]:
        """Phases of u and v in turns (u = e^{2 pi i t}); complex for non-unit lambdas."""
        require_odd(n)
        s = self.s
        tu = 0.5 + (s * complex(self.angle1) + self.r1) / n
        tv = 0.5 + (s * complex(self.angle2) + self.r2) / n
        return tu, tv

    def lifts_complex(self, n: int) -> tuple[complex, complex]:
        tu, tv = self.lift_turns(n)
        return cmath.exp(2j * math.pi * tu), cmath.exp(2j * math.pi * tv)

    def describe(self) -> str:
        return f"({self.angle1}, {self.angle2}) {self.sign} lifts=({self.r1},{self.r2})"


# ---------------------------------------------------------------------------
# representation matrices


def build_rho(n: int, u: Union[RootOfUnity, complex], v: Union[RootOfUnity, complex]):
    """(rho(X), rho(Y)); exact ScaledPermMatrix pair for roots of unity, complex arrays otherwise."""
    require_odd(n)
    idx = np.arange(n)
    if isinstance(u, RootOfUnity) and isinstance(v, RootOfUnity):
        N = lcm(u.order, v.order, 2 * n)
        eu = u.rescale(N).exponent
        ev = v.rescale(N).exponent
        Q = N // n
        X = ScaledPermMatrix.monomial(N, idx, eu + Q * idx)
        Y = ScaledPermMatrix.monomial(N, idx + 1, np.full(n, ev))
        return X, Y
    u, v = complex(u), complex(v)
    q = cmath.exp(2j * math.pi / n)
    X = np.diag(u * q**idx)
    Y = np.zeros((n, n), dtype=complex)
    Y[(idx + 1) % n, idx] = v
    return X, Y


def theta_matrix(X: ScaledPermMatrix, Y: ScaledPermMatrix, a: int, b: int) -> ScaledPermMatrix:
    """rho(theta_(a,b)) = q^{-ab/2} X^a Y^b, still a monomial matrix."""
    n = X.n
    N = lcm(X.order, Y.order, 2 * n)
    Xp = X.rescale(N).power(a)
    Yp = Y.rescale(N).power(b)
    M = Xp @ Yp
    return M.scale(RootOfUnity(2 * n, -a * b))


def theta_matrix_complex(X: np.ndarray, Y: np.ndarray, a: int, b: int) -> np.ndarray:
    n = X.shape[0]
    mp = np.linalg.matrix_power
    Xa = mp(X, a) if a >= 0 else mp(np.linalg.inv(X), -a)
    Yb = mp(Y, b) if b >= 0 else mp(np.linalg.inv(Y), -b)
    return np.exp(-1j * math.pi * a * b / n) * (Xa @ Yb)


def cycint_times(c: CycInt, M: ScaledPermMatrix) -> CycMatrix:
    N = lcm(c.order, M.order)
    Mr = M.rescale(N)
    vec = c.rescale(N).dense()
    data = np.zeros((M.n, M.n, N), dtype=vec.dtype)
    for i, j in zip(*np.nonzero(Mr.mask)):
        data[i, j] = np.roll(vec, int(Mr.exps[i, j]))
    return CycMatrix(N, data)


def evaluate_qt(X: ScaledPermMatrix, Y: ScaledPermMatrix, x: QTElement) -> CycMatrix:
    """rho applied to a quantum-torus element, as a dense exact matrix."""
    n = X.n
    N = lcm(X.order, Y.order, 2 * n)
    total = CycMatrix.zeros(n, n, N)
    for (a, b), c in sorted(x.terms.items()):
        total = total + cycint_times(c, theta_matrix(X, Y, a, b))
    return total


def classical_shadow_check(n: int, character: TorusCharacter, a: int, b: int) -> bool:
    """rho(theta_(na,nb) + theta_(-na,-nb)) = (-1)^{ab+a+b}(lambda1^a lambda2^b + inverse) Id."""
    if (a, b) == (0, 0):
        raise UndefinedLink("(0,0) is not a curve")
    u, v = character.lifts(n)
    X, Y = build_rho(n, u, v)
    image = evaluate_qt(X, Y, QTElement(n, {(n * a, n * b): 1, (-n * a, -n * b): 1}))
    l1, l2 = character.lambdas()
    mono = (l1**a) * (l2**b)
    expected = CycInt.from_root(mono) + CycInt.from_root(mono.inverse())
    if (a * b + a + b) % 2:
        expected = -expected
    value = image.scalar_value()
    return value is not None and value == expected


# ---------------------------------------------------------------------------
# invariant characters


@dataclass(frozen=True)
class InvariantCharacters:
    """Solutions of (a -/+ 1) phi1 + b phi2 = k1, c phi1 + (d -/+ 1) phi2 = k2."""

    A: MappingClass
    sign: str
    determinant: int
    k: tuple[int, int]
    solution: Optional[tuple[Fraction, Fraction]]
    direction: Optional[tuple[Fraction, Fraction]]
    description: str

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return _system_rows(self.A, self.sign)

    def character(self, r1: int = 0, r2: int = 0, t: Fraction = Fraction(0)) -> TorusCharacter:
        if self.solution is None:
            raise ValueError(f"no solution: {self.description}")
        p1, p2 = self.solution
        if self.direction is not None:
            p1 += t * self.direction[0]
            p2 += t * self.direction[1]
        return TorusCharacter(p1, p2, self.sign, r1, r2)

    def contains(self, phi1: Fraction, phi2: Fraction) -> bool:
        return is_invariant(self.A, self.sign, phi1, phi2)


def _system_rows(A: MappingClass, sign: str) -> tuple[tuple[int, int], tuple[int, int]]:
    e = sign_value(sign)
    return ((A.a - e, A.b), (A.c, A.d - e))


def invariance_integers(A: MappingClass, sign: str, phi1: Angle, phi2: Angle) -> tuple:
    """(k1, k2) for the angle pair; integral exactly when the character is invariant."""
    (p, q), (r, s) = _system_rows(A, sign)
    return (p * phi1 + q * phi2, r * phi1 + s * phi2)


def is_invariant(A: MappingClass, sign: str, phi1: Angle, phi2: Angle, tol: float = 1e-9) -> bool:
    k1, k2 = invariance_integers(A, sign, phi1, phi2)
    if isinstance(k1, Fraction) and isinstance(k2, Fraction):
        return k1.denominator == 1 and k2.denominator == 1
    return all(abs(complex(k) - round(complex(k).real)) < tol for k in (k1, k2))


def solve_invariant_characters(
    A: MappingClass, sign: str, k1: int = 0, k2: int = 0
) -> InvariantCharacters:
    (p, q), (r, s) = _system_rows(A, sign)
    det = p * s - q * r  # equals 2 -/+ (a + d)
    if det != 0:
        phi1 = Fraction(k1 * s - q * k2, det)
        phi2 = Fraction(p * k2 - r * k1, det)
        desc = (
            f"unique solution for k=({k1},{k2}); every invariant character has "
            f"lambda1^{abs(det)} = lambda2^{abs(det)} = 1"
        )
        return InvariantCharacters(A, sign, det, (k1, k2), (phi1, phi2), None, desc)
    if (p, q, r, s) == (0, 0, 0, 0):
        if (k1, k2) != (0, 0):
            return InvariantCharacters(A, sign, 0, (k1, k2), None, None, "inconsistent: system is 0 = k")
        return InvariantCharacters(
            A, sign, 0, (0, 0), (Fraction(0), Fraction(0)), None,
            "every character is invariant (system is 0 = 0); use an explicit angle pair",
        )
    # rank one: pick a nonzero row, check the other is the matching multiple
    rows = [((p, q), k1), ((r, s), k2)]
    (row, krow) = next(item for item in rows if item[0] != (0, 0))
    for (other, kother) in rows:
        # other = mu * row with mu rational; consistency needs kother = mu * krow
        if other == (0, 0):
            if kother != 0:
                return InvariantCharacters(A, sign, 0, (k1, k2), None, None, "inconsistent system")
            continue
        mu = Fraction(other[0], row[0]) if row[0] else Fraction(other[1], row[1])
        if mu * krow != kother:
            return InvariantCharacters(A, sign, 0, (k1, k2), None, None, "inconsistent system")
    if row[0]:
        particular = (Fraction(krow, row[0]), Fraction(0))
    else:
        particular = (Fraction(0), Fraction(krow, row[1]))
    direction = (Fraction(-row[1]), Fraction(row[0]))
    desc = (
        f"one-parameter family: {row[0]}*phi1 + {row[1]}*phi2 = {krow}; "
        f"phi = particular + t*{tuple(str(x) for x in direction)}"
    )
    return InvariantCharacters(A, sign, 0, (k1, k2), particular, direction, desc)


# ---------------------------------------------------------------------------
# the u, v = +-1 splitting


@dataclass(frozen=True)
class Subrepresentations:
    n: int
    V1: tuple[tuple[int, ...], ...]
    V2: tuple[tuple[int, ...], ...]
    closed: bool
    complementary: bool


def _unit_sign(x: Union[int, RootOfUnity]) -> int:
    if isinstance(x, RootOfUnity):
        z = x.normalized()
        if z.order == 1:
            return 1
        if z.order == 2:
            return -1
        raise NotDegenerate(f"{x} is not +-1")
    if x in (1, -1):
        return int(x)
    raise NotDegenerate(f"{x} is not +-1")


def splitting_bases(n: int) -> tuple[list[list[int]], list[list[int]]]:
    half = (n - 1) // 2
    V1, V2 = [], []
    e0 = [0] * n
    e0[0] = 1
    V1.append(e0)
    for j in range(1, half + 1):
        plus = [0] * n
        minus = [0] * n
        plus[j] = plus[n - j] = 1
        minus[j], minus[n - j] = 1, -1
        V1.append(plus)
        V2.append(minus)
    return V1, V2


def _in_span_orthogonal(M: CycMatrix, basis: list[list[int]]) -> bool:
    """M maps span(basis) into itself; the basis is integral and pairwise orthogonal."""
    B = np.array(basis, dtype=np.int64).T  # n x k
    N = M.order
    norms = (B * B).sum(axis=0)
    D = int(np.lcm.reduce(norms))
    MB = np.tensordot(M.data.transpose(0, 2, 1), B, axes=(2, 0))  # n x N x k
    MB = MB.transpose(0, 2, 1)  # n x k x N : column images
    # coefficient of basis vector l in image of column j: <MB_j, B_l> / norm_l
    coeffs = np.tensordot(B.T, MB, axes=(1, 0))  # k_l x k_j x N
    weights = (D // norms)[:, None, None]
    proj = np.tensordot(B, coeffs * weights, axes=(1, 0))  # n x k_j x N
    residual = MB * D - proj
    return CycMatrix(N, residual).is_zero()


def decompose_subreps(n: int, u: Union[int, RootOfUnity], v: Union[int, RootOfUnity]) -> Subrepresentations:
    """The symmetric/antisymmetric splitting of rho_{u,v} for u, v = +-1."""
    su, sv = _unit_sign(u), _unit_sign(v)
    require_odd(n)
    if n == 1:
        raise TooSmall("n = 1 has no splitting")
    V1, V2 = splitting_bases(n)
    X, Y = build_rho(n, RootOfUnity(2, 0 if su == 1 else 1), RootOfUnity(2, 0 if sv == 1 else 1))
    closed = True
    for a, b in ((1, 0), (0, 1), (1, 1)):
        M = evaluate_qt(X, Y, fg_image(a, b, n))
        closed = closed and _in_span_orthogonal(M, V1) and _in_span_orthogonal(M, V2)
    rank = sympy.Matrix(V1 + V2).rank()
    return Subrepresentations(
        n,
        tuple(tuple(r) for r in V1),
        tuple(tuple(r) for r in V2),
        closed,
        rank == n,
    )


__all__ = [
    "EvenLevel",
    "InvariantCharacters",
    "NotDegenerate",
    "Subrepresentations",
    "TooSmall",
    "TorusCharacter",
    "build_rho",
    "classical_shadow_check",
    "decompose_subreps",
    "evaluate_qt",
    "invariance_integers",
    "is_invariant",
    "require_odd",
    "solve_invariant_characters",
    "theta_matrix",
]
