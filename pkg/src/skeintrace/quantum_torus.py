"""The quantum torus C[X^{+-1}, Y^{+-1}] with XY = qYX, in the theta basis.

theta_(a,b) = q^{-ab/2} X^a Y^b, and theta_u theta_w = (q^{1/2})^{det(u; w)} theta_{u+w}.
Elements are sparse maps from lattice points to coefficients in Z[zeta_N].
The level n fixes q^{1/2} = e^{pi i / n}; it matters only when two
non-parallel monomials are multiplied.

Mapping classes act on lattice points as row vectors: (i, j) -> (i, j) A.
Under that convention F_{A,+} o F_{B,+} = F_{BA,+}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Literal, Mapping, Optional, TypeVar

from .cyclotomic import CycInt, RootOfUnity

Sign = Literal["plus", "minus"]
SIGNS: tuple[str, str] = ("plus", "minus")


class UndefinedLink(ValueError):
    """The lattice point (0, 0) does not name a curve on the torus."""


class NotSL2Z(ValueError):
    """Raised for integer matrices whose determinant is not 1."""


class NotPeriodic(ValueError):
    """Raised when a finite order is requested for an infinite-order class."""


def sign_value(sign: str) -> int:
    if sign == "plus":
        return 1
    if sign == "minus":
        return -1
    raise ValueError(f"sign must be 'plus' or 'minus', got {sign!r}")


@dataclass(frozen=True)
class MappingClass:
    """An element [[a, b], [c, d]] of SL(2, Z)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if self.a * self.d - self.b * self.c != 1:
            raise NotSL2Z(
                f"[[{self.a},{self.b}],[{self.c},{self.d}]] has determinant "
                f"{self.a * self.d - self.b * self.c}, expected 1"
            )

    @classmethod
    def identity(cls) -> "MappingClass":
        return cls(1, 0, 0, 1)

    @classmethod
    def parse(cls, text: str) -> "MappingClass":
        parts = [int(p) for p in text.replace(" ", "").split(",")]
        if len(parts) != 4:
            raise ValueError(f"expected four comma-separated integers, got {text!r}")
        return cls(*parts)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def trace(self) -> int:
        return self.a + self.d

    def is_identity(self) -> bool:
        return self.entries() == (1, 0, 0, 1)

    def is_minus_identity(self) -> bool:
        return self.entries() == (-1, 0, 0, -1)

    def is_periodic(self) -> bool:
        return abs(self.trace) <= 1 or self.is_identity() or self.is_minus_identity()

    def __matmul__(self, other: "MappingClass") -> "MappingClass":
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return MappingClass(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def order(self, cap: int = 12) -> int:
        """Smallest k >= 1 with A^k = I; every torsion element of SL(2,Z) has k | 12."""
        power = self
        for k in range(1, cap + 1):
            if power.is_identity():
                return k
            power = power @ self
        raise NotPeriodic(f"{self.entries()} has no order <= {cap}")

    def act(self, i: int, j: int) -> tuple[int, int]:
        """Row-vector action (i, j) -> (i, j) A."""
        return (i * self.a + j * self.c, i * self.b + j * self.d)


@dataclass(frozen=True)
class ThetaMonomial:
    """scalar * theta_(a,b) at level n (so q^{1/2} = zeta_{2n})."""

    a: int
    b: int
    n: int
    scalar: RootOfUnity = field(default_factory=lambda: RootOfUnity(1, 0))

    @property
    def half_q(self) -> RootOfUnity:
        return RootOfUnity(2 * self.n, 1)


def theta_mul(m1: ThetaMonomial, m2: ThetaMonomial) -> ThetaMonomial:
    if m1.n != m2.n:
        raise ValueError("monomials live at different levels")
    det = m1.a * m2.b - m1.b * m2.a
    scalar = m1.scalar * m2.scalar * (m1.half_q**det)
    return ThetaMonomial(m1.a + m2.a, m1.b + m2.b, m1.n, scalar)


class QTElement:
    """A finite sum of theta monomials with cyclotomic coefficients."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Mapping[tuple[int, int], CycInt]] = None):
        self.n = n
        clean = {}
        for key, c in (terms or {}).items():
            if isinstance(c, int):
                c = CycInt.integer(c)
            if not c.is_zero():
                clean[(int(key[0]), int(key[1]))] = c
        self.terms: dict[tuple[int, int], CycInt] = clean

    @classmethod
    def monomial(cls, a: int, b: int, n: int, coeff: CycInt | int = 1) -> "QTElement":
        return cls(n, {(a, b): coeff})

    @classmethod
    def from_monomial(cls, m: ThetaMonomial) -> "QTElement":
        return cls(m.n, {(m.a, m.b): CycInt.from_root(m.scalar)})

    @classmethod
    def one(cls, n: int) -> "QTElement":
        return cls(n, {(0, 0): 1})

    def _check(self, other: "QTElement") -> None:
        if self.n != other.n:
            raise ValueError("elements live at different levels")

    def __add__(self, other: "QTElement") -> "QTElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return QTElement(self.n, out)

    def __neg__(self) -> "QTElement":
        return QTElement(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "QTElement") -> "QTElement":
        return self + (-other)

    def scale(self, c: CycInt | int) -> "QTElement":
        return QTElement(self.n, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other: "QTElement | int") -> "QTElement":
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        hq = RootOfUnity(2 * self.n, 1)
        out: dict[tuple[int, int], CycInt] = {}
        for (a, b), c1 in self.terms.items():
            for (c, d), c2 in other.terms.items():
                coeff = c1 * c2 * (hq ** (a * d - b * c))
                key = (a + c, b + d)
                out[key] = out[key] + coeff if key in out else coeff
        return QTElement(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QTElement):
            return NotImplemented
        if self.n != other.n:
            return False
        keys = set(self.terms) | set(other.terms)
        zero = CycInt.zero()
        return all(self.terms.get(k, zero) == other.terms.get(k, zero) for k in keys)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        body = " + ".join(f"({c!r})*theta{k}" for k, c in sorted(self.terms.items()))
        return f"QTElement[n={self.n}]({body or '0'})"


T = TypeVar("T")


def chebyshev_T(k: int) -> list[int]:
    """Coefficients (lowest degree first) of T_k with T_0 = 2, T_1 = x."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    prev, cur = [2], [0, 1]
    if k == 0:
        return prev
    for _ in range(k - 1):
        nxt = [0] + cur
        for i, c in enumerate(prev):
            nxt[i] -= c
        prev, cur = cur, nxt
    return cur


def chebyshev_apply(
    k: int,
    x: T,
    two: T,
    mul: Callable[[T, T], T],
    sub: Callable[[T, T], T],
) -> T:
    """T_k(x) by the three-term recurrence in any ring; ``two`` is 2 * 1."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return two
    prev, cur = two, x
    for _ in range(k - 1):
        prev, cur = cur, sub(mul(x, cur), prev)
    return cur


def _primitive_image(a: int, b: int, n: int) -> QTElement:
    return QTElement(n, {(a, b): 1, (-a, -b): 1}) if (a, b) != (0, 0) else QTElement(n)


def fg_image(a: int, b: int, n: int = 1) -> QTElement:
    """Image of the (a, b) torus curve (or its Chebyshev multicurve) in the quantum torus."""
    if (a, b) == (0, 0):
        raise UndefinedLink("(0,0) is not a curve")
    k = math.gcd(a, b)
    base = _primitive_image(a // k, b // k, n)
    if k == 1:
        return base
    return chebyshev_apply(
        k,
        base,
        QTElement(n, {(0, 0): 2}),
        lambda x, y: x * y,
        lambda x, y: x - y,
    )


def apply_FA(A: MappingClass, sign: str, x: QTElement) -> QTElement:
    """theta_(i,j) -> theta_{(i,j)A} (plus) or theta_{(-i,-j)A} (minus), extended linearly."""
    s = sign_value(sign)
    out: dict[tuple[int, int], CycInt] = {}
    for (i, j), c in x.terms.items():
        key = A.act(s * i, s * j)
        out[key] = out[key] + c if key in out else c
    return QTElement(x.n, out)


def apply_FA_lattice(A: MappingClass, sign: str, i: int, j: int) -> tuple[int, int]:
    s = sign_value(sign)
    return A.act(s * i, s * j)


def gcd_parity_check(a: int, b: int) -> bool:
    """ab + a + b and gcd(a, b) have the same parity."""
    if (a, b) == (0, 0):
        raise UndefinedLink("(0,0) is not a curve")
    return (a * b + a + b - math.gcd(a, b)) % 2 == 0


def lattice_points(bound: int) -> Iterable[tuple[int, int]]:
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            if (a, b) != (0, 0):
                yield a, b
