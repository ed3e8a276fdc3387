"""Exact arithmetic in the cyclotomic integer rings Z[zeta_N].

Two value types live here.  ``RootOfUnity`` is a single e^{2 pi i e / N};
``CycInt`` is a finite integer combination of N-th roots of unity.  A CycInt
keeps whatever (possibly redundant) exponent/coefficient map it was built
with; ``reduce`` maps it to the unique remainder modulo Phi_N, which is what
equality and zero tests use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Optional

import numpy as np

MAX_EXACT_ORDER = 20000
# Orders up to this size reduce through a cached power table instead of
# polynomial long division.
_TABLE_ORDER_LIMIT = 2048
_INT64_SAFE = 2**62


class OrderMismatch(ValueError):
    """Raised when a root of unity cannot be rewritten at the requested order."""


class OrderTooLarge(ValueError):
    """Raised when exact arithmetic would need a ring Z[zeta_N] with N above the cap."""


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def check_order(N: int) -> int:
    if N < 1:
        raise ValueError(f"order must be positive, got {N}")
    if N > MAX_EXACT_ORDER:
        raise OrderTooLarge(
            f"exact mode needs Z[zeta_{N}]; the cap is N <= {MAX_EXACT_ORDER} (use float mode)"
        )
    return N


@dataclass(frozen=True, eq=False)
class RootOfUnity:
    """The complex number e^{2 pi i exponent / order}."""

    order: int
    exponent: int = 0

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError(f"order must be positive, got {self.order}")
        object.__setattr__(self, "exponent", self.exponent % self.order)

    @classmethod
    def minus_one(cls) -> "RootOfUnity":
        return cls(2, 1)

    def normalized(self) -> "RootOfUnity":
        g = math.gcd(self.exponent, self.order)
        return RootOfUnity(self.order // g, self.exponent // g)

    def rescale(self, M: int) -> "RootOfUnity":
        return rescale(self, M)

    def __mul__(self, other: "RootOfUnity") -> "RootOfUnity":
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        L = lcm(self.order, other.order)
        return RootOfUnity(
            L, self.exponent * (L // self.order) + other.exponent * (L // other.order)
        )

    def __pow__(self, k: int) -> "RootOfUnity":
        return RootOfUnity(self.order, self.exponent * k)

    def __neg__(self) -> "RootOfUnity":
        return self * RootOfUnity.minus_one()

    def inverse(self) -> "RootOfUnity":
        return RootOfUnity(self.order, -self.exponent)

    conj = inverse

    def is_one(self) -> bool:
        return self.exponent == 0

    def to_complex(self) -> complex:
        return cmath.exp(2j * math.pi * self.exponent / self.order)

    def to_cycint(self, order: Optional[int] = None) -> "CycInt":
        z = self if order is None else rescale(self, order)
        return CycInt(z.order, {z.exponent: 1})

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RootOfUnity):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.order == b.order and a.exponent == b.exponent

    def __hash__(self) -> int:
        a = self.normalized()
        return hash((a.order, a.exponent))

    def __repr__(self) -> str:
        return f"RootOfUnity({self.order}, {self.exponent})"


# A matrix entry: zero (None) or a single root of unity.  Signs are absorbed
# into the exponent because every ring used here has even order.
CycScalar = Optional[RootOfUnity]


def rescale(z: RootOfUnity, M: int) -> RootOfUnity:
    """Rewrite ``z`` with order ``M``; ``M`` must be a multiple of ``z.order``."""
    if M < 1 or M % z.order:
        raise OrderMismatch(f"order {z.order} does not divide {M}")
    return RootOfUnity(M, z.exponent * (M // z.order))


# ---------------------------------------------------------------------------
# cyclotomic polynomials


def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def euler_phi(n: int) -> int:
    out = n
    for p in _prime_factors(n):
        out = out // p * (p - 1)
    return out


def _mobius(n: int) -> int:
    ps = _prime_factors(n)
    m = 1
    for p in ps:
        m *= p
    return 0 if m != n else (-1) ** len(ps)


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(N: int) -> tuple[int, ...]:
    if N == 1:
        return (-1, 1)
    rad = 1
    for p in _prime_factors(N):
        rad *= p
    deg = euler_phi(rad)
    # Phi_rad = prod_{d | rad} (1 - x^d)^{mu(rad/d)} for rad > 1.  Multiply the
    # numerator factors first, then divide out the denominator binomials
    # exactly, working modulo x^{deg+1} (the quotient is a polynomial).
    poly = [0] * (deg + 1)
    poly[0] = 1
    divs = _divisors(rad)
    for d in divs:
        if _mobius(rad // d) == 1 and d <= deg:
            for i in range(deg, d - 1, -1):
                poly[i] -= poly[i - d]
    for d in divs:
        if _mobius(rad // d) == -1 and d <= deg:
            for i in range(d, deg + 1):
                poly[i] += poly[i - d]
    step = N // rad
    if step == 1:
        return tuple(poly)
    out = [0] * (deg * step + 1)
    for i, c in enumerate(poly):
        out[i * step] = c
    return tuple(out)


def cyclotomic_poly(N: int) -> list[int]:
    """Coefficients of Phi_N, lowest degree first."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    return list(_cyclotomic_coeffs(N))


@lru_cache(maxsize=64)
def _power_table(N: int) -> np.ndarray:
    """Row e holds x^e mod Phi_N for phi(N) <= e < N, as an int64 array."""
    phi = euler_phi(N)
    p = _cyclotomic_coeffs(N)
    rows = []
    # start from x^{phi} = -(p_0 + ... + p_{phi-1} x^{phi-1})
    cur = [-c for c in p[:phi]]
    for _ in range(phi, N):
        rows.append(cur)
        lead = cur[-1]
        nxt = [0] + cur[:-1]
        if lead:
            nxt = [a - lead * c for a, c in zip(nxt, p[:phi])]
        cur = nxt
    table = np.array(rows, dtype=object).reshape(N - phi, phi)
    if table.size and max(abs(int(v)) for v in table.flat) >= 2**31:
        return table
    return table.astype(np.int64)


def reduce_dense(vec: np.ndarray, N: int) -> np.ndarray:
    """Reduce coefficient vectors of length N (last axis) modulo Phi_N.

    Returns an array whose last axis has length phi(N).  Leading axes are
    treated as a batch so whole matrices reduce in one call.
    """
    phi = euler_phi(N)
    if vec.shape[-1] != N:
        raise ValueError("last axis must have length N")
    if phi == N:  # only N = 1
        return vec.copy()
    low, high = vec[..., :phi], vec[..., phi:]
    if N <= _TABLE_ORDER_LIMIT:
        table = _power_table(N)
        if high.dtype != object and table.dtype != object and high.size:
            col_mass = int(np.abs(table).sum(axis=0).max())
            bound = int(np.abs(high).max()) * col_mass + int(np.abs(low).max())
            if bound < _INT64_SAFE:
                return low + high @ table
        return np.asarray(low, dtype=object) + np.asarray(high, dtype=object).dot(
            np.asarray(table, dtype=object)
        )
    # long division for large orders
    p = np.array(_cyclotomic_coeffs(N)[:phi], dtype=object)
    work = np.array(vec, dtype=object, copy=True)
    for i in range(N - 1, phi - 1, -1):
        lead = work[..., i]
        if not np.any(lead != 0):
            continue
        work[..., i - phi : i] -= lead[..., None] * p
        work[..., i] = 0
    return work[..., :phi]


def _narrow(arr: np.ndarray) -> np.ndarray:
    """Return an int64 copy when every value fits, else an object array."""
    if arr.dtype != object:
        return arr
    if arr.size == 0:
        return arr.astype(np.int64)
    if max(abs(int(v)) for v in arr.flat) < _INT64_SAFE:
        return arr.astype(np.int64)
    return arr


# ---------------------------------------------------------------------------
# cyclotomic integers


class CycInt:
    """An element sum_e c_e zeta_N^e of Z[zeta_N] with big-integer coefficients."""

    __slots__ = ("order", "_terms", "_canonical")

    def __init__(self, order: int, terms: Optional[Mapping[int, int]] = None):
        if order < 1:
            raise ValueError(f"order must be positive, got {order}")
        self.order = order
        clean: dict[int, int] = {}
        if terms:
            for e, c in terms.items():
                c = int(c)
                if c:
                    k = e % order
                    clean[k] = clean.get(k, 0) + c
        self._terms = {k: c for k, c in clean.items() if c}
        self._canonical: Optional[CycInt] = None

    # constructors ---------------------------------------------------------
    @classmethod
    def zero(cls, order: int = 1) -> "CycInt":
        return cls(order)

    @classmethod
    def integer(cls, m: int, order: int = 1) -> "CycInt":
        return cls(order, {0: m})

    @classmethod
    def from_root(cls, z: RootOfUnity, coeff: int = 1) -> "CycInt":
        return cls(z.order, {z.exponent: coeff})

    @classmethod
    def from_exponents(cls, order: int, exponents: Iterable[int]) -> "CycInt":
        counts = np.bincount(np.mod(np.fromiter(exponents, dtype=np.int64), order), minlength=order)
        return cls.from_dense(counts, order)

    @classmethod
    def from_dense(cls, vec: np.ndarray, order: int) -> "CycInt":
        nz = np.nonzero(vec)[0]
        return cls(order, {int(e): int(vec[e]) for e in nz})

    # accessors -------------------------------------------------------------
    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def dense(self) -> np.ndarray:
        vec = np.zeros(self.order, dtype=object)
        for e, c in self._terms.items():
            vec[e] = c
        return _narrow(vec)

    def rescale(self, M: int) -> "CycInt":
        if M % self.order:
            raise OrderMismatch(f"order {self.order} does not divide {M}")
        f = M // self.order
        return CycInt(M, {e * f: c for e, c in self._terms.items()})

    def _common(self, other: "CycInt | int") -> tuple["CycInt", "CycInt"]:
        if isinstance(other, int):
            other = CycInt.integer(other, self.order)
        if other.order == self.order:
            return self, other
        L = lcm(self.order, other.order)
        return self.rescale(L), other.rescale(L)

    # ring operations -------------------------------------------------------
    def __add__(self, other: "CycInt | int") -> "CycInt":
        if not isinstance(other, (CycInt, int)):
            return NotImplemented
        a, b = self._common(other)
        out = dict(a._terms)
        for e, c in b._terms.items():
            out[e] = out.get(e, 0) + c
        return CycInt(a.order, out)

    __radd__ = __add__

    def __neg__(self) -> "CycInt":
        return CycInt(self.order, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other: "CycInt | int") -> "CycInt":
        if not isinstance(other, (CycInt, int)):
            return NotImplemented
        return self + (-(other if isinstance(other, CycInt) else CycInt.integer(other)))

    def __rsub__(self, other: int) -> "CycInt":
        return (-self) + other

    def __mul__(self, other: "CycInt | RootOfUnity | int") -> "CycInt":
        if isinstance(other, int):
            return CycInt(self.order, {e: c * other for e, c in self._terms.items()})
        if isinstance(other, RootOfUnity):
            other = CycInt.from_root(other)
        if not isinstance(other, CycInt):
            return NotImplemented
        a, b = self._common(other)
        N = a.order
        if len(a._terms) * len(b._terms) <= 4096:
            out: dict[int, int] = {}
            for e1, c1 in a._terms.items():
                for e2, c2 in b._terms.items():
                    k = (e1 + e2) % N
                    out[k] = out.get(k, 0) + c1 * c2
            return CycInt(N, out)
        return CycInt.from_dense(_cyclic_convolve(a.dense(), b.dense(), N), N)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CycInt":
        if k < 0:
            raise ValueError("negative powers are not defined in Z[zeta_N]")
        result = CycInt.integer(1, self.order)
        base = self
        while k:
            if k & 1:
                result = (result * base).reduce()
            base = (base * base).reduce()
            k >>= 1
        return result

    def conj(self) -> "CycInt":
        return CycInt(self.order, {-e: c for e, c in self._terms.items()})

    # canonical form --------------------------------------------------------
    def reduce(self) -> "CycInt":
        if self._canonical is not None:
            return self._canonical
        N = self.order
        if not self._terms:
            canon = self
        elif N == 1:
            canon = self
        else:
            red = reduce_dense(self.dense(), N)
            canon = CycInt.from_dense(red, N)
        canon._canonical = canon
        self._canonical = canon
        return canon

    def is_zero(self) -> bool:
        return not self.reduce()._terms

    def as_integer(self) -> Optional[int]:
        """The rational integer equal to this value, or None if it is not one."""
        t = self.reduce()._terms
        if not t:
            return 0
        if set(t) == {0}:
            return t[0]
        return None

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = CycInt.integer(other)
        if not isinstance(other, CycInt):
            return NotImplemented
        return (self - other).is_zero()

    # equality crosses orders, so there is no cheap consistent hash
    __hash__ = None  # type: ignore[assignment]

    # numerics and serialization -------------------------------------------
    def eval_complex(self) -> complex:
        if not self._terms:
            return 0j
        e = np.fromiter(self._terms.keys(), dtype=np.float64)
        c = np.array([float(v) for v in self._terms.values()])
        return complex(np.sum(c * np.exp(2j * np.pi * e / self.order)))

    def __complex__(self) -> complex:
        return self.eval_complex()

    def to_json(self) -> dict:
        canon = self.reduce()
        return {
            "order": self.order,
            "terms": [[e, str(c)] for e, c in sorted(canon._terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "CycInt":
        return cls(int(data["order"]), {int(e): int(c) for e, c in data["terms"]})

    def __repr__(self) -> str:
        body = " + ".join(f"{c}*z^{e}" for e, c in sorted(self._terms.items())) or "0"
        return f"CycInt[{self.order}]({body})"


def _cyclic_convolve(a: np.ndarray, b: np.ndarray, N: int) -> np.ndarray:
    if a.dtype != object and b.dtype != object:
        bound = int(np.abs(a).max()) * int(np.abs(b).max()) * N
        if bound < _INT64_SAFE:
            full = np.convolve(a, b)
            out = full[:N].copy()
            out[: len(full) - N] += full[N:]
            return out
    a = np.asarray(a, dtype=object)
    b = np.asarray(b, dtype=object)
    out = np.zeros(N, dtype=object)
    for e in np.nonzero(a)[0]:
        out += a[e] * np.roll(b, int(e))
    return out


def reduce(z: CycInt) -> CycInt:
    return z.reduce()


def is_zero(z: CycInt) -> bool:
    return z.is_zero()


def conj(z: CycInt) -> CycInt:
    return z.conj()


def abs_sq(z: CycInt) -> CycInt:
    """|z|^2 as a canonical element of the same ring."""
    return (z * z.conj()).reduce()


def eval_complex(z: CycInt | RootOfUnity) -> complex:
    if isinstance(z, RootOfUnity):
        return z.to_complex()
    return z.eval_complex()


def sum_of_roots(order: int, exponents: Iterable[int]) -> CycInt:
    """sum_j zeta_order^{e_j}, built with a single bincount."""
    return CycInt.from_exponents(order, exponents)
