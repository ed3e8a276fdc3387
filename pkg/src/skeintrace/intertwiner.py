"""Intertwiners for mapping-class-invariant representations of the quantum torus.

For A = [[a, b], [c, d]] in SL(2, Z) and an A-invariant character, the matrix
Lambda built here satisfies

    Lambda rho(W) = rho(F_A(W)) Lambda      for W in {X, Y, X^-1, Y^-1},

where F_{A,+}(theta_v) = theta_{vA} and F_{A,-}(theta_v) = theta_{-vA}.
Entries are zero or roots of unity, with n' = n / gcd(b, n) nonzero entries
in every row and column, so |det Lambda| = n'^{n/2} and n'^{-1/2} Lambda is
the determinant-one normalization.

All phases are handled additively.  In exact mode a phase is an integer
exponent of zeta_N; in float mode it is a (possibly complex) number of turns.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .cyclotomic import (
    CycInt,
    OrderTooLarge,
    RootOfUnity,
    abs_sq,
    MAX_EXACT_ORDER,
)
from .exactmat import ABSENT, CycMatrix, ScaledPermMatrix, power_by_evaluation
from .quantum_torus import MappingClass, NotPeriodic, apply_FA_lattice, sign_value
from .torus_rep import (
    TorusCharacter,
    build_rho,
    invariance_integers,
    is_invariant,
    require_odd,
    theta_matrix,
    theta_matrix_complex,
)

# Tags for the two candidate linear coefficients L in the closed-form trace
# sum_t ((-1)^{T r})^t (q^{1/2})^{r (T t^2 + 2 L t)}.
VARIANT_ONE_PLUS_D = "s1(1+d)-s2*b"
VARIANT_ONE_MINUS_D = "s1(1-d)+s2*b"
# Which candidate equals the matrix trace on each branch (checked in tests).
TRACE_VARIANT = {"plus": VARIANT_ONE_MINUS_D, "minus": VARIANT_ONE_PLUS_D}

DET_MAX_N = 401


class NotInvariant(ValueError):
    """The character is not fixed by the mapping class on the chosen branch."""


class InvalidWeightSystem(ValueError):
    """The starting index k0 of the weight vector is missing or not unique."""


class NotCoprime(ValueError):
    """The closed-form trace needs gcd(b, n) = 1."""


class TooLarge(ValueError):
    """Dense float determinant requested above the size guard."""


def egcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def bezout(b: int, n: int, shift: int = 0) -> tuple[int, int, int]:
    """(m, r, s) with b r + s n = m = gcd(b, n), moved along the solution line by ``shift``."""
    m, r, s = egcd(b, n)
    n_prime = n // m
    return m, r + n_prime * shift, s - (b // m) * shift


# ---------------------------------------------------------------------------
# phase bookkeeping


@dataclass(frozen=True)
class _Phases:
    exact: bool
    n: int
    N: int  # ring order in exact mode, 1 in float mode
    eu: Union[int, complex]
    ev: Union[int, complex]

    @property
    def Q(self):  # exponent of q
        return self.N // self.n if self.exact else 1.0 / self.n

    @property
    def H(self):  # exponent of q^{1/2}
        return self.N // (2 * self.n) if self.exact else 0.5 / self.n

    def is_one(self, x) -> bool:
        if self.exact:
            return int(x) % self.N == 0
        return abs(cmath.exp(2j * math.pi * complex(x)) - 1) < 1e-8

    def values(self, phases: np.ndarray, mask: np.ndarray):
        if self.exact:
            return np.where(mask, np.mod(phases, self.N), ABSENT).astype(np.int64)
        z = np.exp(2j * np.pi * np.asarray(phases, dtype=complex))
        return np.where(mask, z, 0)


def resolve_mode(character: TorusCharacter, n: int, mode: str) -> str:
    if mode not in ("exact", "float", "auto"):
        raise ValueError(f"mode must be exact, float or auto, got {mode!r}")
    if mode == "float":
        return "float"
    if not character.exact:
        if mode == "exact":
            raise ValueError("exact mode needs rational angles")
        return "float"
    if character.ring_order(n) > MAX_EXACT_ORDER:
        if mode == "exact":
            raise OrderTooLarge(
                f"exact mode needs Z[zeta_{character.ring_order(n)}]; cap is {MAX_EXACT_ORDER}"
            )
        return "float"
    return "exact"


def _phases(character: TorusCharacter, n: int, mode: str) -> _Phases:
    mode = resolve_mode(character, n, mode)
    if mode == "exact":
        N, eu, ev = character.lift_exponents(n)
        return _Phases(True, n, N, eu, ev)
    tu, tv = character.lift_turns(n)
    return _Phases(False, n, 1, tu, tv)


# ---------------------------------------------------------------------------
# weight vector r


@dataclass(frozen=True)
class RCoefficients:
    """The weight vector r_0 .. r_{n-1}: zero or unit entries, n' of them nonzero."""

    n: int
    m: int
    n_prime: int
    r: int
    s: int
    k0: int
    exact: bool
    order: int
    mask: np.ndarray
    phases: np.ndarray  # exponents mod order (exact) or turns (float)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.nonzero(self.mask)[0])

    def values(self) -> list:
        """CycScalar list (exact) or complex list (float)."""
        if self.exact:
            return [
                RootOfUnity(self.order, int(p)) if ok else None
                for p, ok in zip(self.phases, self.mask)
            ]
        return [complex(np.exp(2j * np.pi * p)) if ok else 0j for p, ok in zip(self.phases, self.mask)]

    def same_values(self, other: "RCoefficients") -> bool:
        if not np.array_equal(self.mask, other.mask):
            return False
        if self.exact and other.exact:
            diff = np.mod(self.phases - other.phases, self.order)
            return bool(np.all(diff[self.mask] == 0))
        a = np.exp(2j * np.pi * np.asarray(self.phases, dtype=complex))[self.mask]
        b = np.exp(2j * np.pi * np.asarray(other.phases, dtype=complex))[other.mask]
        return bool(np.allclose(a, b, atol=1e-9))


def _require_invariant(A: MappingClass, character: TorusCharacter) -> None:
    if not is_invariant(A, character.sign, character.angle1, character.angle2):
        k1, k2 = invariance_integers(A, character.sign, character.angle1, character.angle2)
        raise NotInvariant(
            f"character {character.describe()} is not invariant under {A.entries()}: "
            f"invariance integers are ({k1}, {k2})"
        )


def build_r_coeffs(
    A: MappingClass,
    n: int,
    character: TorusCharacter,
    *,
    mode: str = "auto",
    bezout_shift: int = 0,
    method: str = "step",
) -> RCoefficients:
    """Weight vector for the intertwiner.

    ``method="step"`` walks k0, k0 + b, k0 + 2b, ... (k0 - b, ... on the minus
    branch).  ``method="bezout"`` fills k0 + t m directly through the Bezout
    coefficient r; the two must agree for every choice of Bezout pair.
    """
    require_odd(n)
    _require_invariant(A, character)
    P = _phases(character, n, mode)
    a, b, c, d = A.entries()
    m, r, s = bezout(b, n, bezout_shift)
    n_prime = n // m
    eu, ev, Q, H = P.eu, P.ev, P.Q, P.H
    plus = character.sign == "plus"
    if plus:
        base = n_prime * b * ev + n_prime * (a - 1) * eu + a * b * n_prime * n_prime * H
        step_k = a * n_prime * Q
    else:
        base = n_prime * (-b * ev - (a + 1) * eu) + a * b * n_prime * n_prime * H
        step_k = -a * n_prime * Q
    hits = [k for k in range(m) if P.is_one(base + step_k * k)]
    if len(hits) != 1:
        raise InvalidWeightSystem(f"expected exactly one k0 in [0,{m}), found {hits}")
    k0 = hits[0]

    if method == "step":
        T = np.arange(n_prime, dtype=np.int64)
    elif method == "bezout":
        T = np.arange(n_prime, dtype=np.int64) * r
    else:
        raise ValueError(f"unknown method {method!r}")
    if plus:
        idx = np.mod(k0 + T * b, n)
        ph = T * b * ev + T * (a - 1) * eu + a * (2 * T * k0 + b * T * T) * H
    else:
        idx = np.mod(k0 - T * b, n)
        ph = T * (-b * ev - (a + 1) * eu) + (-2 * T * a * k0 + a * b * T * T) * H
    mask = np.zeros(n, dtype=bool)
    mask[idx] = True
    if mask.sum() != n_prime:
        raise InvalidWeightSystem("weight indices collide")
    phases = np.zeros(n, dtype=np.int64 if P.exact else complex)
    phases[idx] = np.mod(ph, P.N) if P.exact else ph
    return RCoefficients(n, m, n_prime, r, s, k0, P.exact, P.N, mask, phases)


# ---------------------------------------------------------------------------
# the intertwiner


@dataclass
class IntertwinerResult:
    """An unnormalized intertwiner together with its trace and metadata."""

    n: int
    n_prime: int
    matrix: Union[ScaledPermMatrix, np.ndarray]
    kind: str = "torus"
    A: Optional[MappingClass] = None
    character: Optional[TorusCharacter] = None
    rcoeffs: Optional[RCoefficients] = None
    s1: Optional[Fraction] = None
    s2: Optional[Fraction] = None
    shift_sign: int = 0
    _det_log: Optional[float] = field(default=None, repr=False)

    @property
    def exact(self) -> bool:
        return isinstance(self.matrix, ScaledPermMatrix)

    @property
    def sign(self) -> Optional[str]:
        return self.character.sign if self.character else None

    @property
    def normalization(self) -> float:
        return self.n_prime ** -0.5

    @property
    def trace_exact(self) -> Optional[CycInt]:
        return self.matrix.trace() if self.exact else None

    @property
    def trace_complex(self) -> complex:
        if self.exact:
            return self.matrix.trace().eval_complex()
        return complex(np.trace(self.matrix))

    def complex_matrix(self) -> np.ndarray:
        return self.matrix.to_complex() if self.exact else self.matrix

    def abs_det_log(self) -> float:
        """log |det| of the unnormalized matrix (float LU)."""
        if self._det_log is None:
            _, logdet = np.linalg.slogdet(self.complex_matrix())
            self._det_log = float(logdet)
        return self._det_log

    def abs_trace_sq_exact(self) -> Optional[Fraction]:
        """|trace of the normalized matrix|^2 when it is rational, else None."""
        if not self.exact:
            return None
        value = abs_sq(self.matrix.trace()).as_integer()
        return None if value is None else Fraction(value, self.n_prime)

    @property
    def abs_trace(self) -> float:
        exact = self.abs_trace_sq_exact()
        if exact is not None:
            return math.sqrt(exact)
        return abs(self.trace_complex) * self.normalization


def lift_integers(A: MappingClass, character: TorusCharacter) -> tuple[Fraction, Fraction]:
    """(s1, s2): the integers entering the closed-form trace for this lift."""
    a, b, c, d = A.entries()
    r1, r2 = character.r1, character.r2
    k1, k2 = invariance_integers(A, character.sign, character.angle1, character.angle2)
    if character.sign == "plus":
        return r1 * (a - 1) + r2 * b + k1, r1 * c + r2 * (d - 1) + k2
    return r1 * (a + 1) + r2 * b - k1, r1 * c + r2 * (d + 1) - k2


def build_intertwiner(
    A: MappingClass,
    n: int,
    character: TorusCharacter,
    *,
    mode: str = "auto",
    shift_sign: Optional[int] = None,
) -> IntertwinerResult:
    """Lambda[k, t] = r_{k -/+ t d} (v^{d-/+1} u^{c})^{+-t} (q^{1/2})^{...}.

    ``shift_sign`` overrides the index shift direction (default -1 on the
    plus branch, +1 on the minus branch).
    """
    rc = build_r_coeffs(A, n, character, mode=mode)
    P = _phases(character, n, mode)
    a, b, c, d = A.entries()
    eu, ev, H = P.eu, P.ev, P.H
    plus = character.sign == "plus"
    if shift_sign is None:
        shift_sign = -1 if plus else 1
    k = np.arange(n, dtype=np.int64)[:, None]
    t = np.arange(n, dtype=np.int64)[None, :]
    src = np.mod(k + shift_sign * t * d, n)
    mask = rc.mask[src]
    rph = rc.phases[src]
    if plus:
        ph = rph + t * ((d - 1) * ev + c * eu) + c * (2 * t * k - d * t * t) * H
    else:
        ph = rph + t * ((-d - 1) * ev - c * eu) + (-2 * t * c * k - c * d * t * t) * H
    values = P.values(ph, mask)
    matrix = ScaledPermMatrix(P.N, values) if P.exact else values
    s1, s2 = lift_integers(A, character)
    return IntertwinerResult(
        n=n,
        n_prime=rc.n_prime,
        matrix=matrix,
        kind="torus",
        A=A,
        character=character,
        rcoeffs=rc,
        s1=s1,
        s2=s2,
        shift_sign=shift_sign,
    )


def build_verified_intertwiner(
    A: MappingClass, n: int, character: TorusCharacter, *, mode: str = "auto"
) -> tuple[IntertwinerResult, bool, bool]:
    """(result, verified, used_fallback): retry with the opposite index shift if needed."""
    result = build_intertwiner(A, n, character, mode=mode)
    if verify_intertwining(result):
        return result, True, False
    other = build_intertwiner(A, n, character, mode=mode, shift_sign=-result.shift_sign)
    if verify_intertwining(other):
        return other, True, True
    return result, False, False


def _generator_pairs(result: IntertwinerResult):
    """(source, target) pairs with target @ Lambda == Lambda @ source expected."""
    A, ch, n = result.A, result.character, result.n
    lattice = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    if result.exact:
        u, v = ch.lifts(n)
        X, Y = build_rho(n, u, v)
        for i, j in lattice:
            yield theta_matrix(X, Y, i, j), theta_matrix(X, Y, *apply_FA_lattice(A, ch.sign, i, j))
    else:
        u, v = ch.lifts_complex(n)
        X, Y = build_rho(n, u, v)
        for i, j in lattice:
            yield (
                theta_matrix_complex(X, Y, i, j),
                theta_matrix_complex(X, Y, *apply_FA_lattice(A, ch.sign, i, j)),
            )


def verify_intertwining(result: IntertwinerResult, tol: float = 1e-9) -> bool:
    """Lambda rho(W) = rho(F_A(W)) Lambda for W = X, Y, X^-1, Y^-1 (exact when possible)."""
    if result.kind == "punctured":
        from .punctured_torus import verify_periodic_intertwiner

        return verify_periodic_intertwiner(result)
    L = result.matrix
    for source, target in _generator_pairs(result):
        if result.exact:
            if not (L @ source).equals(target @ L):
                return False
        else:
            scale = max(1.0, float(np.abs(L).max()))
            if np.abs(L @ source - target @ L).max() > tol * result.n * scale:
                return False
    return True


# ---------------------------------------------------------------------------
# determinant


@dataclass(frozen=True)
class DetCheck:
    ok: bool
    log_abs_det: float
    expected_log: float
    blocks: int
    block_size: int
    blocks_ok: bool
    max_block_rel_err: float

    def __bool__(self) -> bool:
        return self.ok


def _column_blocks(mask: np.ndarray, m: int) -> Optional[list[tuple[np.ndarray, np.ndarray]]]:
    """Split columns by residue mod m; each class must own a disjoint set of rows."""
    n = mask.shape[0]
    blocks, seen = [], np.zeros(n, dtype=bool)
    for l in range(m):
        cols = np.arange(l, n, m)
        rows = np.nonzero(mask[:, cols].any(axis=1))[0]
        if len(rows) != len(cols) or seen[rows].any():
            return None
        seen[rows] = True
        blocks.append((rows, cols))
    return blocks


def abs_det_check(
    result: IntertwinerResult,
    rel_tol: float = 1e-6,
    block_tol: float = 1e-8,
) -> DetCheck:
    """|det Lambda| = n'^{n/2} overall and n'^{n'/2} on each of the m diagonal blocks."""
    n, n_prime = result.n, result.n_prime
    if n > DET_MAX_N:
        raise TooLarge(f"dense determinant limited to n <= {DET_MAX_N}, got {n}")
    M = result.complex_matrix()
    logdet = result.abs_det_log()
    expected = 0.5 * n * math.log(n_prime)
    ok = abs(math.expm1(logdet - expected)) <= rel_tol
    m = n // n_prime
    mask = np.abs(M) > 0.5
    blocks = _column_blocks(mask, m)
    worst = math.inf
    blocks_ok = blocks is not None
    if blocks is not None:
        worst = 0.0
        target = 0.5 * n_prime * math.log(n_prime)
        for rows, cols in blocks:
            _, lb = np.linalg.slogdet(M[np.ix_(rows, cols)])
            worst = max(worst, abs(math.expm1(float(lb) - target)))
        blocks_ok = worst <= block_tol
    return DetCheck(ok and blocks_ok, logdet, expected, m, n_prime, blocks_ok, worst)


# ---------------------------------------------------------------------------
# closed forms


def gauss_sum(k: int, n: int) -> CycInt:
    """sum_{t<n} (-q^{1/2})^{k t^2} in Z[zeta_{2n}]."""
    require_odd(n)
    t = np.arange(n, dtype=np.int64)
    # -zeta_{2n} = zeta_{2n}^{n+1}
    return CycInt.from_exponents(2 * n, np.mod((n + 1) * k * t * t, 2 * n))


def closed_form_sum(
    A: MappingClass, n: int, s1: int, s2: int, r: int, sign: str, variant: str
) -> CycInt:
    """sum_t ((-1)^{T r})^t (q^{1/2})^{r (T t^2 + 2 L t)}, T = a + d -/+ 2."""
    a, b, c, d = A.entries()
    T = a + d - 2 if sign_value(sign) == 1 else a + d + 2
    if variant == VARIANT_ONE_PLUS_D:
        L = s1 * (1 + d) - s2 * b
    elif variant == VARIANT_ONE_MINUS_D:
        L = s1 * (1 - d) + s2 * b
    else:
        raise ValueError(f"unknown variant {variant!r}")
    t = np.arange(n, dtype=np.int64)
    e = n * ((T * r * t) % 2) + r * (T * t * t + 2 * L * t)
    return CycInt.from_exponents(2 * n, np.mod(e, 2 * n))


@dataclass(frozen=True)
class ClosedFormTrace:
    values: dict

    def compare(self, trace: CycInt) -> dict:
        """Per variant: 'equal', 'modulus' (same |.|^2 only) or 'none'."""
        out = {}
        target = abs_sq(trace)
        for tag, value in self.values.items():
            if value == trace:
                out[tag] = "equal"
            elif abs_sq(value) == target:
                out[tag] = "modulus"
            else:
                out[tag] = "none"
        return out

    def matched(self, trace: CycInt) -> Optional[str]:
        cmp = self.compare(trace)
        for grade in ("equal", "modulus"):
            for tag, g in cmp.items():
                if g == grade:
                    return tag
        return None


def closed_form_trace(A: MappingClass, n: int, s1: int, s2: int, r: int, sign: str) -> ClosedFormTrace:
    """Both linear-coefficient variants of the unnormalized closed-form trace."""
    require_odd(n)
    if math.gcd(A.b, n) != 1:
        raise NotCoprime(f"gcd(b={A.b}, n={n}) != 1")
    return ClosedFormTrace(
        {
            tag: closed_form_sum(A, n, s1, s2, r, sign, tag)
            for tag in (VARIANT_ONE_PLUS_D, VARIANT_ONE_MINUS_D)
        }
    )


def closed_form_for(A: MappingClass, n: int, character: TorusCharacter) -> ClosedFormTrace:
    s1, s2 = lift_integers(A, character)
    if not (isinstance(s1, Fraction) and s1.denominator == 1 and s2.denominator == 1):
        raise ValueError("closed form needs an exact invariant character")
    _, r, _ = bezout(A.b, n)
    return closed_form_trace(A, n, int(s1), int(s2), r, character.sign)


# ---------------------------------------------------------------------------
# periodic classes


@dataclass(frozen=True)
class PowerCheck:
    k: int
    is_scalar: bool
    scalar: Optional[CycInt]
    unit_after_normalization: bool


def power_order(A: MappingClass, sign: str) -> int:
    """Smallest k with F_{A,sign}^k = id, i.e. the order of A (plus) or -A (minus)."""
    if not A.is_periodic():
        raise NotPeriodic(f"{A.entries()} is not periodic")
    if sign == "plus":
        return A.order()
    return MappingClass(-A.a, -A.b, -A.c, -A.d).order()


def periodic_power_check(A: MappingClass, result: IntertwinerResult) -> PowerCheck:
    """Lambda^k is an exact scalar c Id with |c|^2 = n'^k, k the order of F_{A,sign}."""
    k = power_order(A, result.sign or "plus")
    if not result.exact:
        raise TypeError("periodic_power_check needs an exact intertwiner")
    P = matrix_power_exact(result.matrix, k)
    c = P.scalar_value()
    if c is None:
        return PowerCheck(k, False, None, False)
    unit = abs_sq(c).as_integer() == result.n_prime**k
    return PowerCheck(k, True, c, unit)


def matrix_power_exact(L: ScaledPermMatrix, k: int, method: str = "auto") -> CycMatrix:
    """L^k over Z[zeta_N]; ``method`` is auto, evaluation or product."""
    if method in ("auto", "evaluation"):
        P = power_by_evaluation(L, k)
        if P is not None:
            return P
        if method == "evaluation":
            raise ValueError("evaluation path unavailable for this size")
    out: Union[ScaledPermMatrix, CycMatrix] = L
    for _ in range(k - 1):
        out = out @ L
        if isinstance(out, CycMatrix) and out.data.dtype == object:
            out = out.compact()
    return out.to_dense() if isinstance(out, ScaledPermMatrix) else out


def trace_independence_check(
    A: MappingClass,
    n: int,
    character: TorusCharacter,
    lifts: Sequence[tuple[int, int]],
    mode: str = "exact",
) -> bool:
    """|trace|^2 agrees exactly across lift offsets (r1, r2)."""
    values = []
    for r1, r2 in lifts:
        res = build_intertwiner(A, n, character.with_lifts(r1, r2), mode=mode)
        if res.exact:
            values.append(abs_sq(res.matrix.trace()))
        else:
            values.append(abs(res.trace_complex) ** 2)
    if not values:
        return True
    first = values[0]
    if isinstance(first, CycInt):
        return all(v == first for v in values[1:])
    return all(abs(v - first) <= 1e-8 * max(1.0, first) for v in values[1:])


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class TraceRow:
    n: int
    abs_trace: float
    abs_trace_sq_exact: Optional[Fraction]
    log_trace_over_n: float  # -inf for an exact zero
    is_exact_zero: bool
    variant_matched: Optional[str]
    path: str
    verified: Optional[bool] = None
    seconds: float = 0.0


def _row_from_exact(n: int, n_prime: int, trace: CycInt, path: str, variant, verified, seconds) -> TraceRow:
    zero = trace.is_zero()
    sq = abs_sq(trace).as_integer()
    exact = None if sq is None else Fraction(sq, n_prime)
    if zero:
        return TraceRow(n, 0.0, Fraction(0), -math.inf, True, variant, path, verified, seconds)
    if exact is not None:
        value = math.sqrt(exact)
    else:
        value = abs(trace.eval_complex()) / math.sqrt(n_prime)
    return TraceRow(n, value, exact, math.log(value) / n, False, variant, path, verified, seconds)


def choose_path(A: MappingClass, n: int, character: TorusCharacter, path: str, mode: str) -> str:
    if path != "auto":
        return path
    if mode != "float" and character.exact and math.gcd(A.b, n) == 1:
        return "closed"
    return "exact" if resolve_mode(character, n, mode) == "exact" else "float"


def trace_row(
    A: MappingClass,
    n: int,
    character: TorusCharacter,
    *,
    path: str = "auto",
    mode: str = "auto",
    verify: bool = False,
) -> TraceRow:
    """One sweep row; ``path`` is closed, exact, float or auto."""
    require_odd(n)
    _require_invariant(A, character)
    start = time.perf_counter()
    path = choose_path(A, n, character, path, mode)
    if path == "closed":
        cf = closed_form_for(A, n, character)
        tag = TRACE_VARIANT[character.sign]
        trace = cf.values[tag]
        verified = None
        if verify:
            res = build_intertwiner(A, n, character, mode="exact")
            verified = verify_intertwining(res) and cf.compare(res.matrix.trace())[tag] == "equal"
        return _row_from_exact(n, n, trace, "closed", tag, verified, time.perf_counter() - start)
    if path == "exact":
        res = build_intertwiner(A, n, character, mode="exact")
        verified = verify_intertwining(res) if verify else None
        variant = None
        if math.gcd(A.b, n) == 1:
            variant = closed_form_for(A, n, character).matched(res.matrix.trace())
        return _row_from_exact(
            n, res.n_prime, res.matrix.trace(), "exact", variant, verified, time.perf_counter() - start
        )
    if path == "float":
        res = build_intertwiner(A, n, character, mode="float")
        verified = verify_intertwining(res) if verify else None
        value = abs(res.trace_complex) * res.normalization
        tiny = value < 1e-9 * n
        return TraceRow(
            n,
            value,
            None,
            -math.inf if tiny else math.log(value) / n,
            False,
            None,
            "float",
            verified,
            time.perf_counter() - start,
        )
    raise ValueError(f"unknown path {path!r}")


@dataclass(frozen=True)
class SweepResult:
    rows: list
    max_log_trace_over_n: float
    zeros: list
    bound_ok: bool


def summarize(rows: Iterable[TraceRow]) -> SweepResult:
    rows = sorted(rows, key=lambda r: r.n)
    nonzero = [r for r in rows if r.log_trace_over_n != -math.inf]
    mx = max((r.log_trace_over_n for r in nonzero), default=-math.inf)
    zeros = [r.n for r in rows if r.is_exact_zero]
    bound_ok = all(r.log_trace_over_n <= 1.5 * math.log(r.n) / r.n + 1e-12 for r in nonzero)
    return SweepResult(rows, mx, zeros, bound_ok)


def asymptotic_sweep(
    A: MappingClass,
    character: TorusCharacter,
    n_list: Iterable[int],
    *,
    path: str = "auto",
    mode: str = "auto",
) -> SweepResult:
    """Rows (n, |Trace|, log|Trace|/n) with the n^{3/2} bound checked on every nonzero row."""
    return summarize(trace_row(A, n, character, path=path, mode=mode) for n in n_list)


def trace_bound_holds(result: IntertwinerResult) -> bool:
    """|normalized trace| <= n^{3/2}, decided by integer comparisons on squares."""
    n, n_prime = result.n, result.n_prime
    limit = n**3 * n_prime  # bound on |unnormalized trace|^2
    if not result.exact:
        return abs(result.trace_complex) ** 2 <= limit * (1 + 1e-12)
    sq = abs_sq(result.matrix.trace()).as_integer()
    if sq is not None:
        return sq <= limit
    # the trace is a sum of at most n unit terms
    count = int((result.matrix.diagonal_exponents() >= 0).sum())
    return count * count <= limit
