"""Chekhov-Fock algebra of the once-punctured torus and its representations.

Three generators with X1 X2 = q X2 X1, X2 X3 = q X3 X2, X3 X1 = q X1 X3 act
on C^n (n odd, q = e^{2 pi i / n}) by

    X1 w_i = r1 q^i w_i,   X2 w_i = r2 q^{-i} w_{i+1},   X3 w_i = r3 w_{i-1}.

Weyl brackets rescale an ordered product of generator powers by
(q^{1/2})^{-sum_{j<l} e_j e_l w(g_j, g_l)}, where X_g X_h = q^{w(g,h)} X_h X_g.
The commutation exponents w are read off the matrices rather than typed in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .cyclotomic import CycInt, RootOfUnity, abs_sq, lcm
from .exactmat import CycMatrix, ScaledPermMatrix
from .intertwiner import IntertwinerResult, gauss_sum
from .quantum_torus import MappingClass, chebyshev_apply
from .torus_rep import require_odd

Word = Sequence[tuple[int, int]]  # (generator index 0..2, exponent)


class ShadowFailure(RuntimeError):
    """T_n of a skein generator image was not scalar; indicates a construction bug."""


class RelationFailure(RuntimeError):
    """A defining q-commutation relation failed on constructed matrices."""


def _q_commutation(A: ScaledPermMatrix, B: ScaledPermMatrix, n: int) -> Optional[int]:
    """w with A B = q^w B A, or None if the products differ by a non-constant factor."""
    AB, BA = A @ B, B @ A
    if not np.array_equal(AB.mask, BA.mask):
        return None
    diff = np.unique(np.mod(AB.exps[AB.mask] - BA.exps[BA.mask], AB.order))
    Q = AB.order // n
    if len(diff) != 1 or diff[0] % Q:
        return None
    w = int(diff[0]) // Q
    return w - n if w > n // 2 else w


@dataclass
class CFRep:
    """Representation of the Chekhov-Fock algebra with unit parameters r1, r2, r3."""

    n: int
    r: tuple[RootOfUnity, RootOfUnity, RootOfUnity]
    order: int
    X: tuple[ScaledPermMatrix, ScaledPermMatrix, ScaledPermMatrix]
    omega: tuple[tuple[int, int, int], ...]

    @property
    def half_q(self) -> RootOfUnity:
        return RootOfUnity(2 * self.n, 1)

    def generator(self, g: int, e: int) -> ScaledPermMatrix:
        return self.X[g].power(e)

    def bracket(self, word: Word) -> ScaledPermMatrix:
        """Weyl-ordered monomial [X_{g1}^{e1} ... X_{gk}^{ek}]."""
        M = ScaledPermMatrix.identity(self.n, self.order)
        sigma = 0
        for j, (g, e) in enumerate(word):
            M = M @ self.generator(g, e)
            for g2, e2 in word[j + 1 :]:
                sigma += e * e2 * self.omega[g][g2]
        return M.scale(self.half_q ** (-sigma))


def build_cf_rep(n: int, r1: RootOfUnity, r2: RootOfUnity, r3: RootOfUnity) -> CFRep:
    require_odd(n)
    N = lcm(2 * n, r1.order, r2.order, r3.order)
    Q = N // n
    idx = np.arange(n)
    e1, e2, e3 = (z.rescale(N).exponent for z in (r1, r2, r3))
    X1 = ScaledPermMatrix.monomial(N, idx, e1 + Q * idx)
    X2 = ScaledPermMatrix.monomial(N, idx + 1, e2 - Q * idx)
    X3 = ScaledPermMatrix.monomial(N, idx - 1, np.full(n, e3))
    X = (X1, X2, X3)
    omega = [[0] * 3 for _ in range(3)]
    for g in range(3):
        for h in range(3):
            if g != h:
                w = _q_commutation(X[g], X[h], n)
                if w is None:
                    raise RelationFailure(f"X{g + 1}, X{h + 1} do not q-commute")
                omega[g][h] = w
    if n > 1 and (omega[0][1], omega[1][2], omega[2][0]) != (1, 1, 1):
        raise RelationFailure(f"unexpected commutation exponents {omega}")
    return CFRep(n, (r1, r2, r3), N, X, tuple(tuple(row) for row in omega))


def _k_terms(rep: CFRep, i: int) -> list[ScaledPermMatrix]:
    """The three monomials of K_{i+1}: [XjXk] + [Xj^-1 Xk^-1] + [Xj Xk^-1]."""
    j, k = (i + 1) % 3, (i + 2) % 3
    return [
        rep.bracket([(j, 1), (k, 1)]),
        rep.bracket([(j, -1), (k, -1)]),
        rep.bracket([(j, 1), (k, -1)]),
    ]


def _sum(terms: Sequence[ScaledPermMatrix]) -> CycMatrix:
    total = terms[0].to_dense()
    for t in terms[1:]:
        total = total + t
    return total


def embed_skein_generators(rep: CFRep) -> tuple[CycMatrix, CycMatrix, CycMatrix, CycMatrix]:
    K = tuple(_sum(_k_terms(rep, i)) for i in range(3))
    P = _sum([rep.bracket([(0, 2), (1, 2), (2, 2)]), rep.bracket([(0, -2), (1, -2), (2, -2)])])
    return K[0], K[1], K[2], P


def _mul(A: CycMatrix, B: CycMatrix) -> CycMatrix:
    out = A @ B
    return out.compact() if out.data.dtype == object else out


def skein_residuals(rep: CFRep) -> list[CycMatrix]:
    """q^{-1/2} Ki Kj - q^{1/2} Kj Ki - (q^{-1} - q) Kk for the three cyclic triples."""
    K = embed_skein_generators(rep)[:3]
    hq = rep.half_q
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        lhs = _mul(K[i], K[j]).scale(hq ** -1) - _mul(K[j], K[i]).scale(hq)
        rhs = K[k].scale(hq ** -2) - K[k].scale(hq ** 2)
        out.append(lhs - rhs)
    return out


def puncture_formula_residual(rep: CFRep) -> CycMatrix:
    """P - (q^{-1/2} K1 K2 K3 - q^{-1} K1^2 - q K2^2 - q^{-1} K3^2 + q + q^{-1})."""
    K1, K2, K3, P = embed_skein_generators(rep)
    hq = rep.half_q
    n, N = rep.n, rep.order
    scal = CycInt.from_root(hq**2) + CycInt.from_root(hq**-2)
    rhs = (
        _mul(_mul(K1, K2), K3).scale(hq**-1)
        - _mul(K1, K1).scale(hq**-2)
        - _mul(K2, K2).scale(hq**2)
        - _mul(K3, K3).scale(hq**-2)
        + CycMatrix.scalar(n, scal.rescale(lcm(N, scal.order)))
    )
    return P - rhs


def puncture_scalar(rep: CFRep) -> CycInt:
    """(r1 r2 r3)^2 q + (r1 r2 r3)^-2 q^-1, the predicted value of the puncture element."""
    R = rep.r[0] * rep.r[1] * rep.r[2]
    q = rep.half_q**2
    return CycInt.from_root((R**2) * q) + CycInt.from_root((R**-2) * q.inverse())


def triple_bracket_scalar(rep: CFRep) -> Optional[CycInt]:
    """Scalar value of [X1 X2 X3] (expected r1 r2 r3 q^{1/2})."""
    return rep.bracket([(0, 1), (1, 1), (2, 1)]).to_dense().scalar_value()


def central(rep: CFRep) -> bool:
    K1, K2, K3, P = embed_skein_generators(rep)
    return all((_mul(P, K) - _mul(K, P)).is_zero() for K in (K1, K2, K3))


def chebyshev_matrix(k: int, M: CycMatrix) -> CycMatrix:
    n = M.shape[0]
    two = CycMatrix.identity(n, M.order).scale(2)
    return chebyshev_apply(k, M, two, _mul, lambda a, b: a - b)


def chebyshev_scalar(k: int, x: CycInt) -> CycInt:
    return chebyshev_apply(
        k, x, CycInt.integer(2, x.order), lambda a, b: (a * b).reduce(), lambda a, b: a - b
    )


@dataclass(frozen=True)
class ShadowCheck:
    t: tuple[CycInt, CycInt, CycInt]
    p: CycInt
    ok: bool
    traces_match: bool  # t_i from T_n(K_i) equals the formula in r^n
    puncture_match: bool  # T_n(p) = -t1 t2 t3 - t1^2 - t2^2 - t3^2 + 2


def predicted_t(rep: CFRep) -> tuple[CycInt, CycInt, CycInt]:
    """t_i = -(rj^n rk^n + rj^-n rk^-n + rj^n rk^-n) for (i, j, k) cyclic."""
    n = rep.n
    out = []
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        a, b = rep.r[j] ** n, rep.r[k] ** n
        out.append(
            -(CycInt.from_root(a * b) + CycInt.from_root((a * b).inverse()) + CycInt.from_root(a * b.inverse()))
        )
    return out[0], out[1], out[2]


def shadow_equations_check(rep: CFRep) -> ShadowCheck:
    """T_n(K_i) = t_i Id, and T_n(p) is the stated polynomial in the t_i."""
    K1, K2, K3, P = embed_skein_generators(rep)
    t = []
    for K in (K1, K2, K3):
        value = chebyshev_matrix(rep.n, K).scalar_value()
        if value is None:
            raise ShadowFailure("T_n(K) is not a scalar matrix")
        t.append(value)
    p = P.scalar_value()
    if p is None:
        raise ShadowFailure("the puncture element is not scalar")
    pred = predicted_t(rep)
    traces_match = all(a == b for a, b in zip(t, pred))
    t1, t2, t3 = t
    rhs = -(t1 * t2 * t3) - t1 * t1 - t2 * t2 - t3 * t3 + 2
    puncture_match = chebyshev_scalar(rep.n, p) == rhs
    return ShadowCheck((t1, t2, t3), p, traces_match and puncture_match, traces_match, puncture_match)


def chebyshev_sum_check(rep: CFRep) -> bool:
    """T_n(x + x^-1 + y) = x^n + x^-n + y^n for x = [X2 X3], y = [X2 X3^-1]."""
    x, xinv, y = _k_terms(rep, 0)
    lhs = chebyshev_matrix(rep.n, _sum([x, xinv, y]))
    rhs = _sum([x.power(rep.n), xinv.power(rep.n), y.power(rep.n)])
    return lhs.equals(rhs)


# ---------------------------------------------------------------------------
# square-root algebra and the order-3 intertwiner


@dataclass
class SqCFRep:
    n: int
    y: tuple[RootOfUnity, RootOfUnity, RootOfUnity]
    order: int
    Y: tuple[ScaledPermMatrix, ScaledPermMatrix, ScaledPermMatrix]


def build_sq_rep(
    n: int,
    y1: RootOfUnity = RootOfUnity(1, 0),
    y2: RootOfUnity = RootOfUnity(1, 0),
    y3: RootOfUnity = RootOfUnity(1, 0),
) -> SqCFRep:
    """Y1 w_i = y1 q^{4i} w_i, Y2 w_i = y2 q^{-2i} w_{i+1}, Y3 w_i = y3 q^{-2i} w_{i-1}."""
    require_odd(n)
    N = lcm(n, y1.order, y2.order, y3.order)
    Q = N // n
    idx = np.arange(n)
    e1, e2, e3 = (z.rescale(N).exponent for z in (y1, y2, y3))
    Y = (
        ScaledPermMatrix.monomial(N, idx, e1 + 4 * Q * idx),
        ScaledPermMatrix.monomial(N, idx + 1, e2 - 2 * Q * idx),
        ScaledPermMatrix.monomial(N, idx - 1, e3 - 2 * Q * idx),
    )
    for g in range(3):
        h = (g + 1) % 3
        w = _q_commutation(Y[g], Y[h], n)
        if n > 1 and (w is None or (w - 4) % n):
            raise RelationFailure(f"Y{g + 1} Y{h + 1} != q^4 Y{h + 1} Y{g + 1}")
    return SqCFRep(n, (y1, y2, y3), N, Y)


# Y1 -> Y3, Y2 -> Y1, Y3 -> Y2: the relabeling induced by the order-3 class.
PERIODIC_CLASS = MappingClass(0, 1, -1, -1)
RELABEL = (2, 0, 1)


def _periodic_matrix(n: int) -> ScaledPermMatrix:
    i = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    return ScaledPermMatrix(n, np.mod(k * k + i * i + 4 * i * k + i - k, n))


def build_periodic_intertwiner(n: int) -> IntertwinerResult:
    """Lambda[i, k] = q^{k^2 + i^2 + 4ik + i - k} with q = e^{2 pi i / n}."""
    require_odd(n)
    if n < 3:
        raise ValueError("n must be at least 3")
    return IntertwinerResult(
        n=n,
        n_prime=n,
        matrix=_periodic_matrix(n),
        kind="punctured",
        A=PERIODIC_CLASS,
    )


def verify_periodic_intertwiner(result: IntertwinerResult) -> bool:
    """rho'(Y_i) Lambda = Lambda rho(Y_i) with rho' the relabeled representation."""
    rep = build_sq_rep(result.n)
    L = result.matrix
    return all(
        (rep.Y[RELABEL[g]] @ L).equals(L @ rep.Y[g]) for g in range(3)
    )


def periodic_det_check(n: int, rel_tol: float = 1e-6) -> tuple[bool, float]:
    """|det Lambda| = n^{n/2} by float LU; returns (ok, relative error)."""
    M = build_periodic_intertwiner(n).complex_matrix()
    _, logdet = np.linalg.slogdet(M)
    err = abs(math.expm1(float(logdet) - 0.5 * n * math.log(n)))
    return err <= rel_tol, err


def periodic_trace_exact(n: int) -> CycInt:
    """Trace of the unnormalized intertwiner: sum_i q^{6 i^2}."""
    return build_periodic_intertwiner(n).matrix.trace()


@dataclass(frozen=True)
class PeriodicRow:
    n: int
    abs_trace: float
    abs_trace_sq_exact: int
    log_trace_over_n: float
    matrix_checked: bool
    path: str


def periodic_trace_sweep(n_list, matrix_cap: int = 99) -> list[PeriodicRow]:
    """|normalized trace|^2 = gcd(6, n) via the Gauss-sum path, cross-checked on the matrix for n <= cap."""
    rows = []
    for n in n_list:
        require_odd(n)
        if n < 3:
            raise ValueError("n must be at least 3")
        # sum_i q^{6 i^2} = sum_i (-q^{1/2})^{12 i^2}
        sq = abs_sq(gauss_sum(12, n)).as_integer()
        if sq is None or sq % n:
            raise RuntimeError(f"Gauss sum modulus not an integer multiple of n at n={n}")
        value = sq // n
        checked = False
        if n <= matrix_cap:
            msq = abs_sq(periodic_trace_exact(n)).as_integer()
            if msq != sq:
                raise RuntimeError(f"matrix trace disagrees with Gauss sum at n={n}")
            checked = True
        rows.append(
            PeriodicRow(n, math.sqrt(value), value, 0.5 * math.log(value) / n, checked,
                        "closed+exact" if checked else "closed")
        )
    return rows


def find_conjugator(A: Sequence[np.ndarray], B: Sequence[np.ndarray], tol: float = 1e-8) -> Optional[np.ndarray]:
    """An invertible M with M A_i = B_i M for all i, from the null space of the linear system."""
    n = A[0].shape[0]
    eye = np.eye(n)
    # column-major vec(M A - B M) = (A^T kron I - I kron B) vec(M)
    system = np.vstack([np.kron(a.T, eye) - np.kron(eye, b) for a, b in zip(A, B)])
    _, sv, vh = np.linalg.svd(system)
    padded = np.concatenate([sv, np.zeros(n * n - sv.size)])
    null = vh[padded < tol * max(1.0, sv[0])]
    if len(null) == 0:
        return None
    # irreducible case: the null space is one-dimensional
    M = null[0].conj().reshape(n, n, order="F")
    if abs(np.linalg.det(M)) < tol:
        return None
    return M


def complex_generators(rep: Union[CFRep, SqCFRep]) -> list[np.ndarray]:
    mats = rep.X if isinstance(rep, CFRep) else rep.Y
    return [m.to_complex() for m in mats]
