"""Exact matrices over Z[zeta_N].

``ScaledPermMatrix`` stores a matrix whose entries are zero or single roots of
unity, as an (n, n) array of exponents with -1 marking zeros.  Representation
matrices and intertwiners all have this shape.  ``CycMatrix`` is the general
dense case: an (rows, cols, N) integer tensor whose last axis holds the
coefficients of zeta_N^0 .. zeta_N^{N-1}.  Products that make several terms
collide in one entry promote to ``CycMatrix``.
"""

from __future__ import annotations

import math
from typing import Optional, Union

import numpy as np

from .cyclotomic import CycInt, RootOfUnity, lcm, reduce_dense, rescale

_INT64_SAFE = 2**62
ABSENT = -1


def _maxabs(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if arr.dtype == object:
        return max(abs(int(v)) for v in arr.flat)
    return int(np.abs(arr).max())


def _fits(bound: int) -> bool:
    return bound < _INT64_SAFE


class ScaledPermMatrix:
    """Square matrix with entries in {0} union mu_N."""

    __slots__ = ("n", "order", "exps")

    def __init__(self, order: int, exps: np.ndarray):
        exps = np.asarray(exps, dtype=np.int64)
        if exps.ndim != 2 or exps.shape[0] != exps.shape[1]:
            raise ValueError("exponent array must be square")
        self.n = exps.shape[0]
        self.order = order
        out = np.where(exps >= 0, np.mod(exps, order), ABSENT)
        self.exps = out

    # constructors ---------------------------------------------------------
    @classmethod
    def identity(cls, n: int, order: int = 1) -> "ScaledPermMatrix":
        e = np.full((n, n), ABSENT, dtype=np.int64)
        np.fill_diagonal(e, 0)
        return cls(order, e)

    @classmethod
    def monomial(cls, order: int, rows: np.ndarray, exps: np.ndarray) -> "ScaledPermMatrix":
        """Column j has its single entry zeta^exps[j] in row rows[j]."""
        n = len(rows)
        e = np.full((n, n), ABSENT, dtype=np.int64)
        e[np.asarray(rows) % n, np.arange(n)] = np.mod(exps, order)
        return cls(order, e)

    # views ----------------------------------------------------------------
    @property
    def mask(self) -> np.ndarray:
        return self.exps >= 0

    def rows(self) -> list[list[tuple[int, RootOfUnity]]]:
        out = []
        for i in range(self.n):
            cols = np.nonzero(self.exps[i] >= 0)[0]
            out.append([(int(j), RootOfUnity(self.order, int(self.exps[i, j]))) for j in cols])
        return out

    def entry(self, i: int, j: int) -> Optional[RootOfUnity]:
        e = int(self.exps[i, j])
        return None if e < 0 else RootOfUnity(self.order, e)

    def nnz_per_row(self) -> np.ndarray:
        return self.mask.sum(axis=1)

    def nnz_per_col(self) -> np.ndarray:
        return self.mask.sum(axis=0)

    def rescale(self, M: int) -> "ScaledPermMatrix":
        if M == self.order:
            return self
        if M % self.order:
            raise ValueError(f"order {self.order} does not divide {M}")
        f = M // self.order
        return ScaledPermMatrix(M, np.where(self.exps >= 0, self.exps * f, ABSENT))

    def to_complex(self) -> np.ndarray:
        z = np.exp(2j * np.pi * np.where(self.mask, self.exps, 0) / self.order)
        return np.where(self.mask, z, 0)

    def to_dense(self) -> "CycMatrix":
        data = np.zeros((self.n, self.n, self.order), dtype=np.int64)
        i, j = np.nonzero(self.mask)
        data[i, j, self.exps[i, j]] = 1
        return CycMatrix(self.order, data)

    def trace(self) -> CycInt:
        d = np.diagonal(self.exps)
        return CycInt.from_exponents(self.order, d[d >= 0])

    def diagonal_exponents(self) -> np.ndarray:
        return np.diagonal(self.exps).copy()

    # algebra ----------------------------------------------------------------
    def scale(self, z: RootOfUnity) -> "ScaledPermMatrix":
        L = lcm(self.order, z.order)
        a = self.rescale(L)
        e = rescale(z, L).exponent
        return ScaledPermMatrix(L, np.where(a.mask, a.exps + e, ABSENT))

    def transpose(self) -> "ScaledPermMatrix":
        return ScaledPermMatrix(self.order, self.exps.T.copy())

    def inverse(self) -> "ScaledPermMatrix":
        """Inverse of a monomial matrix (one unit entry per row and column)."""
        m = self.mask
        if not (np.all(m.sum(axis=0) == 1) and np.all(m.sum(axis=1) == 1)):
            raise ValueError("only monomial matrices are inverted exactly")
        return ScaledPermMatrix(self.order, np.where(m.T, np.mod(-self.exps.T, self.order), ABSENT))

    def power(self, k: int) -> Union["ScaledPermMatrix", "CycMatrix"]:
        if k < 0:
            return self.inverse().power(-k)
        out: Union[ScaledPermMatrix, CycMatrix] = ScaledPermMatrix.identity(self.n, self.order)
        for _ in range(k):
            out = out @ self
        return out

    def __matmul__(self, other):
        if isinstance(other, CycMatrix):
            # (S C)^T = C^T S^T, and C^T S^T is a gather over sparse columns
            return other.transpose_plain()._times_sparse(self.transpose()).transpose_plain()
        if not isinstance(other, ScaledPermMatrix):
            return NotImplemented
        L = lcm(self.order, other.order)
        a, b = self.rescale(L), other.rescale(L)
        ma, mb = a.mask, b.mask
        n = a.n
        if np.all(ma.sum(axis=1) <= 1):
            k = np.argmax(ma, axis=1)
            has = ma[np.arange(n), k]
            rowsB = b.exps[k]
            ea = a.exps[np.arange(n), k][:, None]
            out = np.where(has[:, None] & (rowsB >= 0), ea + rowsB, ABSENT)
            return ScaledPermMatrix(L, out)
        if np.all(mb.sum(axis=0) <= 1):
            k = np.argmax(mb, axis=0)
            has = mb[k, np.arange(n)]
            colsA = a.exps[:, k]
            eb = b.exps[k, np.arange(n)][None, :]
            out = np.where(has[None, :] & (colsA >= 0), colsA + eb, ABSENT)
            return ScaledPermMatrix(L, out)
        counts = ma.astype(np.int32) @ mb.astype(np.int32)
        if counts.max(initial=0) <= 1:
            out = np.full((n, n), ABSENT, dtype=np.int64)
            for i, j in zip(*np.nonzero(counts)):
                k = np.nonzero(ma[i] & mb[:, j])[0][0]
                out[i, j] = a.exps[i, k] + b.exps[k, j]
            return ScaledPermMatrix(L, out)
        return a.to_dense() @ b

    def equals(self, other: "ScaledPermMatrix") -> bool:
        """Exact entrywise equality (exponents compared at a common order)."""
        if self.n != other.n:
            return False
        L = lcm(self.order, other.order)
        a, b = self.rescale(L), other.rescale(L)
        return bool(np.array_equal(a.exps, b.exps))

    def __repr__(self) -> str:
        return f"ScaledPermMatrix(n={self.n}, order={self.order}, nnz={int(self.mask.sum())})"


class CycMatrix:
    """Dense matrix of CycInt values sharing one order N."""

    __slots__ = ("order", "data")

    def __init__(self, order: int, data: np.ndarray):
        if data.ndim != 3 or data.shape[2] != order:
            raise ValueError("data must have shape (rows, cols, order)")
        self.order = order
        self.data = data

    @classmethod
    def zeros(cls, rows: int, cols: int, order: int) -> "CycMatrix":
        return cls(order, np.zeros((rows, cols, order), dtype=np.int64))

    @classmethod
    def identity(cls, n: int, order: int) -> "CycMatrix":
        data = np.zeros((n, n, order), dtype=np.int64)
        data[np.arange(n), np.arange(n), 0] = 1
        return cls(order, data)

    @classmethod
    def scalar(cls, n: int, value: CycInt) -> "CycMatrix":
        data = np.zeros((n, n, value.order), dtype=object)
        vec = value.dense()
        for i in range(n):
            data[i, i] = vec
        return cls(value.order, _narrow(data))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape[0], self.data.shape[1]

    def rescale(self, M: int) -> "CycMatrix":
        if M == self.order:
            return self
        if M % self.order:
            raise ValueError(f"order {self.order} does not divide {M}")
        f = M // self.order
        data = np.zeros(self.data.shape[:2] + (M,), dtype=self.data.dtype)
        data[:, :, ::f] = self.data
        return CycMatrix(M, data)

    def _common(self, other: Union["CycMatrix", ScaledPermMatrix]):
        L = lcm(self.order, other.order)
        return L, self.rescale(L), other.rescale(L)

    def entry(self, i: int, j: int) -> CycInt:
        return CycInt.from_dense(self.data[i, j], self.order)

    def trace(self) -> CycInt:
        n = min(self.shape)
        return CycInt.from_dense(self.data[np.arange(n), np.arange(n)].sum(axis=0), self.order)

    def to_complex(self) -> np.ndarray:
        z = np.exp(2j * np.pi * np.arange(self.order) / self.order)
        return np.asarray(self.data, dtype=np.float64) @ z

    # arithmetic -------------------------------------------------------------
    def __add__(self, other: Union["CycMatrix", ScaledPermMatrix]) -> "CycMatrix":
        if isinstance(other, ScaledPermMatrix):
            other = other.to_dense()
        L, a, b = self._common(other)
        return CycMatrix(L, _safe_add(a.data, b.data))

    def __neg__(self) -> "CycMatrix":
        return CycMatrix(self.order, -self.data)

    def __sub__(self, other: Union["CycMatrix", ScaledPermMatrix]) -> "CycMatrix":
        if isinstance(other, ScaledPermMatrix):
            other = other.to_dense()
        return self + (-other)

    def scale(self, z: Union[RootOfUnity, int]) -> "CycMatrix":
        if isinstance(z, int):
            if not _fits(_maxabs(self.data) * abs(z)):
                return CycMatrix(self.order, np.asarray(self.data, dtype=object) * z)
            return CycMatrix(self.order, self.data * z)
        L = lcm(self.order, z.order)
        a = self.rescale(L)
        return CycMatrix(L, np.roll(a.data, rescale(z, L).exponent, axis=2))

    def __matmul__(self, other: Union["CycMatrix", ScaledPermMatrix]) -> "CycMatrix":
        if isinstance(other, ScaledPermMatrix):
            return self._times_sparse(other)
        if not isinstance(other, CycMatrix):
            return NotImplemented
        L, a, b = self._common(other)
        A, B = a.data, b.data
        inner = A.shape[1]
        bound = _maxabs(A) * _maxabs(B) * inner * L
        dtype = np.int64 if (_fits(bound) and A.dtype != object and B.dtype != object) else object
        A = A.astype(dtype, copy=False)
        B = B.astype(dtype, copy=False)
        out = np.zeros((A.shape[0], B.shape[1], L), dtype=dtype)
        for s in np.nonzero(np.any(A != 0, axis=(0, 1)))[0]:
            prod = np.tensordot(A[:, :, s], B, axes=(1, 0))
            out += np.roll(prod, int(s), axis=2)
        return CycMatrix(L, out)

    def transpose_plain(self) -> "CycMatrix":
        return CycMatrix(self.order, self.data.transpose(1, 0, 2).copy())

    def _times_sparse(self, other: ScaledPermMatrix) -> "CycMatrix":
        L, a, b = self._common(other)
        A = a.data
        rows, cols = A.shape[0], b.n
        nnz = b.mask.sum(axis=0)
        bound = _maxabs(A) * max(int(nnz.max(initial=0)), 1)
        dtype = np.int64 if (_fits(bound) and A.dtype != object) else object
        A = A.astype(dtype, copy=False)
        out = np.zeros((rows, cols, L), dtype=dtype)
        ar = np.arange(L)
        for j in range(cols):
            ks = np.nonzero(b.mask[:, j])[0]
            if ks.size == 0:
                continue
            shifts = b.exps[ks, j]
            # zeta^s * sum_e c_e zeta^e moves coefficient e to e + s
            idx = np.mod(ar[None, :] - shifts[:, None], L)
            gathered = A[:, ks[:, None], idx]
            out[:, j, :] = gathered.sum(axis=1)
        return CycMatrix(L, out)

    # canonical forms --------------------------------------------------------
    def reduced(self) -> np.ndarray:
        return reduce_dense(self.data, self.order)

    def compact(self) -> "CycMatrix":
        """Same values with coefficients replaced by their canonical remainders."""
        red = self.reduced()
        data = np.zeros(self.data.shape, dtype=red.dtype)
        data[:, :, : red.shape[2]] = red
        return CycMatrix(self.order, _narrow(data))

    def is_zero(self) -> bool:
        return not np.any(self.reduced() != 0)

    def equals(self, other: Union["CycMatrix", ScaledPermMatrix]) -> bool:
        if isinstance(other, ScaledPermMatrix):
            other = other.to_dense()
        if self.shape != other.shape:
            return False
        return (self - other).is_zero()

    def scalar_value(self) -> Optional[CycInt]:
        """c if this matrix is exactly c times the identity, else None."""
        n, m = self.shape
        if n != m:
            return None
        red = self.reduced()
        diag = red[np.arange(n), np.arange(n)]
        off = red.copy()
        off[np.arange(n), np.arange(n)] = 0
        if np.any(off != 0) or np.any(diag != diag[0]):
            return None
        full = np.zeros(self.order, dtype=red.dtype)
        full[: red.shape[2]] = diag[0]
        return CycInt.from_dense(full, self.order)

    def __repr__(self) -> str:
        return f"CycMatrix(shape={self.shape}, order={self.order}, dtype={self.data.dtype})"


def _narrow(arr: np.ndarray) -> np.ndarray:
    if arr.dtype != object:
        return arr
    if _fits(_maxabs(arr)):
        return arr.astype(np.int64)
    return arr


def _safe_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object and b.dtype != object and _fits(_maxabs(a) + _maxabs(b)):
        return a + b
    return np.asarray(a, dtype=object) + np.asarray(b, dtype=object)


def as_dense(m: Union[CycMatrix, ScaledPermMatrix]) -> CycMatrix:
    return m.to_dense() if isinstance(m, ScaledPermMatrix) else m


_UNIT_ROUNDOFF = 2.0**-53
# Entries evaluated in the DFT power path: N * n * n complex numbers.
_DFT_MAX_ENTRIES = 8_000_000


def power_by_evaluation(M: ScaledPermMatrix, k: int) -> Optional[CycMatrix]:
    """M^k with coefficients recovered exactly from evaluations at all N-th roots.

    Each entry of M^k is a sum of at most r^{k-1} unit monomials (r = most
    nonzeros in a row), so its coefficients modulo x^N - 1 are nonnegative
    integers bounded by r^{k-1}.  The product is evaluated at every N-th
    root of unity in floating point, the coefficients come back through an
    inverse DFT, and rounding is accepted only when a worst-case error bound
    stays below 1/4.  Returns None when that bound or the memory guard fails.
    """
    n, N = M.n, M.order
    if k < 1:
        raise ValueError("k must be positive")
    if N * n * n > _DFT_MAX_ENTRIES:
        return None
    r = int(M.nnz_per_row().max(initial=0))
    growth = float(max(r, 1)) ** (k - 1)
    # forward error of k chained products with r live terms per inner sum,
    # plus the inverse transform; a factor 8 of slack on top
    err = 8.0 * (4 * k * max(r, 1) + 5 * math.log2(max(N, 2)) + 4) * _UNIT_ROUNDOFF * growth
    if err >= 0.25:
        return None
    mask = M.mask
    j = np.arange(N)[:, None, None]
    evals = np.where(mask[None], np.exp(2j * np.pi * ((j * np.where(mask, M.exps, 0)[None]) % N) / N), 0)
    P = evals
    for _ in range(k - 1):
        P = np.matmul(P, evals)
    coeffs = np.fft.fft(P, axis=0) / N
    rounded = np.rint(coeffs.real)
    if np.abs(coeffs - rounded).max(initial=0.0) >= 0.25:
        return None
    data = rounded.astype(np.int64).transpose(1, 2, 0).copy()
    return CycMatrix(N, data)
