"""Complex matrices, norms, pseudoinverse, and condition numbers.

A :class:`ComplexMatrix` is a thin immutable wrapper holding either dense
row-major storage or canonical sparse coordinate triplets.  Every operation
in this module accepts either a ``ComplexMatrix`` or a plain array-like and
produces identical results for dense and sparse storage of the same matrix.
"""

from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    DimensionMismatchError,
    ZeroDiagonalEntryError,
    ZeroMatrixError,
    ZeroRowOrColumnError,
)

__all__ = [
    "ComplexMatrix",
    "SvdFactorization",
    "frobenius_norm",
    "pseudoinverse",
    "svd_factorization",
    "condition_frobenius",
    "condition_euclidean",
    "condition_skeel",
    "condition_cross",
    "jacobi_precondition",
    "row_balance",
    "sinkhorn_equilibrate",
    "SinkhornResult",
]


class ComplexMatrix:
    """Dense or sparse complex matrix.

    Sparse storage is coordinate format, canonicalized at construction:
    entries sorted by (row, col), duplicates summed, exact zeros dropped.
    Instances are immutable and safe to share across threads.
    """

    __slots__ = ("rows", "cols", "_dense", "_coo")

    def __init__(self, rows, cols, dense=None, coo=None):
        if rows <= 0 or cols <= 0:
            raise DimensionMismatchError("matrix dimensions must be positive")
        self.rows = int(rows)
        self.cols = int(cols)
        self._dense = dense
        self._coo = coo

    @classmethod
    def dense(cls, array):
        a = np.array(array, dtype=complex, order="C")
        if a.ndim != 2:
            raise DimensionMismatchError("dense storage must be 2-dimensional")
        a.setflags(write=False)
        return cls(a.shape[0], a.shape[1], dense=a)

    @classmethod
    def sparse(cls, rows, cols, triplets):
        """Build from an iterable of (row, col, value) triplets."""
        ri, ci, vi = [], [], []
        for r, c, v in triplets:
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionMismatchError(f"index ({r}, {c}) out of bounds")
            ri.append(r)
            ci.append(c)
            vi.append(v)
        ri = np.asarray(ri, dtype=np.int64)
        ci = np.asarray(ci, dtype=np.int64)
        vi = np.asarray(vi, dtype=complex)
        # canonical order, duplicates summed
        order = np.lexsort((ci, ri))
        ri, ci, vi = ri[order], ci[order], vi[order]
        keys = ri * cols + ci
        uniq, inverse = np.unique(keys, return_inverse=True)
        vals = np.zeros(len(uniq), dtype=complex)
        np.add.at(vals, inverse, vi)
        keep = vals != 0
        out_r = (uniq // cols)[keep]
        out_c = (uniq % cols)[keep]
        out_v = vals[keep]
        for a in (out_r, out_c, out_v):
            a.setflags(write=False)
        return cls(rows, cols, coo=(out_r, out_c, out_v))

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def is_sparse(self):
        return self._coo is not None

    @property
    def nnz(self):
        if self.is_sparse:
            return len(self._coo[2])
        return int(np.count_nonzero(self._dense))

    def triplets(self):
        """(rows, cols, values) arrays in canonical order."""
        if self.is_sparse:
            return self._coo
        r, c = np.nonzero(self._dense)
        return r, c, self._dense[r, c]

    def to_dense(self):
        if self._dense is not None:
            return self._dense
        out = np.zeros((self.rows, self.cols), dtype=complex)
        r, c, v = self._coo
        out[r, c] = v
        return out

    def to_csr(self):
        import scipy.sparse as sp

        r, c, v = self.triplets()
        return sp.csr_matrix((v, (r, c)), shape=self.shape)

    def __repr__(self):
        kind = "sparse" if self.is_sparse else "dense"
        return f"ComplexMatrix({self.rows}x{self.cols}, {kind})"


def as_dense(a):
    """Coerce a ComplexMatrix or array-like to a dense complex ndarray."""
    if isinstance(a, ComplexMatrix):
        return a.to_dense()
    out = np.asarray(a, dtype=complex)
    if out.ndim != 2:
        raise DimensionMismatchError("expected a 2-dimensional matrix")
    return out


def _require_nonzero(a):
    if not np.any(a):
        raise ZeroMatrixError("matrix is identically zero")


class SvdFactorization(NamedTuple):
    """Thin SVD with an explicit rank cutoff.

    Singular values are nonincreasing; values at or below ``rank_tolerance``
    count as zero for rank and pseudoinverse purposes.
    """

    left_vectors: np.ndarray
    singular_values: np.ndarray
    right_vectors: np.ndarray
    rank_tolerance: float

    @property
    def rank(self):
        return int(np.count_nonzero(self.singular_values > self.rank_tolerance))


def svd_factorization(a, rcond: Optional[float] = None) -> SvdFactorization:
    """Thin SVD of ``a`` with default cutoff max(m, n) * eps * sigma_max."""
    m = as_dense(a)
    _require_nonzero(m)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    if rcond is None:
        rcond = max(m.shape) * np.finfo(float).eps
    tol = rcond * (s[0] if len(s) else 0.0)
    return SvdFactorization(u, s, vh.conj().T, tol)


def frobenius_norm(a) -> float:
    """sqrt of the sum of squared entry magnitudes."""
    if isinstance(a, ComplexMatrix) and a.is_sparse:
        return float(np.linalg.norm(a.triplets()[2]))
    return float(np.linalg.norm(as_dense(a)))


def pseudoinverse(a, rcond: Optional[float] = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse with singular values below rcond*sigma_max dropped."""
    f = svd_factorization(a, rcond)
    s = f.singular_values
    inv = np.where(s > f.rank_tolerance, 1.0 / np.where(s > 0, s, 1.0), 0.0)
    return (f.right_vectors * inv) @ f.left_vectors.conj().T


def condition_frobenius(a) -> float:
    """Frobenius condition number ||A||_F * ||A^+||_F."""
    f = svd_factorization(a)
    s = f.singular_values
    pos = s[s > f.rank_tolerance]
    return float(np.linalg.norm(s) * np.linalg.norm(1.0 / pos))


def condition_euclidean(a) -> float:
    """Euclidean (operator-norm) condition number sigma_max / sigma_min."""
    f = svd_factorization(a)
    s = f.singular_values
    pos = s[s > f.rank_tolerance]
    return float(s[0] / pos[-1])


def condition_skeel(a) -> float:
    """Skeel condition number || |A^+| |A| ||_inf (max absolute row sum)."""
    m = as_dense(a)
    _require_nonzero(m)
    prod = np.abs(pseudoinverse(m)) @ np.abs(m)
    return float(np.max(np.sum(prod, axis=1)))


def condition_cross(a, b) -> float:
    """Cross condition number ||A||_F * ||B||_F of two independent matrices."""
    na, nb = frobenius_norm(a), frobenius_norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroMatrixError("matrix is identically zero")
    return na * nb


def jacobi_precondition(a, mode: str = "left") -> np.ndarray:
    """Classical diagonal scaling by the matrix diagonal.

    ``left`` returns diag(A)^-1 A; ``two_sided`` returns
    diag(A)^-1/2 A diag(A)^-1/2.  Requires a square matrix with nonzero
    diagonal entries.
    """
    m = as_dense(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatchError("Jacobi scaling needs a square matrix")
    d = np.diag(m)
    zero = np.nonzero(d == 0)[0]
    if len(zero):
        raise ZeroDiagonalEntryError(int(zero[0]))
    if mode == "left":
        return m / d[:, None]
    if mode == "two_sided":
        r = d**-0.5  # principal square root for complex entries
        return (r[:, None] * m) * r[None, :]
    raise ValueError(f"unknown mode {mode!r}")


def row_balance(a, p: float = 2.0) -> np.ndarray:
    """Left scaling X = diag(1/||row_i||_p); baseline heuristic, not an optimizer."""
    m = as_dense(a)
    norms = np.linalg.norm(m, ord=p, axis=1)
    zero = np.nonzero(norms == 0)[0]
    if len(zero):
        raise ZeroRowOrColumnError(int(zero[0]), 0)
    return np.diag(1.0 / norms)


class SinkhornResult(NamedTuple):
    X: np.ndarray  # left diagonal scaling, X[0, 0] fixed to 1
    Y: np.ndarray  # right diagonal scaling, applied as A -> X A Y^-1
    converged: bool
    iterations: int


def sinkhorn_equilibrate(a, max_iters: int = 1000, tol: float = 1e-10) -> SinkhornResult:
    """Diagonal X, Y making the row and column sums of |X A Y^-1| equal.

    Alternates row and column normalization on |A|.  The scaling pair is
    unique only up to a scalar; the ambiguity is fixed by forcing X[0,0] = 1.
    """
    m = np.abs(as_dense(a))
    rows, cols = m.shape
    zr = np.nonzero(m.sum(axis=1) == 0)[0]
    if len(zr):
        raise ZeroRowOrColumnError(int(zr[0]), 0)
    zc = np.nonzero(m.sum(axis=0) == 0)[0]
    if len(zc):
        raise ZeroRowOrColumnError(int(zc[0]), 1)

    d = np.ones(rows)
    e = np.ones(cols)  # applied as division: column j scaled by 1/e[j]
    converged = False
    it = 0
    col_target = rows / cols  # after rows sum to 1, columns must sum to m/n
    for it in range(1, max_iters + 1):
        scaled = (d[:, None] * m) / e[None, :]
        rs = scaled.sum(axis=1)
        d = d / rs
        scaled = (d[:, None] * m) / e[None, :]
        cs = scaled.sum(axis=0)
        e = e * cs / col_target
        scaled = (d[:, None] * m) / e[None, :]
        rdev = np.max(np.abs(scaled.sum(axis=1) - 1.0))
        cdev = np.max(np.abs(scaled.sum(axis=0) - col_target)) / col_target
        if max(rdev, cdev) <= tol:
            converged = True
            break
    # fix the scalar ambiguity
    scale = d[0]
    d = d / scale
    e = e / scale
    return SinkhornResult(np.diag(d).astype(complex), np.diag(e).astype(complex), converged, it)
