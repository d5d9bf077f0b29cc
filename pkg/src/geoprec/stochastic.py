"""Matrix-free gradient estimation for large sparse inputs.

The exact gradient needs the block diagonal of (B B*)^-1 (and of (B* B)^-1
for two-sided schemes).  Rather than inverting, these are estimated from
matrix-vector products: a Hutchinson probe estimator for plain diagonals, a
Gaussian sketch for diagonal blocks, and block Lanczos quadrature for a
single block.  Each inverse application is a conjugate-gradient solve.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple, Tuple

import numpy as np
import scipy.sparse as sp

from ._rng import rademacher, substream
from .errors import (
    BreakdownError,
    DimensionMismatchError,
    NotConvergedError,
    SingularProbeBlockError,
)
from .group import GroupElement, LieDirection, project_to_lie, _blockwise_inverse
from .matrix import ComplexMatrix

__all__ = [
    "LinearOperator",
    "MatrixOperator",
    "GramOperator",
    "CoGramOperator",
    "EstimatorConfig",
    "CgResult",
    "conjugate_gradient",
    "hutchinson_diagonal_inverse",
    "block_hutchinson",
    "block_lanczos_inverse_block",
    "estimate_gradient",
]


class LinearOperator:
    """Abstract map v -> A v with adjoint, plus a running matvec counter.

    Subclasses implement `_matvec` and `_rmatvec`.  Adjoint consistency
    <A v, w> = <v, A* w> is verified on a random probe pair at construction.
    """

    def __init__(self, m, n, check_adjoint=True):
        self.m = int(m)
        self.n = int(n)
        self.matvec_count = 0
        self.rmatvec_count = 0
        if check_adjoint:
            rng = substream(0x5EED, m, n)
            v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            w = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            lhs = np.vdot(w, self._matvec(v))
            rhs = np.vdot(self._rmatvec(w), v)
            scale = max(abs(lhs), abs(rhs), 1e-30)
            if abs(lhs - rhs) > 1e-10 * scale:
                raise DimensionMismatchError(
                    f"adjoint inconsistency: <Av,w>={lhs:.6g} vs <v,A*w>={rhs:.6g}"
                )

    @property
    def shape(self):
        return (self.m, self.n)

    def matvec(self, v):
        self.matvec_count += 1
        return self._matvec(v)

    def rmatvec(self, v):
        self.rmatvec_count += 1
        return self._rmatvec(v)

    def _matvec(self, v):  # pragma: no cover - abstract
        raise NotImplementedError

    def _rmatvec(self, v):  # pragma: no cover - abstract
        raise NotImplementedError


class MatrixOperator(LinearOperator):
    """Operator view of a dense array, scipy sparse matrix, or ComplexMatrix."""

    def __init__(self, a):
        if isinstance(a, ComplexMatrix):
            a = a.to_csr() if a.is_sparse else a.to_dense()
        if sp.issparse(a):
            self.mat = a.tocsr().astype(complex)
            self.mat_h = self.mat.conj().T.tocsr()
        else:
            self.mat = np.asarray(a, dtype=complex)
            self.mat_h = self.mat.conj().T
        super().__init__(self.mat.shape[0], self.mat.shape[1])

    def _matvec(self, v):
        return self.mat @ v

    def _rmatvec(self, v):
        return self.mat_h @ v


class GramOperator(LinearOperator):
    """v -> A (A* v): Hermitian, positive definite when A has full row rank.

    Each application costs one matvec and one rmatvec of the base operator.
    """

    def __init__(self, base: LinearOperator):
        self.base = base
        super().__init__(base.m, base.m, check_adjoint=False)

    def _matvec(self, v):
        return self.base.matvec(self.base.rmatvec(v))

    def _rmatvec(self, v):
        return self._matvec(v)


class CoGramOperator(LinearOperator):
    """v -> A* (A v): the n x n Gram of the columns."""

    def __init__(self, base: LinearOperator):
        self.base = base
        super().__init__(base.n, base.n, check_adjoint=False)

    def _matvec(self, v):
        return self.base.rmatvec(self.base.matvec(v))

    def _rmatvec(self, v):
        return self._matvec(v)


@dataclass(frozen=True)
class EstimatorConfig:
    num_probes: int = 100
    probe_kind: str = "rademacher"  # or "gaussian"
    cg_tol: float = 1e-8
    cg_max_iters: int = 10_000
    lanczos_iters: int = 20
    seed: int = 0

    def __post_init__(self):
        if self.num_probes < 1:
            raise ValueError("num_probes must be at least 1")
        if self.probe_kind not in ("rademacher", "gaussian"):
            raise ValueError(f"unknown probe kind {self.probe_kind!r}")


class CgResult(NamedTuple):
    x: np.ndarray
    converged: bool
    iterations: int
    relative_residual: float


def conjugate_gradient(M, b, tol: float = 1e-10, max_iters: int = 10_000) -> CgResult:
    """Solve M x = b for Hermitian positive definite M (operator or array).

    Starts from zero, so M is applied exactly once per iteration.  Stops when
    ||M x - b|| <= tol ||b||; non-convergence is reported on the result, not
    raised.
    """
    apply_m = M.matvec if isinstance(M, LinearOperator) else (lambda v: np.asarray(M) @ v)
    b = np.asarray(b, dtype=complex)
    nb = np.linalg.norm(b)
    if nb == 0.0:
        return CgResult(np.zeros_like(b), True, 0, 0.0)
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = np.vdot(r, r).real
    for k in range(1, max_iters + 1):
        Mp = apply_m(p)
        alpha = rs / np.vdot(p, Mp).real
        x += alpha * p
        r -= alpha * Mp
        rs_new = np.vdot(r, r).real
        if math.sqrt(rs_new) <= tol * nb:
            return CgResult(x, True, k, math.sqrt(rs_new) / nb)
        p = r + (rs_new / rs) * p
        rs = rs_new
    return CgResult(x, False, max_iters, math.sqrt(rs) / nb)


def _draw_probe(rng, size, kind):
    if kind == "rademacher":
        return rademacher(rng, size).astype(complex)
    return rng.standard_normal(size).astype(complex)


class HutchinsonResult(NamedTuple):
    diag_estimate: np.ndarray
    stderr: np.ndarray


def hutchinson_diagonal_inverse(A: LinearOperator, config: EstimatorConfig) -> HutchinsonResult:
    """Probe estimate of Diag((A A*)^-1) for a full-row-rank operator A.

    Each probe z contributes z * x with (A A*) x = z solved by conjugate
    gradients, so the estimator never forms the inverse.  stderr is the
    per-coordinate sample standard error over probes.
    """
    gram = GramOperator(A)
    mean = np.zeros(A.m)
    m2 = np.zeros(A.m)
    for i in range(config.num_probes):
        rng = substream(config.seed, i)
        z = _draw_probe(rng, A.m, config.probe_kind)
        sol = conjugate_gradient(gram, z, tol=config.cg_tol, max_iters=config.cg_max_iters)
        if not sol.converged:
            raise NotConvergedError(sol.relative_residual, probe=i)
        sample = (np.conj(z) * sol.x).real
        delta = sample - mean
        mean += delta / (i + 1)
        m2 += delta * (sample - mean)
    if config.num_probes > 1:
        stderr = np.sqrt(m2 / (config.num_probes - 1) / config.num_probes)
    else:
        stderr = np.zeros(A.m)
    return HutchinsonResult(mean, stderr)


def _block_slice(block) -> Tuple[int, int]:
    if isinstance(block, slice):
        return block.start or 0, block.stop
    a, b = block
    return int(a), int(b)


def block_hutchinson(M: LinearOperator, block_rows, num_probes: int, seed: int) -> np.ndarray:
    """Gaussian sketch of one diagonal block of a Hermitian operator M.

    Draws G with num_probes Gaussian columns, forms Z = M G, and solves the
    regression G_r W = Z_r restricted to the block rows; with r = 1 this is
    the Gaussian Hutchinson estimate of a single diagonal entry.  The result
    is Hermitian-symmetrized.
    """
    a, b = _block_slice(block_rows)
    r = b - a
    if r > num_probes:
        raise DimensionMismatchError("block size exceeds the probe count")
    z_cols = []
    rng = substream(seed, 0)
    G = rng.standard_normal((M.m, num_probes))
    for attempt in (0, 1):
        R = G[a:b, :]  # r x probes
        if np.linalg.matrix_rank(R) == r:
            break
        if attempt == 1:
            raise SingularProbeBlockError("probe block rank deficient after resampling")
        rng = substream(seed, 1)
        G = rng.standard_normal((M.m, num_probes))
    for j in range(num_probes):
        z_cols.append(M.matvec(G[:, j].astype(complex)))
    Z = np.stack(z_cols, axis=1)
    S = Z[a:b, :]  # r x probes
    W, *_ = np.linalg.lstsq(R.T, S.T, rcond=None)
    # the regression recovers the transpose of the block (real probes carry no
    # conjugation), so flip before symmetrizing
    est = W.T
    return 0.5 * (est + est.conj().T)


def block_lanczos_inverse_block(M: LinearOperator, block, iters: int) -> np.ndarray:
    """Block Lanczos quadrature for one diagonal block of M^-1 (M Hermitian PD).

    Runs block Lanczos started on the coordinate columns of the block, with
    full reorthogonalization, and returns the leading block of T_k^-1 where
    T_k is the block-tridiagonal Jacobi matrix.  Early full breakdown means
    the Krylov space is invariant and the quadrature is already exact;
    partial rank loss raises (deflation is not implemented).
    """
    a, b = _block_slice(block)
    r = b - a
    if iters < 1:
        raise ValueError("iters must be at least 1")
    n = M.m
    Q = np.zeros((n, r), dtype=complex)
    Q[a:b, :] = np.eye(r)
    basis = [Q]
    A_blocks = []
    B_blocks = []
    tol = 1e-12
    for j in range(iters):
        W = np.stack([M.matvec(basis[-1][:, i]) for i in range(r)], axis=1)
        Aj = basis[-1].conj().T @ W
        Aj = 0.5 * (Aj + Aj.conj().T)
        A_blocks.append(Aj)
        if j == iters - 1:
            break
        W = W - basis[-1] @ Aj
        if len(basis) > 1:
            W = W - basis[-2] @ B_blocks[-1].conj().T
        # full reorthogonalization keeps the basis numerically orthonormal
        for Qi in basis:
            W = W - Qi @ (Qi.conj().T @ W)
        Qn, Bj = np.linalg.qr(W)
        dmag = np.abs(np.diag(Bj))
        scale = max(1.0, float(np.max(dmag)))
        small = dmag <= tol * scale
        if small.all():
            break  # invariant subspace: quadrature is exact
        if small.any():
            raise BreakdownError(j + 1)
        basis.append(Qn)
        B_blocks.append(Bj)
    k = len(A_blocks)
    T = np.zeros((k * r, k * r), dtype=complex)
    for j, Aj in enumerate(A_blocks):
        T[j * r : (j + 1) * r, j * r : (j + 1) * r] = Aj
    for j, Bj in enumerate(B_blocks):
        T[(j + 1) * r : (j + 2) * r, j * r : (j + 1) * r] = Bj
        T[j * r : (j + 1) * r, (j + 1) * r : (j + 2) * r] = Bj.conj().T
    E = np.zeros((k * r, r))
    E[:r, :] = np.eye(r)
    block_inv = np.linalg.solve(T, E)[:r, :]
    return 0.5 * (block_inv + block_inv.conj().T)


def _block_diag_csr(X, blocks):
    m = X.shape[0]
    rows, cols, vals = [], [], []
    for a, b in blocks:
        for i in range(a, b):
            for j in range(a, b):
                if X[i, j] != 0:
                    rows.append(i)
                    cols.append(j)
                    vals.append(X[i, j])
    return sp.csr_matrix((vals, (rows, cols)), shape=(m, m))


def _inverse_blocks_estimate(base_op, blocks, config, side_key):
    """Diagonal blocks of (base base*)^-1, all blocks sharing one probe set."""
    gram = GramOperator(base_op)
    m = base_op.m
    if all(b - a == 1 for a, b in blocks):
        cfg = EstimatorConfig(
            num_probes=config.num_probes,
            probe_kind=config.probe_kind,
            cg_tol=config.cg_tol,
            cg_max_iters=config.cg_max_iters,
            lanczos_iters=config.lanczos_iters,
            seed=config.seed * 2 + side_key,
        )
        est = hutchinson_diagonal_inverse(base_op, cfg)
        return np.diag(est.diag_estimate.astype(complex))
    rng = substream(config.seed, 10 + side_key)
    G = rng.standard_normal((m, config.num_probes))
    Z = np.zeros((m, config.num_probes), dtype=complex)
    for j in range(config.num_probes):
        sol = conjugate_gradient(gram, G[:, j].astype(complex), tol=config.cg_tol,
                                 max_iters=config.cg_max_iters)
        if not sol.converged:
            raise NotConvergedError(sol.relative_residual, probe=j)
        Z[:, j] = sol.x
    out = np.zeros((m, m), dtype=complex)
    for a, b in blocks:
        R = G[a:b, :]
        S = Z[a:b, :]
        W, *_ = np.linalg.lstsq(R.T, S.T, rcond=None)
        est = W.T  # the regression recovers the transpose of the block
        out[a:b, a:b] = 0.5 * (est + est.conj().T)
    return out


def estimate_gradient(A, g: GroupElement, config: EstimatorConfig) -> LieDirection:
    """Stochastic gradient of the log condition objective at g.

    The Gram blocks of B = g . A are computed exactly from the rows of B
    (cheap for sparse inputs); the inverse-Gram blocks are estimated by
    probes, and ||B^+||_F^2 is taken as the trace of those estimates, so no
    extra solves are spent on the normalizer.  A must be given with explicit
    entries (array, sparse matrix, or ComplexMatrix), full row rank; for
    two-sided schemes it must be square.
    """
    sch = g.scheme
    if isinstance(A, ComplexMatrix):
        A = A.to_csr() if A.is_sparse else A.to_dense()
    if not sp.issparse(A):
        A = np.asarray(A, dtype=complex)
    if A.shape[0] != sch.m:
        raise DimensionMismatchError("matrix rows do not match the scheme")
    if sch.side == "both" and A.shape[0] != A.shape[1]:
        raise DimensionMismatchError("two-sided stochastic gradients need a square matrix")

    Xs = _block_diag_csr(g.X, sch.left_blocks)
    B = Xs @ (A if sp.issparse(A) else sp.csr_matrix(A))
    if sch.side == "both":
        Yinv = _block_diag_csr(_blockwise_inverse(g.Y, sch.right_blocks), sch.right_blocks)
        B = B @ Yinv
    B = B.tocsr()
    nb2 = float(np.linalg.norm(B.data) ** 2)

    # exact Gram blocks from the rows of B
    P = np.zeros((sch.m, sch.m), dtype=complex)
    for a, b in sch.left_blocks:
        rows = B[a:b, :]
        P[a:b, a:b] = (rows @ rows.conj().T).toarray()
    b_op = MatrixOperator(B)
    inv_left = _inverse_blocks_estimate(b_op, sch.left_blocks, config, side_key=0)
    tr_left = float(np.trace(inv_left).real)

    if sch.side == "left":
        H1 = P / nb2 - inv_left / tr_left
        return project_to_lie(sch, H1)

    Q = np.zeros((sch.n, sch.n), dtype=complex)
    Bc = B.conj().T.tocsr()
    for a, b in sch.right_blocks:
        rows = Bc[a:b, :]
        Q[a:b, a:b] = (rows @ rows.conj().T).toarray()

    class _AdjointOp(LinearOperator):
        def __init__(self, mat):
            self.matref = mat
            super().__init__(mat.shape[1], mat.shape[0], check_adjoint=False)

        def _matvec(self, v):
            return self.matref.conj().T @ v

        def _rmatvec(self, v):
            return self.matref @ v

    inv_right = _inverse_blocks_estimate(_AdjointOp(B), sch.right_blocks, config, side_key=1)
    tr_right = float(np.trace(inv_right).real)
    # both traces estimate ||B^+||_F^2; average for a common normalizer
    tr = 0.5 * (tr_left + tr_right)
    H1 = P / nb2 - inv_left / tr
    H2 = -Q / nb2 + inv_right / tr
    return project_to_lie(sch, H1, H2)
