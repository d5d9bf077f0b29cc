"""The log condition-number objective, its Riemannian gradient and Hessian.

For a fixed matrix A and group element g the objective is

    value = log ||B||_F + log ||B^+||_F,   B = g . A,

the log of the Frobenius condition number of the transformed matrix.  The
gradient at g is the orthogonal projection of

    ( B B* / ||B||_F^2  -  (B^+)* B^+ / ||B^+||_F^2 ,
     -B* B / ||B||_F^2  +  B^+ (B^+)* / ||B^+||_F^2 )

onto the Lie algebra of the scheme.  The cross variant replaces B^+ by an
independently transformed second matrix.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError, ZeroMatrixError
from .group import GroupElement, LieDirection, WeightData, apply, project_to_lie
from .matrix import as_dense

__all__ = [
    "ObjectiveState",
    "evaluate",
    "evaluate_cross",
    "gradient",
    "hessian_quadratic_form",
    "duality_gap_bound",
]


@dataclass(frozen=True)
class ObjectiveState:
    """Everything the optimizer needs at one group element.

    B_pinv holds the pseudoinverse of B for the condition objective and the
    transformed second matrix for the cross objective.  kappa is the
    Euclidean condition number of B, recorded for reporting only.
    """

    A: np.ndarray
    g: GroupElement
    B: np.ndarray
    B_pinv: np.ndarray
    value: float
    grad: LieDirection
    grad_norm: float
    kF: float
    kappa: float
    rank_deficient: bool


def _grad_from_pair(g, B, D):
    """Projected gradient of log ||B||_F + log ||D||_F under the pair action."""
    sch = g.scheme
    nb2 = np.linalg.norm(B) ** 2
    nd2 = np.linalg.norm(D) ** 2
    P = B @ B.conj().T / nb2 - D.conj().T @ D / nd2
    if sch.side == "left":
        return project_to_lie(sch, P)
    Q = -B.conj().T @ B / nb2 + D @ D.conj().T / nd2
    return project_to_lie(sch, P, Q)


def evaluate(A, g: GroupElement, rcond: Optional[float] = None) -> ObjectiveState:
    """Objective state at g for the condition objective (one SVD of B).

    Rank-deficient inputs are evaluated with the pseudoinverse and flagged
    rather than rejected; the strongly convex optimizer mode refuses them.
    """
    a = as_dense(A)
    B = apply(g, a)
    u, s, vh = np.linalg.svd(B, full_matrices=False)
    if not len(s) or s[0] == 0.0:
        raise ZeroMatrixError("matrix is identically zero")
    if rcond is None:
        rcond = max(B.shape) * np.finfo(float).eps
    tol = rcond * s[0]
    pos = s[s > tol]
    rank_deficient = len(pos) < min(B.shape)
    B_pinv = (vh.conj().T[:, : len(pos)] / pos) @ u.conj().T[: len(pos), :]
    kF = float(np.linalg.norm(s) * np.linalg.norm(1.0 / pos))
    kappa = float(s[0] / pos[-1])
    grad = _grad_from_pair(g, B, B_pinv)
    return ObjectiveState(
        A=a,
        g=g,
        B=B,
        B_pinv=B_pinv,
        value=math.log(kF),
        grad=grad,
        grad_norm=grad.norm,
        kF=kF,
        kappa=kappa,
        rank_deficient=rank_deficient,
    )


def evaluate_cross(A, B_independent, g: GroupElement) -> ObjectiveState:
    """Objective state for the cross condition of an independent pair (A, B).

    A transforms as X A Y^-1 and the second matrix as Y B X^-1; for
    left-only schemes the pair is (X A, B X^-1).
    """
    a = as_dense(A)
    b = as_dense(B_independent)
    sch = g.scheme
    if b.shape != (a.shape[1], a.shape[0]):
        raise DimensionMismatchError("second matrix must have the transposed shape of the first")
    Bm = apply(g, a)
    Xinv = np.linalg.inv(g.X)
    D = (g.Y @ b if sch.side == "both" else b) @ Xinv
    nb, nd = np.linalg.norm(Bm), np.linalg.norm(D)
    if nb == 0.0 or nd == 0.0:
        raise ZeroMatrixError("matrix is identically zero")
    grad = _grad_from_pair(g, Bm, D)
    sv = np.linalg.svd(Bm, compute_uv=False)
    return ObjectiveState(
        A=a,
        g=g,
        B=Bm,
        B_pinv=D,
        value=float(np.log(nb) + np.log(nd)),
        grad=grad,
        grad_norm=grad.norm,
        kF=float(nb * nd),
        kappa=float(sv[0] / sv[sv > sv[0] * 1e-14][-1]),
        rank_deficient=False,
    )


def gradient(state: ObjectiveState) -> LieDirection:
    """The Riemannian gradient stored on the state."""
    return state.grad


def hessian_quadratic_form(state: ObjectiveState, H: LieDirection) -> float:
    """<H, Hess H> along a Lie-algebra direction.

    Computed from the normalized tensor w = B (x) B_pinv: the quadratic form
    equals 2 (||Pi(H) w||^2 - <Pi(H) w, w>^2) where the derivative of the
    pair action is Pi(H)(B (x) D) = (H1 B - B H2) (x) D + B (x) (H2 D - D H1).
    All inner products expand into traces of small products, so the tensor is
    never materialized.
    """
    B, D = state.B, state.B_pinv
    sch = state.g.scheme
    H1 = H.H1
    H2 = H.H2 if H.H2 is not None else None
    nb2 = np.linalg.norm(B) ** 2
    nd2 = np.linalg.norm(D) ** 2
    u = H1 @ B - (B @ H2 if H2 is not None else 0.0)
    v = (H2 @ D if H2 is not None else 0.0) - D @ H1
    uB = np.trace(B.conj().T @ u)
    vD = np.trace(D.conj().T @ v)
    pairing = uB.real / nb2 + vD.real / nd2
    sq = (
        np.linalg.norm(u) ** 2 / nb2
        + np.linalg.norm(v) ** 2 / nd2
        + 2.0 * (uB * vD).real / (nb2 * nd2)
    )
    if sch.side not in ("left", "both"):  # pragma: no cover
        raise DimensionMismatchError("unknown scheme side")
    return float(2.0 * (sq - pairing**2))


def duality_gap_bound(state: ObjectiveState, weights: WeightData) -> float:
    """Certified upper bound on value - inf value, or inf when not yet active.

    When the gradient norm drops below the weight margin gamma, the
    noncommutative duality bound gives

        value - optimum <= -(1/2) log(1 - ||grad|| / gamma).

    Above the margin the certificate is vacuous and inf is returned.
    """
    gn = state.grad_norm
    gamma = weights.weight_margin
    if gn >= gamma:
        return math.inf
    return -0.5 * math.log1p(-gn / gamma)
