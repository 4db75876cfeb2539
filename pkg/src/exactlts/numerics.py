"""Small dense linear algebra: pivoted square solves and least squares fits.

Every system handled here is tiny (a handful of unknowns), but the solver
needs to push tens of thousands of them through at once, so the square
solver is written as a batched Gaussian elimination over a leading axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .errors import InvalidInputError, SingularFitError

DEFAULT_PIVOT_TOL = 1e-12


class SolveStatus(str, Enum):
    REGULAR = "Regular"
    SINGULAR = "Singular"


@dataclass(frozen=True)
class SolveOutcome:
    status: SolveStatus
    solution: Optional[np.ndarray] = None

    @property
    def regular(self) -> bool:
        return self.status is SolveStatus.REGULAR


def _require_finite(*arrays):
    for a in arrays:
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("input contains non-finite entries")


def solve_square_batch(A, b, pivot_tol=DEFAULT_PIVOT_TOL):
    """Solve a stack of square systems ``A[k] @ x[k] = b[k]``.

    Elimination uses partial row pivoting.  A system is declared singular as
    soon as a pivot drops below ``pivot_tol`` times the largest absolute
    entry of its original matrix.

    Returns ``(regular, x)`` where ``regular`` is a boolean vector over the
    batch and rows of ``x`` belonging to singular systems are NaN.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2]:
        raise InvalidInputError(f"expected square matrices, got shape {A.shape}")
    if b.shape != A.shape[:-1]:
        raise InvalidInputError(f"right-hand side shape {b.shape} does not match {A.shape}")
    if pivot_tol <= 0:
        raise InvalidInputError("pivot_tol must be positive")
    _require_finite(A, b)

    lead = A.shape[:-2]
    p = A.shape[-1]
    A = A.reshape(-1, p, p)
    b = b.reshape(-1, p)
    m = A.shape[0]
    rows = np.arange(m)

    scale = np.abs(A).max(axis=(1, 2)) if p else np.zeros(m)
    thresh = pivot_tol * scale
    regular = scale > 0

    for k in range(p):
        piv = k + np.argmax(np.abs(A[:, k:, k]), axis=1)
        tmp = A[rows, k].copy()
        A[rows, k] = A[rows, piv]
        A[rows, piv] = tmp
        tmp = b[rows, k].copy()
        b[rows, k] = b[rows, piv]
        b[rows, piv] = tmp

        pivot = A[:, k, k]
        regular &= np.abs(pivot) >= thresh
        safe = np.where(regular, pivot, 1.0)
        if k + 1 < p:
            factors = A[:, k + 1:, k] / safe[:, None]
            A[:, k + 1:, k:] -= factors[:, :, None] * A[:, None, k, k:]
            b[:, k + 1:] -= factors * b[:, k, None]

    x = np.zeros((m, p))
    diag = np.where(regular[:, None], np.diagonal(A, axis1=1, axis2=2), 1.0)
    for k in range(p - 1, -1, -1):
        acc = b[:, k] - np.einsum("ij,ij->i", A[:, k, k + 1:], x[:, k + 1:])
        x[:, k] = acc / diag[:, k]
    x[~regular] = np.nan
    return regular.reshape(lead), x.reshape(lead + (p,))


def solve_square(A, b, pivot_tol=DEFAULT_PIVOT_TOL) -> SolveOutcome:
    """Solve one square system, reporting singularity instead of raising."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    if A.ndim != 2:
        raise InvalidInputError(f"expected a matrix, got shape {A.shape}")
    regular, x = solve_square_batch(A[None], b[None], pivot_tol)
    if regular[0]:
        return SolveOutcome(SolveStatus.REGULAR, x[0])
    return SolveOutcome(SolveStatus.SINGULAR)


def _rank_ok(R):
    # R: (m, p, p) upper triangular factors
    d = np.abs(np.diagonal(R, axis1=-2, axis2=-1))
    h = R.shape[-1]
    top = d.max(axis=-1) if h else np.zeros(d.shape[:-1])
    tol = max(R.shape[-2:]) * np.finfo(float).eps * 16 * top
    return (top > 0) & np.all(d > tol[..., None], axis=-1)


def least_squares_batch(Xs, Ys):
    """OLS fits for a stack of design matrices ``Xs`` (m, h, p) and responses ``Ys`` (m, h).

    Uses a Householder QR per problem.  Returns ``(ok, beta)``; rank-deficient
    problems get ``ok = False`` and a NaN row in ``beta``.
    """
    Xs = np.asarray(Xs, dtype=float)
    Ys = np.asarray(Ys, dtype=float)
    m, h, p = Xs.shape
    if h < p:
        raise InvalidInputError(f"need at least {p} rows, got {h}")
    Q, R = np.linalg.qr(Xs, mode="reduced")
    ok = _rank_ok(R)
    beta = np.full((m, p), np.nan)
    if ok.any():
        qty = np.einsum("mhp,mh->mp", Q[ok], Ys[ok])
        beta[ok] = np.linalg.solve(R[ok], qty[..., None])[..., 0]
    return ok, beta


def least_squares(Xs, Ys):
    """Minimiser of ``sum((Ys - Xs @ beta) ** 2)``.

    Raises SingularFitError when ``Xs`` lacks full column rank.
    """
    Xs = np.asarray(Xs, dtype=float)
    Ys = np.asarray(Ys, dtype=float)
    if Xs.ndim == 1:
        Xs = Xs[:, None]
    if Xs.ndim != 2 or Ys.shape != (Xs.shape[0],):
        raise InvalidInputError(f"shape mismatch: X {Xs.shape}, Y {Ys.shape}")
    _require_finite(Xs, Ys)
    ok, beta = least_squares_batch(Xs[None], Ys[None])
    if not ok[0]:
        raise SingularFitError("design matrix is rank deficient")
    return beta[0]
