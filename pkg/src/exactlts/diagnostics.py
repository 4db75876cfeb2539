"""Checks of the data conditions under which border scanning is exact, plus
the full objective landscape for a single regressor."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .bsa import _border_test, _roots_1d
from .errors import InvalidInputError
from .model import (
    Dataset,
    FitResult,
    Problem,
    SubsetMask,
    lts_objective,
    squared_residuals,
    subset_objective_J,
)
from .relation import DEFAULT_TIE_CAP, subsets_in_relation

DEFAULT_BUDGET = 4096


class AssumptionId(str, Enum):
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    A4 = "A4"
    H_FULL_RANK = "HFullRank"


class Status(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    SAMPLED_PASS = "Sampled-Pass"
    SKIPPED = "Skipped"


@dataclass(frozen=True)
class AssumptionReport:
    assumption_id: AssumptionId
    status: Status
    witnesses: Tuple = ()
    detail: str = ""

    def __post_init__(self):
        if self.status is Status.FAIL and not self.witnesses:
            raise ValueError("a failed check must carry witnesses")

    @property
    def passed(self) -> bool:
        return self.status in (Status.PASS, Status.SAMPLED_PASS)


def _matrix_tol(X):
    return 1e-12 * (1.0 + float(np.abs(X).max()))


def check_pairwise(dataset: Dataset) -> AssumptionReport:
    """No row equals another up to sign, and no row is zero.

    Witnesses are ``("zero", i)`` and ``("+", i, j)`` / ``("-", i, j)``
    tuples with 0-based indices; ``"-"`` marks ``x_i == x_j`` and ``"+"``
    marks ``x_i == -x_j``.
    """
    X = dataset.X
    tol = _matrix_tol(X)
    witnesses = []
    for i in np.flatnonzero(np.abs(X).max(axis=1) <= tol):
        witnesses.append(("zero", int(i)))
    diff = np.abs(X[:, None, :] - X[None, :, :]).max(axis=2)
    summ = np.abs(X[:, None, :] + X[None, :, :]).max(axis=2)
    for i, j in itertools.combinations(range(dataset.n), 2):
        if diff[i, j] <= tol:
            witnesses.append(("-", i, j))
        if summ[i, j] <= tol:
            witnesses.append(("+", i, j))
    status = Status.FAIL if witnesses else Status.PASS
    return AssumptionReport(AssumptionId.A1, status, tuple(witnesses))


def _ranks(stack):
    return np.linalg.matrix_rank(stack) if len(stack) else np.zeros(0, dtype=int)


def check_h_full_rank(dataset: Dataset, h: int, budget: int = DEFAULT_BUDGET,
                      seed: int = 0) -> AssumptionReport:
    """Every h-row submatrix has rank p.

    Exhaustive when C(n, h) <= budget, otherwise ``budget`` random subsets
    are checked.  Witnesses are 0-based index tuples of rank-deficient
    subsets.
    """
    n, p = dataset.n, dataset.p
    if not (1 <= h <= n):
        raise InvalidInputError(f"h={h} out of range for n={n}")
    total = math.comb(n, h)
    if h < p:
        return AssumptionReport(AssumptionId.H_FULL_RANK, Status.FAIL,
                                (tuple(range(h)),), f"h={h} < p={p}")
    if total <= budget:
        rows = np.array(list(itertools.combinations(range(n), h)), dtype=np.intp)
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        rows = np.sort(np.array([rng.choice(n, h, replace=False) for _ in range(budget)]), axis=1)
        exhaustive = False
    bad = np.flatnonzero(_ranks(dataset.X[rows]) < p)
    witnesses = tuple(tuple(int(i) for i in rows[k]) for k in bad)
    if witnesses:
        return AssumptionReport(AssumptionId.H_FULL_RANK, Status.FAIL, witnesses)
    status = Status.PASS if exhaustive else Status.SAMPLED_PASS
    return AssumptionReport(AssumptionId.H_FULL_RANK, status, (),
                            f"checked {len(rows)} of {total} subsets")


def _sign_system_matrices(X, signs):
    # signs: (m, n-1) of +/-1; rows are x_1 o_k x_{k+1}
    return X[0][None, None, :] + signs[:, :, None] * X[1:][None, :, :]


def check_sign_rank(dataset: Dataset, budget: int = DEFAULT_BUDGET,
                    seed: int = 0) -> AssumptionReport:
    """Rank p of every anchored sign system built on the first observation.

    With an intercept the all-minus sign vector is exempt (its ones column
    cancels).  All 2^(n-1) sign vectors are checked when that fits in
    ``budget``; otherwise a random sample plus the all-plus and all-minus
    vectors.  Witnesses are sign strings such as ``"+-+"``.
    """
    n, p = dataset.n, dataset.p
    aid = AssumptionId.A4 if dataset.has_intercept else AssumptionId.A3
    k = n - 1
    if k < p:
        return AssumptionReport(aid, Status.FAIL, ("+" * k,), f"only {k} equations for {p} unknowns")
    total = 2 ** k
    if total <= budget:
        signs = np.array(list(itertools.product((1.0, -1.0), repeat=k)))
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        signs = np.vstack([np.ones(k), -np.ones(k), rng.choice((1.0, -1.0), size=(budget, k))])
        exhaustive = False
    if dataset.has_intercept:
        signs = signs[~np.all(signs < 0, axis=1)]
    witnesses = []
    for start in range(0, len(signs), 1024):
        block = signs[start:start + 1024]
        ranks = _ranks(_sign_system_matrices(dataset.X, block))
        for s in block[ranks < p]:
            witnesses.append("".join("+" if v > 0 else "-" for v in s))
    if witnesses:
        return AssumptionReport(aid, Status.FAIL, tuple(witnesses))
    status = Status.PASS if exhaustive else Status.SAMPLED_PASS
    return AssumptionReport(aid, status, (), f"checked {len(signs)} of {total} sign vectors")


def positive_minimum_threshold(problem: Problem) -> float:
    return problem.tol.residual_eq_tol * (1.0 + float(np.max(problem.Y ** 2)))


def check_positive_minimum(problem: Problem, result: FitResult) -> AssumptionReport:
    """Whether the minimal trimmed sum is strictly positive.

    A failure is informational: an exact h-point fit is then itself the
    estimate.  The witness is the 0-based index tuple of the fitted subset.
    """
    if result.objective > positive_minimum_threshold(problem):
        return AssumptionReport(AssumptionId.A2, Status.PASS)
    return AssumptionReport(AssumptionId.A2, Status.FAIL, (result.mask.indices,),
                            f"objective {result.objective:.3g} is numerically zero")


def check_all(problem: Problem, result: Optional[FitResult] = None,
              budget: int = DEFAULT_BUDGET) -> List[AssumptionReport]:
    reports = [
        check_pairwise(problem.dataset),
        check_h_full_rank(problem.dataset, problem.h, budget),
        check_sign_rank(problem.dataset, budget),
    ]
    if result is not None:
        reports.append(check_positive_minimum(problem, result))
    else:
        reports.append(AssumptionReport(AssumptionId.A2, Status.SKIPPED))
    return reports


@dataclass(frozen=True)
class Cell:
    lower: float
    upper: float
    mask: SubsetMask

    def contains(self, beta: float, closed: bool = True) -> bool:
        if closed:
            return self.lower <= beta <= self.upper
        return self.lower < beta < self.upper


@dataclass(frozen=True)
class LocalMinimum:
    beta: float
    value: float
    mask: SubsetMask


@dataclass(frozen=True)
class Landscape1D:
    boundary_points: Tuple[float, ...]
    cells: Tuple[Cell, ...]
    local_minima: Tuple[LocalMinimum, ...] = field(default=())

    @property
    def global_minimum(self) -> LocalMinimum:
        return min(self.local_minima, key=lambda m: (m.value, m.mask))


def border_points_1d(problem: Problem) -> np.ndarray:
    """Sorted points of the single-regressor border set, near-duplicates merged."""
    n = problem.n
    pairs = np.array(list(itertools.combinations(range(n), 2)), dtype=np.intp)
    roots, ok = _roots_1d(problem, pairs[:, 0], pairs[:, 1])
    beta = roots[ok]
    anchor = np.repeat(pairs[:, 0][:, None], 2, axis=1)[ok]
    r = problem.Y[None, :] - beta[:, None] * problem.X[:, 0][None, :]
    hit = _border_test(problem, r * r, anchor)
    pts = np.sort(beta[hit])
    merged: List[float] = []
    for b in pts:
        gap = 10 * problem.tol.residual_eq_tol * (1.0 + abs(b))
        if merged and b - merged[-1] <= gap:
            continue
        merged.append(float(b))
    return np.array(merged)


def landscape_1d(problem: Problem, tie_cap: int = DEFAULT_TIE_CAP) -> Landscape1D:
    """Cells of constant active subset, their borders, and all local minima (p = 1).

    A cell holds a local minimum exactly when the OLS fit of its subset
    lands inside the (closed) cell; the minimum's value is J of that subset.
    """
    if problem.p != 1:
        raise InvalidInputError("landscape_1d needs a single regressor")
    if not check_pairwise(problem.dataset).passed:
        raise InvalidInputError("pairwise-distinct rows assumption fails; the border set may be infinite")

    pts = border_points_1d(problem)
    edges = np.concatenate([[-np.inf], pts, [np.inf]])
    cells = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        if np.isinf(lo) and np.isinf(hi):
            probe = 0.0
        elif np.isinf(lo):
            probe = hi - 1.0
        elif np.isinf(hi):
            probe = lo + 1.0
        else:
            probe = 0.5 * (lo + hi)
        masks = subsets_in_relation(problem, [probe], tie_cap)
        cells.append(Cell(float(lo), float(hi), masks[0]))

    minima: List[LocalMinimum] = []
    for cell in cells:
        beta, value = subset_objective_J(problem, cell.mask)
        b = float(beta[0])
        if not cell.contains(b):
            continue
        if minima and abs(minima[-1].beta - b) <= 1e-9 * (1.0 + abs(b)):
            continue
        minima.append(LocalMinimum(b, value, cell.mask))
    return Landscape1D(tuple(float(b) for b in pts), tuple(cells), tuple(minima))


def continuity_gap(problem: Problem, beta: float, eps: float = 1e-6) -> float:
    """|objective(beta + eps) - objective(beta - eps)|."""
    return abs(lts_objective(problem, [beta + eps]) - lts_objective(problem, [beta - eps]))


__all__ = [
    "AssumptionId", "Status", "AssumptionReport", "Cell", "LocalMinimum", "Landscape1D",
    "check_pairwise", "check_h_full_rank", "check_sign_rank", "check_positive_minimum",
    "check_all", "border_points_1d", "landscape_1d", "continuity_gap",
    "positive_minimum_threshold",
]
