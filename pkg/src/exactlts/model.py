"""Problem definition, residuals and the two LTS objectives.

The continuous objective sums the ``h`` smallest squared residuals at a
coefficient vector.  The discrete objective ``J`` takes a subset of ``h``
retained observations and returns the OLS fit on that subset together with
its residual sum of squares.  Minimising either gives the same estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

from .errors import InvalidInputError, SingularFitError
from .numerics import DEFAULT_PIVOT_TOL, least_squares, least_squares_batch

DEFAULT_RESIDUAL_EQ_TOL = 1e-8


def _frozen(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Dataset:
    """Observations ``(X, Y)``; ``X`` is n x p, ``Y`` has length n.

    With ``has_intercept`` the first column of ``X`` must already be the
    ones column.  The flag only changes which rank assumption the
    diagnostics check.
    """

    X: np.ndarray
    Y: np.ndarray
    has_intercept: bool = False

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        Y = np.asarray(self.Y, dtype=float).reshape(-1)
        if X.ndim != 2:
            raise InvalidInputError(f"X must be a matrix, got shape {X.shape}")
        n, p = X.shape
        if Y.shape[0] != n:
            raise InvalidInputError(f"X has {n} rows but Y has {Y.shape[0]} entries")
        if not (n > p >= 1):
            raise InvalidInputError(f"need n > p >= 1, got n={n}, p={p}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise InvalidInputError("data contains non-finite entries")
        if self.has_intercept and not np.all(X[:, 0] == 1.0):
            raise InvalidInputError("has_intercept set but the first column of X is not all ones")
        object.__setattr__(self, "X", _frozen(X))
        object.__setattr__(self, "Y", _frozen(Y))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def take(self, order) -> "Dataset":
        """Rows reordered (or subset) by ``order``."""
        order = np.asarray(order)
        return Dataset(self.X[order], self.Y[order], self.has_intercept)


@dataclass(frozen=True)
class TolerancePolicy:
    residual_eq_tol: float = DEFAULT_RESIDUAL_EQ_TOL
    pivot_tol: float = DEFAULT_PIVOT_TOL

    def __post_init__(self):
        if not (self.residual_eq_tol > 0 and self.pivot_tol > 0):
            raise InvalidInputError("tolerances must be strictly positive")

    def equal(self, a, b):
        """Relative equality of squared residuals; works elementwise on arrays."""
        return np.abs(a - b) <= self.residual_eq_tol * (1.0 + np.maximum(a, b))


@dataclass(frozen=True)
class Problem:
    dataset: Dataset
    h: int
    tol: TolerancePolicy = field(default_factory=TolerancePolicy)

    def __post_init__(self):
        h = int(self.h)
        if not (self.dataset.p <= h <= self.dataset.n):
            raise InvalidInputError(
                f"h must satisfy p <= h <= n, got h={h}, p={self.dataset.p}, n={self.dataset.n}"
            )
        object.__setattr__(self, "h", h)

    @property
    def n(self) -> int:
        return self.dataset.n

    @property
    def p(self) -> int:
        return self.dataset.p

    @property
    def X(self) -> np.ndarray:
        return self.dataset.X

    @property
    def Y(self) -> np.ndarray:
        return self.dataset.Y


@dataclass(frozen=True, order=True)
class SubsetMask:
    """A set of ``h`` retained observations out of ``n``.

    Stored as sorted 0-based indices; ordering of masks is lexicographic on
    those indices, which is the tie-break rule used by both solvers.
    """

    indices: Tuple[int, ...]
    n: int

    def __post_init__(self):
        idx = tuple(sorted(int(i) for i in self.indices))
        if len(set(idx)) != len(idx) or (idx and (idx[0] < 0 or idx[-1] >= self.n)):
            raise InvalidInputError(f"invalid mask indices {idx} for n={self.n}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_bits(cls, bits) -> "SubsetMask":
        bits = np.asarray(bits, dtype=bool)
        return cls(tuple(np.flatnonzero(bits)), bits.size)

    @classmethod
    def from_one_based(cls, indices: Iterable[int], n: int) -> "SubsetMask":
        return cls(tuple(i - 1 for i in indices), n)

    @property
    def bits(self) -> np.ndarray:
        b = np.zeros(self.n, dtype=bool)
        b[list(self.indices)] = True
        return b

    @property
    def h(self) -> int:
        return len(self.indices)

    @property
    def one_based(self) -> Tuple[int, ...]:
        return tuple(i + 1 for i in self.indices)

    def __repr__(self):
        return f"SubsetMask({list(self.one_based)} of {self.n})"


@dataclass
class Counters:
    index_tuples_visited: int = 0
    systems_solved: int = 0
    regular_systems: int = 0
    candidates_in_Hp: int = 0
    J_evaluations: int = 0

    def __add__(self, other: "Counters") -> "Counters":
        return Counters(
            self.index_tuples_visited + other.index_tuples_visited,
            self.systems_solved + other.systems_solved,
            self.regular_systems + other.regular_systems,
            self.candidates_in_Hp + other.candidates_in_Hp,
            self.J_evaluations + other.J_evaluations,
        )

    def as_dict(self) -> dict:
        return {
            "index_tuples_visited": self.index_tuples_visited,
            "systems_solved": self.systems_solved,
            "regular_systems": self.regular_systems,
            "candidates_in_Hp": self.candidates_in_Hp,
            "J_evaluations": self.J_evaluations,
        }


@dataclass(frozen=True)
class FitResult:
    beta: np.ndarray
    objective: float
    mask: SubsetMask
    counters: Counters = field(default_factory=Counters)
    notes: Tuple[str, ...] = ()


def squared_residuals(problem: Problem, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=float).reshape(problem.p)
    if not np.all(np.isfinite(beta)):
        raise InvalidInputError("beta contains non-finite entries")
    r = problem.Y - problem.X @ beta
    return r * r


def sorted_order(sq: np.ndarray) -> np.ndarray:
    """Ascending order of squared residuals; exact ties keep index order."""
    return np.argsort(sq, kind="stable")


def lts_objective(problem: Problem, beta) -> float:
    """Sum of the ``h`` smallest squared residuals at ``beta``."""
    sq = squared_residuals(problem, beta)
    return float(np.sort(sq, kind="stable")[: problem.h].sum())


def ols_objective(problem: Problem, beta) -> float:
    return float(squared_residuals(problem, beta).sum())


def _as_mask(problem: Problem, mask) -> SubsetMask:
    if isinstance(mask, SubsetMask):
        if mask.n != problem.n:
            raise InvalidInputError(f"mask is over {mask.n} observations, problem has {problem.n}")
        return mask
    return SubsetMask(tuple(mask), problem.n)


def subset_objective_J(problem: Problem, mask) -> Tuple[np.ndarray, float]:
    """OLS fit on the retained rows and its residual sum of squares.

    Raises SingularFitError naming the mask if the retained rows are rank
    deficient.
    """
    mask = _as_mask(problem, mask)
    idx = list(mask.indices)
    Xs, Ys = problem.X[idx], problem.Y[idx]
    try:
        beta = least_squares(Xs, Ys)
    except SingularFitError:
        raise SingularFitError(
            f"retained rows {list(mask.one_based)} do not have full column rank",
            subset=mask.indices,
        ) from None
    r = Ys - Xs @ beta
    return beta, float(r @ r)


def subset_objective_J_batch(problem: Problem, index_rows) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised ``J`` over an (m, h) array of 0-based retained indices.

    Returns ``(ok, betas, values)``; singular subsets have ``ok = False`` and
    NaN entries.
    """
    index_rows = np.asarray(index_rows, dtype=np.intp)
    Xs = problem.X[index_rows]
    Ys = problem.Y[index_rows]
    ok, betas = least_squares_batch(Xs, Ys)
    values = np.full(index_rows.shape[0], np.nan)
    if ok.any():
        r = Ys[ok] - np.einsum("mhp,mp->mh", Xs[ok], betas[ok])
        values[ok] = np.einsum("mh,mh->m", r, r)
    return ok, betas, values


def make_problem(X, Y, h: Optional[int] = None, *, has_intercept=False,
                 residual_eq_tol=DEFAULT_RESIDUAL_EQ_TOL, pivot_tol=DEFAULT_PIVOT_TOL) -> Problem:
    """Convenience constructor.  ``h`` defaults to ``(n + p + 1) // 2``."""
    ds = Dataset(X, Y, has_intercept)
    if h is None:
        h = (ds.n + ds.p + 1) // 2
    return Problem(ds, h, TolerancePolicy(residual_eq_tol, pivot_tol))


def n_subsets(n: int, h: int) -> int:
    return math.comb(n, h)


TIE_REL_TOL = 1e-12


def near_minimum(pairs, rel_tol=TIE_REL_TOL):
    """Keep the ``(value, mask)`` pairs within ``rel_tol`` of the smallest value.

    Applying this per chunk and again to the union of the survivors gives the
    same set as applying it once to everything, so chunked and threaded
    searches reduce deterministically.
    """
    pairs = list(pairs)
    if not pairs:
        return []
    best = min(v for v, _ in pairs)
    return [(v, m) for v, m in pairs if v - best <= rel_tol * best]


def select_minimum(pairs, rel_tol=TIE_REL_TOL):
    """The ``(value, mask)`` pair with minimal value; near-ties go to the
    lexicographically smallest mask."""
    survivors = near_minimum(pairs, rel_tol)
    if not survivors:
        return None
    return min(survivors, key=lambda vm: vm[1])
