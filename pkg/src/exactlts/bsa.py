"""Borders scanning: exact LTS by visiting every vertex of the residual-tie arrangement.

Each (p+1)-tuple of observations and each choice of p signs defines a p x p
linear system whose solution is a point where the anchor residual ties,
up to sign, with the other p residuals of the tuple.  Points where that tie
also sits at ordered position h/h+1 lie on the border between two cells
of constant active subset.  Every cell's subset is visible from one of its
border vertices, so evaluating J on the subsets seen at those vertices
finds the global minimum.

The per-candidate work is vectorised over chunks of tuples.  Chunking is
fixed independently of the thread count, and the reduction keeps every
near-minimal mask before choosing the lexicographically smallest, so the
result does not depend on scheduling.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .errors import InvalidInputError, NoCandidateError, SingularFitError
from .model import (
    Counters,
    FitResult,
    Problem,
    SubsetMask,
    near_minimum,
    select_minimum,
    squared_residuals,
    subset_objective_J,
    subset_objective_J_batch,
)
from .numerics import solve_square, solve_square_batch
from .relation import DEFAULT_TIE_CAP, _tie_structure, masks_from_ties

CHUNK_SYSTEMS = 16384


@dataclass(frozen=True)
class CandidatePoint:
    beta: np.ndarray
    tuple: Tuple[int, ...]
    signs: str
    in_Hp: bool


def sign_vectors(p: int) -> List[str]:
    """All sign vectors of length p in binary-counter order, '+' counting as 0."""
    return ["".join(s) for s in itertools.product("+-", repeat=p)]


def _sign_matrix(p: int) -> np.ndarray:
    return np.array([[1.0 if c == "+" else -1.0 for c in s] for s in sign_vectors(p)])


def candidate_roots_1d(problem: Problem, i: int, j: int) -> List[float]:
    """Points where observations i and j have equal squared residuals (p = 1).

    The difference root comes first, then the sum root; a root is dropped
    when its denominator vanishes relative to the data, and a sum root equal
    to the difference root is not repeated.
    """
    if problem.p != 1:
        raise InvalidInputError("candidate_roots_1d needs a single regressor")
    if i == j:
        raise InvalidInputError("indices must differ")
    roots, _ = _roots_1d(problem, np.array([i]), np.array([j]))
    return [float(r) for r in roots[0] if not np.isnan(r)]


def _roots_1d(problem: Problem, I: np.ndarray, J: np.ndarray):
    x = problem.X[:, 0]
    y = problem.Y
    xi, xj, yi, yj = x[I], x[J], y[I], y[J]
    thresh = problem.tol.pivot_tol * np.maximum(np.abs(xi), np.abs(xj))
    dm, dp = xi - xj, xi + xj
    ok_m = np.abs(dm) > thresh
    ok_p = np.abs(dp) > thresh
    with np.errstate(divide="ignore", invalid="ignore"):
        r_m = np.where(ok_m, (yi - yj) / np.where(ok_m, dm, 1.0), np.nan)
        r_p = np.where(ok_p, (yi + yj) / np.where(ok_p, dp, 1.0), np.nan)
    dup = ok_m & ok_p & (np.abs(r_m - r_p) <= 1e-12 * (1.0 + np.abs(r_m)))
    r_p = np.where(dup, np.nan, r_p)
    return np.stack([r_m, r_p], axis=1), np.stack([ok_m, ok_p & ~dup], axis=1)


def build_candidate_system(problem: Problem, tup: Sequence[int], signs: str):
    """Rows ``x[i1] o_k x[i_{k+1}]`` and right-hand side ``y[i1] o_k y[i_{k+1}]``.

    Every equation is anchored at the first index of the tuple.
    """
    tup = tuple(int(i) for i in tup)
    p = problem.p
    if len(tup) != p + 1 or len(set(tup)) != p + 1:
        raise InvalidInputError(f"need {p + 1} distinct indices, got {tup}")
    if len(signs) != p or set(signs) - {"+", "-"}:
        raise InvalidInputError(f"bad sign vector {signs!r}")
    s = np.array([1.0 if c == "+" else -1.0 for c in signs])
    a, rest = tup[0], list(tup[1:])
    A = problem.X[a][None, :] + s[:, None] * problem.X[rest]
    b = problem.Y[a] + s * problem.Y[rest]
    return A, b


def _border_test(problem: Problem, sq: np.ndarray, anchor: np.ndarray) -> np.ndarray:
    """Vectorised border-membership test over rows of squared residuals."""
    h = problem.h
    if h >= problem.n:
        return np.zeros(sq.shape[0], dtype=bool)
    part = np.partition(sq, (h - 1, h), axis=1)
    a = sq[np.arange(sq.shape[0]), anchor]
    eq = problem.tol.equal
    return eq(a, part[:, h - 1]) & eq(a, part[:, h])


def test_candidate(problem: Problem, beta, anchor: int) -> bool:
    """Whether the anchor's squared residual is tied at ordered positions h and h+1."""
    sq = squared_residuals(problem, beta)
    return bool(_border_test(problem, sq[None], np.array([anchor]))[0])


# ``pytest`` would otherwise try to collect the public name above as a test
test_candidate.__test__ = False


def iter_candidates(problem: Problem) -> Iterator[CandidatePoint]:
    """Every regular candidate point in enumeration order, one system at a time.

    Slow; intended for inspection and for cross-checking the batched scan.
    """
    n, p = problem.n, problem.p
    if p == 1:
        for i, j in itertools.combinations(range(n), 2):
            for root, s in zip(candidate_roots_1d(problem, i, j), "+-"):
                beta = np.array([root])
                yield CandidatePoint(beta, (i, j), s, test_candidate(problem, beta, i))
        return
    for tup in itertools.combinations(range(n), p + 1):
        for signs in sign_vectors(p):
            A, b = build_candidate_system(problem, tup, signs)
            out = solve_square(A, b, problem.tol.pivot_tol)
            if out.regular:
                yield CandidatePoint(out.solution, tup, signs,
                                     test_candidate(problem, out.solution, tup[0]))


def _tuple_chunks(n: int, k: int, size: int) -> Iterator[np.ndarray]:
    it = itertools.combinations(range(n), k)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


@dataclass
class _ChunkResult:
    counters: Counters
    best: list  # (J, SubsetMask) pairs near the chunk minimum
    n_border: int
    n_singular_masks: int


def _evaluate_border_points(problem: Problem, sq_rows: np.ndarray, tie_cap: int, counters: Counters):
    seen = {}
    for sq in sq_rows:
        for m in masks_from_ties(problem, _tie_structure(problem, sq), tie_cap):
            counters.J_evaluations += 1
            seen.setdefault(m.indices, m)
    if not seen:
        return [], 0
    masks = sorted(seen.values())
    ok, _, values = subset_objective_J_batch(problem, np.array([m.indices for m in masks]))
    pairs = [(float(v), m) for v, m, good in zip(values, masks, ok) if good]
    return near_minimum(pairs), int((~ok).sum())


def _scan_chunk_1d(problem: Problem, pairs: np.ndarray, tie_cap: int) -> _ChunkResult:
    c = Counters(index_tuples_visited=len(pairs), systems_solved=2 * len(pairs))
    roots, ok = _roots_1d(problem, pairs[:, 0], pairs[:, 1])
    beta = roots[ok]
    anchor = np.repeat(pairs[:, 0][:, None], 2, axis=1)[ok]
    c.regular_systems = int(beta.size)
    r = problem.Y[None, :] - beta[:, None] * problem.X[:, 0][None, :]
    sq = r * r
    hit = _border_test(problem, sq, anchor)
    c.candidates_in_Hp = int(hit.sum())
    best, bad = _evaluate_border_points(problem, sq[hit], tie_cap, c)
    return _ChunkResult(c, best, c.candidates_in_Hp, bad)


def _scan_chunk(problem: Problem, tuples: np.ndarray, signs: np.ndarray, tie_cap: int) -> _ChunkResult:
    X, Y = problem.X, problem.Y
    m, ns = len(tuples), len(signs)
    c = Counters(index_tuples_visited=m, systems_solved=m * ns)
    anchor = tuples[:, 0]
    rest = tuples[:, 1:]
    A = X[anchor][:, None, None, :] + signs[None, :, :, None] * X[rest][:, None, :, :]
    b = Y[anchor][:, None, None] + signs[None, :, :] * Y[rest][:, None, :]
    regular, beta = solve_square_batch(A, b, problem.tol.pivot_tol)
    beta = beta[regular]
    anchors = np.repeat(anchor[:, None], ns, axis=1)[regular]
    c.regular_systems = int(regular.sum())
    r = Y[None, :] - beta @ X.T
    sq = r * r
    hit = _border_test(problem, sq, anchors)
    c.candidates_in_Hp = int(hit.sum())
    best, bad = _evaluate_border_points(problem, sq[hit], tie_cap, c)
    return _ChunkResult(c, best, c.candidates_in_Hp, bad)


def _ols_short_circuit(problem: Problem) -> FitResult:
    mask = SubsetMask(tuple(range(problem.n)), problem.n)
    beta, value = subset_objective_J(problem, mask)
    return FitResult(beta, value, mask, Counters(J_evaluations=1), ("ols_short_circuit",))


def bsa_solve(problem: Problem, threads: int = 1, tie_cap: int = DEFAULT_TIE_CAP,
              chunk_systems: int = CHUNK_SYSTEMS) -> FitResult:
    """Exact LTS estimate by scanning all border candidates.

    ``threads`` only affects speed: chunk boundaries and the tie-break are
    fixed, so any thread count yields the same result and counters.
    """
    if threads < 1:
        raise InvalidInputError("threads must be >= 1")
    n, p, h = problem.n, problem.p, problem.h
    if h == n:
        return _ols_short_circuit(problem)

    if p == 1:
        chunks = _tuple_chunks(n, 2, max(1, chunk_systems // 2))
        work = lambda t: _scan_chunk_1d(problem, t, tie_cap)  # noqa: E731
    else:
        signs = _sign_matrix(p)
        chunks = _tuple_chunks(n, p + 1, max(1, chunk_systems // len(signs)))
        work = lambda t: _scan_chunk(problem, t, signs, tie_cap)  # noqa: E731

    if threads == 1:
        results = [work(t) for t in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, chunks))

    counters = Counters()
    pairs = []
    n_border = n_singular = 0
    for res in results:
        counters = counters + res.counters
        pairs.extend(res.best)
        n_border += res.n_border
        n_singular += res.n_singular_masks

    if n_border == 0:
        hint = ("the data likely violate the pairwise-distinct rows assumption"
                if p == 1 else
                "the sign-system rank assumption (or its intercept variant) is likely violated")
        raise NoCandidateError(f"no candidate point lies on a cell border; {hint}")
    chosen = select_minimum(pairs)
    if chosen is None:
        raise SingularFitError(
            "every subset found on a border is rank deficient; X is not h-full rank"
        )
    _, mask = chosen
    beta, value = subset_objective_J(problem, mask)
    notes = (f"skipped_singular_masks={n_singular}",) if n_singular else ()
    return FitResult(beta, value, mask, counters, notes)


def count_systems(n: int, p: int) -> int:
    """C(n, p+1) * 2^p: systems the general scan solves."""
    return math.comb(n, p + 1) * 2 ** p
