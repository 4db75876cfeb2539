"""Brute-force reference: minimise J over every h-subset."""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import CapExceededError, InvalidInputError, SingularFitError
from .model import (
    Counters,
    FitResult,
    Problem,
    SubsetMask,
    near_minimum,
    select_minimum,
    subset_objective_J,
    subset_objective_J_batch,
)

DEFAULT_CAP = 2_000_000
CHUNK_MASKS = 8192


def _chunks(n, h, size):
    it = itertools.combinations(range(n), h)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield np.array(block, dtype=np.intp)


def _scan(problem, rows):
    ok, _, values = subset_objective_J_batch(problem, rows)
    pairs = [(float(values[k]), SubsetMask(tuple(rows[k]), problem.n)) for k in np.flatnonzero(ok)]
    return near_minimum(pairs), int(ok.sum()), int((~ok).sum())


def exact_enumerate(problem: Problem, cap: int = DEFAULT_CAP, threads: int = 1) -> FitResult:
    """Evaluate J on all C(n, h) subsets and return the best one.

    Subsets whose retained rows are rank deficient are skipped.  Ties
    within 1e-12 relative go to the lexicographically smallest subset.
    """
    if threads < 1:
        raise InvalidInputError("threads must be >= 1")
    n, h = problem.n, problem.h
    total = math.comb(n, h)
    if total > cap:
        raise CapExceededError(
            f"exhaustive search needs C({n},{h}) = {total} subset fits, above the cap of {cap}",
            count=total, cap=cap,
        )
    work = lambda rows: _scan(problem, rows)  # noqa: E731
    chunks = _chunks(n, h, CHUNK_MASKS)
    if threads == 1:
        results = [work(rows) for rows in chunks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, chunks))

    pairs = [pm for best, _, _ in results for pm in best]
    evaluated = sum(r[1] for r in results)
    skipped = sum(r[2] for r in results)
    chosen = select_minimum(pairs)
    if chosen is None:
        raise SingularFitError(f"all {total} subsets of size {h} are rank deficient")
    beta, value = subset_objective_J(problem, chosen[1])
    counters = Counters(J_evaluations=evaluated)
    notes = (f"skipped_singular_masks={skipped}",) if skipped else ()
    return FitResult(beta, value, chosen[1], counters, notes)
