"""Which h-subsets realise the trimmed sum at a given coefficient vector.

Away from ties the answer is a single subset: the ``h`` observations with
the smallest squared residuals.  When the ``h``-th and ``(h+1)``-th ordered
squared residuals coincide, every way of filling the remaining slots from
the tied block gives the same trimmed sum, and all of them are returned.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from .errors import DegenerateTieError
from .model import Problem, SubsetMask, sorted_order, squared_residuals

DEFAULT_TIE_CAP = 100_000


@dataclass(frozen=True)
class TieStructure:
    """Ordered-residual block around position ``h``.

    ``l`` residuals lie strictly below a block of ``t`` (approximately)
    equal residuals that contains position ``h``.  Indices are 0-based and
    listed in ascending residual order.
    """

    l: int
    t: int
    below_indices: Tuple[int, ...]
    tie_indices: Tuple[int, ...]

    def n_masks(self, h: int) -> int:
        """Number of masks in relation: C(t, h - l)."""
        return math.comb(self.t, h - self.l)


def _tie_structure(problem: Problem, sq: np.ndarray) -> TieStructure:
    h, n = problem.h, problem.n
    order = sorted_order(sq)
    s = sq[order]
    if h == n:
        return TieStructure(0, n, (), tuple(int(i) for i in order))
    eq = problem.tol.equal
    if not eq(s[h - 1], s[h]):
        return TieStructure(h - 1, 1, tuple(int(i) for i in order[: h - 1]), (int(order[h - 1]),))
    lo = h - 1
    while lo > 0 and eq(s[lo - 1], s[lo]):
        lo -= 1
    hi = h
    while hi + 1 < n and eq(s[hi], s[hi + 1]):
        hi += 1
    return TieStructure(
        lo,
        hi - lo + 1,
        tuple(int(i) for i in order[:lo]),
        tuple(int(i) for i in order[lo: hi + 1]),
    )


def tie_structure_at(problem: Problem, beta) -> TieStructure:
    return _tie_structure(problem, squared_residuals(problem, beta))


def masks_from_ties(problem: Problem, ties: TieStructure, cap: int = DEFAULT_TIE_CAP) -> List[SubsetMask]:
    fill = problem.h - ties.l
    count = math.comb(ties.t, fill)
    if count > cap:
        raise DegenerateTieError(
            f"{count} subsets tie at this point (block of {ties.t}, choosing {fill}); cap is {cap}",
            count=count,
        )
    below = ties.below_indices
    # lexicographic on the chosen indices is also lexicographic on the full masks
    return [SubsetMask(below + chosen, problem.n)
            for chosen in itertools.combinations(sorted(ties.tie_indices), fill)]


def subsets_in_relation(problem: Problem, beta, cap: int = DEFAULT_TIE_CAP) -> List[SubsetMask]:
    """All masks whose weighted residual sum equals the trimmed sum at ``beta``.

    Masks come back in lexicographic order of their retained indices.
    """
    return masks_from_ties(problem, tie_structure_at(problem, beta), cap)
