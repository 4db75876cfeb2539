import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from exactlts.errors import InvalidInputError, SingularFitError
from exactlts.model import (
    Dataset,
    Problem,
    SubsetMask,
    lts_objective,
    ols_objective,
    select_minimum,
    squared_residuals,
    subset_objective_J,
)

from conftest import one_based, random_problem


def brute_force_lts(problem, beta):
    """min over every h-subset of the weighted residual sum at beta."""
    sq = squared_residuals(problem, beta)
    return min(sq[list(c)].sum() for c in itertools.combinations(range(problem.n), problem.h))


def test_dataset_validation():
    with pytest.raises(InvalidInputError):
        Dataset(np.ones((2, 2)), [1.0, 2.0])  # n must exceed p
    with pytest.raises(InvalidInputError):
        Dataset(np.ones((3, 1)), [1.0, np.nan, 2.0])
    with pytest.raises(InvalidInputError):
        Dataset(np.array([[2.0, 1.0], [1.0, 2.0], [1.0, 3.0]]), [1, 2, 3], has_intercept=True)
    with pytest.raises(InvalidInputError):
        Problem(Dataset(np.ones((3, 2)) + np.eye(3)[:, :2], [1, 2, 3]), 1)


def test_dataset_is_read_only():
    ds = Dataset(np.arange(4.0)[:, None], np.arange(4.0))
    with pytest.raises(ValueError):
        ds.X[0, 0] = 5.0


def test_mask_views():
    m = SubsetMask((4, 0, 2), 6)
    assert m.indices == (0, 2, 4)
    assert m.one_based == (1, 3, 5)
    assert m.bits.tolist() == [True, False, True, False, True, False]
    assert SubsetMask.from_bits(m.bits) == m
    assert SubsetMask((0, 1, 5), 6) < SubsetMask((0, 2, 3), 6)
    with pytest.raises(InvalidInputError):
        SubsetMask((0, 0), 3)


def test_squared_residuals_at_zero(ex1):
    sq = squared_residuals(ex1, [0.0])
    np.testing.assert_allclose(sq, ex1.Y ** 2)
    assert sq[0] == pytest.approx(0.81)


def test_squared_residuals_tie_at_plus_root(ex1):
    beta = (ex1.Y[5] + ex1.Y[6]) / (ex1.X[5, 0] + ex1.X[6, 0])
    assert beta == pytest.approx(-17.97 / 2.20)
    sq = squared_residuals(ex1, [beta])
    assert sq[5] == pytest.approx(sq[6], rel=1e-12)


def test_interpolated_point_has_zero_residual(ex1):
    beta = ex1.Y[3] / ex1.X[3, 0]
    assert squared_residuals(ex1, [beta])[3] == pytest.approx(0.0, abs=1e-24)


@pytest.mark.parametrize("beta, expected", [(-0.77, 71.96), (2.06, 156.15)])
def test_published_objective_values(ex1, beta, expected):
    assert lts_objective(ex1, [beta]) == pytest.approx(expected, abs=0.05)


def test_h_equal_n_is_ols(ex1):
    full = Problem(ex1.dataset, ex1.n)
    for beta in (-3.0, 0.1, 7.0):
        assert lts_objective(full, [beta]) == pytest.approx(ols_objective(full, [beta]), rel=1e-14)


def test_J_on_example_global_subset(ex1):
    beta, value = subset_objective_J(ex1, SubsetMask(one_based(1, 2, 7, 8, 9), 9))
    assert beta[0] == pytest.approx(-0.774, abs=5e-4)
    assert value == pytest.approx(71.96, abs=0.05)


def test_J_on_first_five(ex1):
    mask = SubsetMask(one_based(1, 2, 3, 4, 5), 9)
    x, y = ex1.X[:5, 0], ex1.Y[:5]
    # closed form for a through-origin fit
    ref_beta = (x @ y) / (x @ x)
    ref_value = y @ y - (x @ y) ** 2 / (x @ x)
    beta, value = subset_objective_J(ex1, mask)
    assert beta[0] == pytest.approx(ref_beta, rel=1e-12)
    assert value == pytest.approx(ref_value, rel=1e-10)
    # the fit (about 2.92) is not in the last cell, so only the pointwise bound applies
    assert lts_objective(ex1, beta) <= value + 1e-9


def test_J_interpolates_when_h_equals_p():
    rng = np.random.default_rng(4)
    X = rng.normal(size=(6, 2))
    pr = Problem(Dataset(X, rng.normal(size=6)), 2)
    _, value = subset_objective_J(pr, (1, 4))
    assert value == pytest.approx(0.0, abs=1e-20)


def test_J_singular_names_mask():
    X = np.array([[1.0, 2.0], [2.0, 4.0], [1.0, 0.0], [0.0, 1.0]])
    pr = Problem(Dataset(X, [1.0, 2.0, 3.0, 4.0]), 2)
    with pytest.raises(SingularFitError) as e:
        subset_objective_J(pr, (0, 1))
    assert e.value.subset == (0, 1)


def test_lts_matches_enumeration_over_masks():
    rng = np.random.default_rng(5)
    for k in range(60):
        n = int(rng.integers(4, 11))
        p = int(rng.integers(1, min(4, n)))
        h = int(rng.integers(p, n + 1))
        pr = random_problem(k, n, p, h, 0.2)
        beta = rng.normal(size=p) * 3
        assert lts_objective(pr, beta) == pytest.approx(brute_force_lts(pr, beta), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), n=st.integers(4, 9), p=st.integers(1, 3))
def test_J_is_a_lower_bound_on_subset_sums(seed, n, p):
    p = min(p, n - 1)
    pr = random_problem(seed, n, p, n - 1, 0.2)
    rng = np.random.default_rng(seed)
    mask = SubsetMask(tuple(rng.choice(n, pr.h, replace=False)), n)
    _, value = subset_objective_J(pr, mask)
    bits = mask.bits
    for _ in range(100):
        beta = rng.normal(size=p) * 5
        sq = squared_residuals(pr, beta)
        assert value <= sq[bits].sum() * (1 + 1e-12) + 1e-12
        # the trimmed sum is the pointwise minimum over subsets
        assert lts_objective(pr, beta) <= sq[bits].sum() * (1 + 1e-12)


def test_scaling_response_scales_objective():
    rng = np.random.default_rng(6)
    for k in range(20):
        pr = random_problem(k, 8, 2, 6)
        scaled = Problem(Dataset(pr.X, 2.0 * pr.Y), pr.h)
        beta = rng.normal(size=2)
        assert lts_objective(scaled, 2 * beta) == pytest.approx(4 * lts_objective(pr, beta), rel=1e-12)


def test_select_minimum_prefers_smallest_mask_on_ties():
    a, b, c = SubsetMask((0, 3), 4), SubsetMask((0, 1), 4), SubsetMask((1, 2), 4)
    assert select_minimum([(1.0, a), (1.0 + 1e-14, b), (0.5 + 0.6, c)]) == (1.0 + 1e-14, b)
    assert select_minimum([(2.0, a), (1.0, c)]) == (1.0, c)
    assert select_minimum([]) is None
