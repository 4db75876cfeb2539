"""Reference data and a seeded generator of contaminated regression instances."""
from __future__ import annotations

import numpy as np

from .errors import InvalidInputError
from .model import Dataset

# one-regressor, no-intercept example with n = 9 observations (trimmed at h = 5)
EXAMPLE1_Y = (-0.90, -0.80, 33.32, -27.23, 12.63, -14.18, -3.79, -8.66, -16.45)
EXAMPLE1_X = (1.39, -2.25, 6.10, -8.50, 8.26, -8.67, 10.87, 13.70, 13.05)
EXAMPLE1_H = 5


def example1() -> Dataset:
    return Dataset(np.array(EXAMPLE1_X)[:, None], np.array(EXAMPLE1_Y))


def gen_instance(seed: int, n: int, p: int, outlier_fraction: float = 0.0,
                 intercept: bool = False):
    """Random linear data with a block of shifted responses.

    X entries are uniform on [-10, 10] (the first column is ones when
    ``intercept`` is set), the true coefficients are uniform on [-5, 5], the
    noise is standard normal and ``floor(outlier_fraction * n)`` randomly
    chosen responses are shifted by +50.

    Returns ``(dataset, true_beta)``.  The same arguments always give the
    same bytes.
    """
    if not (n > p >= 1):
        raise InvalidInputError(f"need n > p >= 1, got n={n}, p={p}")
    if not (0.0 <= outlier_fraction < 0.5):
        raise InvalidInputError("outlier_fraction must lie in [0, 0.5)")
    rng = np.random.default_rng(seed)
    X = rng.uniform(-10.0, 10.0, size=(n, p))
    if intercept:
        X[:, 0] = 1.0
    beta = rng.uniform(-5.0, 5.0, size=p)
    Y = X @ beta + rng.normal(0.0, 1.0, size=n)
    k = int(np.floor(outlier_fraction * n))
    if k:
        Y[rng.permutation(n)[:k]] += 50.0
    return Dataset(X, Y, intercept), beta
