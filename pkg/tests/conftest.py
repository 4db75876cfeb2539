import numpy as np
import pytest

from exactlts.datasets import EXAMPLE1_H, example1, gen_instance
from exactlts.model import Problem

# criterion id -> (passed, message); filled by test_acceptance.py
ACCEPTANCE_RESULTS = {}


@pytest.fixture
def ex1():
    return Problem(example1(), EXAMPLE1_H)


def random_problem(seed, n, p, h, fraction=0.0, intercept=False):
    ds, _ = gen_instance(seed, n, p, fraction, intercept=intercept)
    return Problem(ds, h)


def one_based(*idx):
    return tuple(i - 1 for i in idx)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        ok, msg = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {msg}")
