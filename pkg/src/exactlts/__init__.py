"""Exact Least Trimmed Squares regression by borders scanning."""
from .bsa import bsa_solve, count_systems
from .datasets import example1, gen_instance
from .diagnostics import check_all, landscape_1d
from .errors import (
    CapExceededError,
    DegenerateTieError,
    InvalidInputError,
    LTSError,
    NoCandidateError,
    SingularFitError,
)
from .model import (
    Dataset,
    FitResult,
    Problem,
    SubsetMask,
    TolerancePolicy,
    lts_objective,
    make_problem,
    subset_objective_J,
)
from .oracle import exact_enumerate
from .relation import subsets_in_relation

__version__ = "0.1.0"

__all__ = [
    "bsa_solve", "count_systems", "example1", "gen_instance", "check_all", "landscape_1d",
    "CapExceededError", "DegenerateTieError", "InvalidInputError", "LTSError",
    "NoCandidateError", "SingularFitError", "Dataset", "FitResult", "Problem", "SubsetMask",
    "TolerancePolicy", "lts_objective", "make_problem", "subset_objective_J",
    "exact_enumerate", "subsets_in_relation",
]
