"""Fit the nine-point single-regressor example exactly.

With h = 5 only five of the nine observations are kept.  The estimate is
the OLS fit on the best five, and the scan reports how much work it did.
"""
from exactlts import Problem, bsa_solve, example1, lts_objective

problem = Problem(example1(), h=5)
fit = bsa_solve(problem)

print("beta      ", fit.beta)
print("objective ", round(fit.objective, 4))
print("kept rows ", list(fit.mask.one_based))
print("counters  ", fit.counters.as_dict())

# the trimmed objective at the estimate is the same number
print("check     ", round(lts_objective(problem, fit.beta), 4))
