"""Check the data conditions under which the scan is guaranteed exact.

Duplicated rows (up to sign) make whole lines of residual ties, an exact
fit on h points gives a zero objective, and rank-deficient subsets make
J undefined.  Each check names the offending rows or signs.
"""
import numpy as np

from exactlts import Dataset, Problem, bsa_solve, check_all, example1

def show(title, problem, fit=None):
    print(title)
    for rep in check_all(problem, fit):
        extra = f"  witnesses {rep.witnesses[:3]}" if rep.witnesses else ""
        print(f"  {rep.assumption_id.value:9s} {rep.status.value:12s}{extra}")
    print()

problem = Problem(example1(), 5)
show("nine-point example", problem, bsa_solve(problem))

X = np.array([[1.0, 2.0], [3.0, -1.0], [1.0, 2.0], [-3.0, 1.0], [0.5, 0.5], [2.0, 1.0]])
show("rows 1/3 equal, rows 2/4 opposite", Problem(Dataset(X, np.arange(6.0)), 4))

x = np.arange(1.0, 9.0)
y = 3.0 * x
y[[1, 6]] += [40.0, -25.0]
line = Problem(Dataset(x, y), 5)
show("six points exactly on a line", line, bsa_solve(line))

Xi = np.column_stack([np.ones(7), np.arange(7.0), np.arange(7.0) ** 2])
show("intercept model", Problem(Dataset(Xi, np.sin(np.arange(7.0)), has_intercept=True), 5))
