"""Walk the piecewise-quadratic objective of a single-regressor problem.

The real line splits into cells on which the set of the h smallest
residuals does not change.  A cell has a local minimum when its own OLS
fit lands inside it.
"""
import numpy as np

from exactlts import Problem, example1, landscape_1d, lts_objective

problem = Problem(example1(), h=5)
land = landscape_1d(problem)

print("cell boundaries:")
print(np.round(land.boundary_points, 4))
print()
for cell in land.cells:
    print(f"({cell.lower:9.4f}, {cell.upper:9.4f})  keeps {list(cell.mask.one_based)}")
print()
for m in land.local_minima:
    print(f"local minimum at {m.beta:8.4f}  value {m.value:9.3f}")
best = land.global_minimum
print(f"\nglobal minimum {best.value:.4f} at {best.beta:.5f}")

# coarse grid as a sanity check
grid = np.linspace(-10, 5, 30001)
vals = [lts_objective(problem, [b]) for b in grid]
print(f"grid minimum   {min(vals):.4f} at {grid[int(np.argmin(vals))]:.5f}")
