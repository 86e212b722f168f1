#!/usr/bin/env python3
"""Build a small 0-1 program in code and solve it end to end.

The pipeline: declare the problem, canonicalize to binary <=-form, and let
the solver run circuit trajectories until a rounded voltage state checks
exactly feasible, tightening an objective bound after each incumbent.
"""

from soac import model, solver
from soac.model import IlpProblem, Row, Variable

# A toy facility problem: open at most two of four sites, site 0 and 1
# conflict, maximize the total service value.
problem = IlpProblem(
    name="toy-facilities",
    variables=tuple(Variable.binary(f"site{j}") for j in range(4)),
    rows=(
        Row("at_most_two", {f"site{j}": 1 for j in range(4)}, "<=", 2),
        Row("conflict", {"site0": 1, "site1": 1}, "<=", 1),
    ),
    objective={"site0": 5, "site1": 4, "site2": 3, "site3": 2},
    sense="max",
)

defects = model.validate(problem)
print("validation defects:", defects or "none")

cp = model.canonicalize(problem)
print(f"canonical form: {cp.n} binary variables, {len(cp.rows)} <= rows, "
      f"max flipped to min: {cp.flipped}")

config = solver.SolverConfig(seed=0, restarts=8, max_steps_per_run=5000,
                             total_max_steps=200_000)
report = solver.solve_optimize(cp, config)

print("verdict:", report.verdict)
for inc in report.history:
    print(f"  incumbent objective {inc.objective} (seed {inc.seed}, {inc.steps} steps)")

best = report.best
print("best assignment:", best.assignment)
print("best objective:", best.objective)

ok, objective, violated = model.evaluate_original(problem, best.assignment)
assert ok and objective == best.objective
print("independently re-checked: feasible, objective", objective)
