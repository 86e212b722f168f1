#!/usr/bin/env python3
"""Watch one trajectory relax a planted instance, step by step.

Writes the CSV trace (step, t, max violation, violated gate count) that the
CLI's --trace flag produces, then prints a coarse text rendering of the
worst violation decaying until the rounded voltages check exactly feasible.

Memory thresholds are set low here: the short-term memory then stays
responsive to small normalized violations and the gates keep trading
gradient pressure against rail rigidity for thousands of steps instead of
freezing an early rounding.
"""

import io

from soac import ingest, model
from soac.circuit import build_circuit
from soac.dynamics import Budget, DynParams, TraceWriter, integrate

spec = ingest.GenSpec("planted-random", n=12, m=9, density=0.4,
                      coeff_lo=-2, coeff_hi=3, seed=56)
problem, planted = ingest.generate(spec)
cp = model.canonicalize(problem)
circuit = build_circuit(cp)
print(f"instance: {problem.name}  ({circuit.n} vars, {len(circuit.gates)} live gates, "
      f"{len(circuit.dropped)} inert rows dropped)")

params = DynParams(gamma=0.03, delta=0.005, dt=0.15, check_every=50)
buf = io.StringIO()
trace = TraceWriter(buf, circuit.n)
outcome = integrate(circuit, cp, params, seed=4, budget=Budget(20_000), trace=trace)

print(f"outcome: {outcome.status} after {outcome.steps} steps (t = {outcome.t_final:.1f})")
if outcome.assignment is not None:
    report = model.check_feasible(cp, outcome.assignment)
    print("exact feasibility check:", report.feasible)
print(f"peak violation seen: {outcome.stats.peak_max_violation:.3f}")

rows = [line.split(",") for line in buf.getvalue().splitlines()[1:]]
print("\nstep   max violation   violated gates")
stride = max(1, len(rows) // 24)
for row in rows[::stride] + [rows[-1]]:
    step, _, maxc, violated = row
    bar = "#" * int(float(maxc) * 60)
    print(f"{step:>6}  {float(maxc):13.4f}   {violated:>3}  {bar}")

print("\nthe planted witness it was constructed around:", planted)
