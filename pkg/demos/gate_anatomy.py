#!/usr/bin/env python3
"""Anatomy of a single algebraic gate: violation measure and currents.

Each <= row becomes a gate that reads its terminal voltages, relaxes them to
bits x~ = (v+1)/2, and measures how badly the row is violated on a 0..1
scale.  While violated it injects currents proportional to -a_j that drag
the voltages toward the satisfied half-space; the moment the relaxed row
holds, every current is exactly zero.
"""

import numpy as np

from soac import model
from soac.circuit import build_circuit, correction_currents, violation
from soac.model import IlpProblem, Row, Variable

problem = IlpProblem(
    name="one-gate",
    variables=(Variable.binary("a"), Variable.binary("b"), Variable.binary("c")),
    rows=(Row("r", {"a": 2, "b": 1, "c": -1}, "<=", 1),),
)
cp = model.canonicalize(problem)
circuit = build_circuit(cp)
gate = circuit.gates[0]

print(f"gate terminals: {gate.terminals}")
print(f"normalizers: L = {gate.L} (current bound), M = {gate.M} (worst violation)")
print()
print(f"{'voltages':>22} {'violation C':>12}  currents")
for v in (
    np.array([1.0, 1.0, -1.0]),   # a=b=1, c=0: worst case
    np.array([1.0, -1.0, -1.0]),  # a=1 only: violated by 1
    np.array([0.0, 0.0, 0.0]),    # everything undecided
    np.array([-1.0, 1.0, 1.0]),   # satisfied: all currents vanish
):
    c_val = violation(gate, v)
    currents = {f"v{j}": round(float(i), 4) for j, i in correction_currents(gate, v)}
    print(f"{str(v.tolist()):>22} {c_val:12.4f}  {currents}")

print()
print("scaling the row by 1000 changes neither C nor the currents:")
scaled = model.canonicalize(IlpProblem(
    "scaled", problem.variables,
    (Row("r", {"a": 2000, "b": 1000, "c": -1000}, "<=", 1000),),
))
gate_scaled = build_circuit(scaled).gates[0]
v = np.array([1.0, 1.0, -1.0])
print("  original C:", violation(gate, v), " scaled C:", violation(gate_scaled, v))
