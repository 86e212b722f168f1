"""Self-organizing algebraic circuit compiled from a canonical problem.

One gate per <= row.  A gate reads terminal voltages v in [-1, 1]
(x~ = (v+1)/2 relaxes the bit), measures a normalized violation
C = clamp((a.x~ - b) / M, 0, 1) and injects correction currents
I_j = -(a_j / L) * C into its terminals until the inequality holds.
L = sum|a_j| bounds the injected current, M = sum of positive a_j - b is
the worst-case violation over the unit cube, so C and I are invariant
under row scaling.

Rows that can never be violated (M <= 0) are dropped as inert; rows violated
even by their most favorable assignment mark the circuit trivially
infeasible.  Packed CSR-style arrays on Soac drive the vectorized and
compiled steppers; the per-gate functions below are the readable reference
used by tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CanonicalProblem


@dataclass(frozen=True)
class Soag:
    row: int  # index into CanonicalProblem.rows
    terminals: tuple[tuple[int, float], ...]  # (var index, coefficient), ascending
    b: float
    L: float  # sum |a_j|
    M: float  # sum_{a_j > 0} a_j - b


@dataclass(frozen=True)
class Soac:
    n: int
    gates: tuple[Soag, ...]
    # adjacency[j] lists (gate index, terminal position) for every gate touching j
    adjacency: tuple[tuple[tuple[int, int], ...], ...]
    dropped: tuple[int, ...]  # inert row indices (M <= 0)
    trivially_infeasible: int | None  # row index, or None

    # Packed arrays, one terminal entry per (gate, var) pair, gate-major order:
    gate_indptr: np.ndarray  # int64, len gates+1
    term_var: np.ndarray  # int64, len nnz
    term_coef: np.ndarray  # float64, len nnz
    term_coef_over_l: np.ndarray  # float64, a_j / L
    term_abs_over_l: np.ndarray  # float64, |a_j| / L
    gate_b: np.ndarray  # float64, len gates
    gate_m: np.ndarray  # float64, len gates
    # Exact-check view of *all* rows (dropped ones included), int64 when the
    # problem is integral, float64 otherwise:
    check_indptr: np.ndarray
    check_var: np.ndarray
    check_coef: np.ndarray
    check_rhs: np.ndarray
    integral: bool

    @property
    def nnz(self) -> int:
        return int(self.term_var.size)


def build_circuit(cp: CanonicalProblem) -> Soac:
    """Compile one gate per live row plus the exact-check arrays."""
    gates: list[Soag] = []
    dropped: list[int] = []
    trivially_infeasible: int | None = None

    for i, row in enumerate(cp.rows):
        coeffs = row.coeffs
        b = row.rhs
        max_violation = sum(c for _, c in coeffs if c > 0) - b
        min_violation = sum(c for _, c in coeffs if c < 0) - b
        if min_violation > 0:
            if trivially_infeasible is None:
                trivially_infeasible = i
            continue
        if max_violation <= 0:
            dropped.append(i)
            continue
        L = sum(abs(c) for _, c in coeffs)
        gates.append(Soag(i, coeffs, b, L, max_violation))

    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(cp.n)]
    for g, gate in enumerate(gates):
        for pos, (j, _) in enumerate(gate.terminals):
            adjacency[j].append((g, pos))

    nnz = sum(len(g.terminals) for g in gates)
    gate_indptr = np.zeros(len(gates) + 1, dtype=np.int64)
    term_var = np.zeros(nnz, dtype=np.int64)
    term_coef = np.zeros(nnz, dtype=np.float64)
    gate_b = np.zeros(len(gates), dtype=np.float64)
    gate_m = np.zeros(len(gates), dtype=np.float64)
    k = 0
    for g, gate in enumerate(gates):
        gate_b[g] = gate.b
        gate_m[g] = gate.M
        for j, c in gate.terminals:
            term_var[k] = j
            term_coef[k] = c
            k += 1
        gate_indptr[g + 1] = k
    gate_l = np.array([g.L for g in gates], dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        term_coef_over_l = term_coef / np.repeat(gate_l, np.diff(gate_indptr)) if nnz else term_coef.copy()
    term_abs_over_l = np.abs(term_coef_over_l)

    check_dtype = np.int64 if cp.integral else np.float64
    check_nnz = sum(len(r.coeffs) for r in cp.rows)
    check_indptr = np.zeros(len(cp.rows) + 1, dtype=np.int64)
    check_var = np.zeros(check_nnz, dtype=np.int64)
    check_coef = np.zeros(check_nnz, dtype=check_dtype)
    check_rhs = np.zeros(len(cp.rows), dtype=check_dtype)
    k = 0
    for i, row in enumerate(cp.rows):
        check_rhs[i] = row.rhs
        for j, c in row.coeffs:
            check_var[k] = j
            check_coef[k] = c
            k += 1
        check_indptr[i + 1] = k

    return Soac(
        n=cp.n,
        gates=tuple(gates),
        adjacency=tuple(tuple(a) for a in adjacency),
        dropped=tuple(dropped),
        trivially_infeasible=trivially_infeasible,
        gate_indptr=gate_indptr,
        term_var=term_var,
        term_coef=term_coef,
        term_coef_over_l=term_coef_over_l,
        term_abs_over_l=term_abs_over_l,
        gate_b=gate_b,
        gate_m=gate_m,
        check_indptr=check_indptr,
        check_var=check_var,
        check_coef=check_coef,
        check_rhs=check_rhs,
        integral=cp.integral,
    )


def violation(gate: Soag, v: np.ndarray) -> float:
    """Normalized violation C in [0, 1]; zero iff the relaxed row holds."""
    r = 0.0
    for j, c in gate.terminals:
        r += c * (0.5 * (v[j] + 1.0))
    r -= gate.b
    c_raw = r / gate.M
    return min(max(c_raw, 0.0), 1.0)


def correction_currents(gate: Soag, v: np.ndarray) -> list[tuple[int, float]]:
    """Sparse terminal currents I_j = -(a_j / L) * C; all zero iff satisfied."""
    c_val = violation(gate, v)
    return [(j, -(a / gate.L) * c_val) for j, a in gate.terminals]


def all_violations(circuit: Soac, v: np.ndarray) -> np.ndarray:
    """Vectorized C for every gate (reference path for tests and traces)."""
    if not circuit.gates:
        return np.zeros(0)
    xt = 0.5 * (v + 1.0)
    prod = circuit.term_coef * xt[circuit.term_var]
    sums = np.add.reduceat(prod, circuit.gate_indptr[:-1]) if circuit.nnz else np.zeros(len(circuit.gates))
    return np.clip((sums - circuit.gate_b) / circuit.gate_m, 0.0, 1.0)


def aggregate_currents_scatter(circuit: Soac, v: np.ndarray) -> np.ndarray:
    """Per-variable correction current totals, accumulated gate-by-gate."""
    out = np.zeros(circuit.n)
    for gate in circuit.gates:
        for j, current in correction_currents(gate, v):
            out[j] += current
    return out


def aggregate_currents_gather(circuit: Soac, v: np.ndarray) -> np.ndarray:
    """Same totals gathered through the adjacency transpose."""
    c_by_gate = [violation(g, v) for g in circuit.gates]
    out = np.zeros(circuit.n)
    for j, incident in enumerate(circuit.adjacency):
        for g, pos in incident:
            gate = circuit.gates[g]
            _, a = gate.terminals[pos]
            out[j] += -(a / gate.L) * c_by_gate[g]
    return out
