"""Exact reference solvers for desk-scale verification.

enumerate_optimum scans every assignment (vectorized, exact int64 arithmetic
for integral data); branch_and_bound is a deterministic DFS with a trivial
objective bound and per-row completion pruning.  Neither is a competitor to
the dynamics, they referee it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import model
from .model import CanonicalProblem

ENUM_GUARD = 24
BNB_GUARD = 34

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    status: str
    value: Optional[float]
    witness: Optional[tuple[int, ...]]


def _dense(cp: CanonicalProblem, dtype):
    m = len(cp.rows)
    a = np.zeros((m, cp.n), dtype=dtype)
    b = np.zeros(m, dtype=dtype)
    for i, row in enumerate(cp.rows):
        b[i] = row.rhs
        for j, c in row.coeffs:
            a[i, j] = c
    c_vec = np.zeros(cp.n, dtype=dtype)
    for j, c in cp.objective:
        c_vec[j] = c
    return a, b, c_vec


def enumerate_optimum(cp: CanonicalProblem, guard: int = ENUM_GUARD) -> OracleResult:
    """Exhaustive scan of all 2^n assignments; witness is the lexicographically
    smallest argmin (x_0 most significant)."""
    if cp.n > guard:
        raise TooLargeError(f"n = {cp.n} exceeds enumeration guard {guard}")
    n = cp.n
    dtype = np.int64 if cp.integral else np.float64
    a, b, c_vec = _dense(cp, dtype)
    offset = int(cp.offset) if cp.integral else cp.offset

    best_value = None
    best_code = None
    total = 1 << n
    block = 1 << 14
    # Bit j of the code is variable x_j with x_0 most significant, so code
    # order is lexicographic order over assignment vectors.
    shifts = np.arange(n - 1, -1, -1, dtype=np.uint64)
    for start in range(0, total, block):
        codes = np.arange(start, min(start + block, total), dtype=np.uint64)
        bits = ((codes[:, None] >> shifts[None, :]) & 1).astype(dtype)
        feasible = np.all(bits @ a.T <= b, axis=1)
        if not feasible.any():
            continue
        values = bits[feasible] @ c_vec
        k = int(np.argmin(values))  # first minimum = lowest code = lowest lex
        value = values[k]
        if best_value is None or value < best_value:
            best_value = value
            best_code = int(codes[feasible][k])
    if best_value is None:
        return OracleResult(INFEASIBLE, None, None)
    witness = tuple((best_code >> (n - 1 - j)) & 1 for j in range(n))
    return OracleResult(OPTIMAL, float(best_value + offset), witness)


def branch_and_bound(cp: CanonicalProblem, guard: int = BNB_GUARD) -> OracleResult:
    """DFS in variable index order, 0 branch before 1.

    Prunes on (a) partial objective plus the best possible free completion
    meeting the incumbent and (b) any row violated even by its most favorable
    free completion.  Candidate improvements are re-verified with the exact
    model arithmetic before acceptance.
    """
    if cp.n > guard:
        raise TooLargeError(f"n = {cp.n} exceeds branch-and-bound guard {guard}")
    n = cp.n
    m = len(cp.rows)
    exact_int = cp.integral
    a, b, c_vec = _dense(cp, np.int64 if exact_int else np.float64)

    # rows_at[d]: (row, coeff) pairs consumed when x_d is assigned
    rows_at: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for i, row in enumerate(cp.rows):
        for j, c in row.coeffs:
            rows_at[j].append((i, c))

    # Most favorable remaining contribution for row i once depth d is reached.
    minrest = np.zeros((n + 1, m), dtype=a.dtype)
    for d in range(n - 1, -1, -1):
        minrest[d] = minrest[d + 1]
        for i, c in rows_at[d]:
            if c < 0:
                minrest[d, i] += c
    obj_minrest = np.zeros(n + 1, dtype=a.dtype)
    for d in range(n - 1, -1, -1):
        obj_minrest[d] = obj_minrest[d + 1] + min(c_vec[d], 0)

    best_value: Optional[float] = None
    best_witness: Optional[tuple[int, ...]] = None
    x = np.zeros(n, dtype=np.int64)
    row_sum = np.zeros(m, dtype=a.dtype)

    def feasible_here(d: int) -> bool:
        # most favorable completion of every row must fit
        return bool(np.all(row_sum + minrest[d] <= b))

    def rec(d: int, obj_partial) -> None:
        nonlocal best_value, best_witness
        if not feasible_here(d):
            return
        if best_value is not None and obj_partial + obj_minrest[d] >= best_value:
            return
        if d == n:
            value = model.objective_value(cp, x)  # exact re-verification
            if model.check_feasible(cp, x).feasible and (best_value is None or value < best_value):
                best_value = value
                best_witness = tuple(int(t) for t in x)
            return
        for bit in (0, 1):
            x[d] = bit
            if bit:
                for i, c in rows_at[d]:
                    row_sum[i] += c
                rec(d + 1, obj_partial + c_vec[d])
                for i, c in rows_at[d]:
                    row_sum[i] -= c
            else:
                rec(d + 1, obj_partial)
        x[d] = 0

    rec(0, c_vec.dtype.type(0))
    if best_value is None:
        return OracleResult(INFEASIBLE, None, None)
    return OracleResult(OPTIMAL, float(best_value), best_witness)
