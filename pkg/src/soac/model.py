"""ILP data model and canonicalization.

An :class:`IlpProblem` holds named binary/bounded-integer variables, linear
rows with relations <=, >=, =, and a min/max objective.  Everything the rest
of the package consumes is the canonical form produced by
:func:`canonicalize`: binary variables only, every row as <=, minimization.
Feasibility and objective evaluation here are exact (integer arithmetic when
the data is integral, compensated summation otherwise) so that solution
checking never depends on the dynamics that produced a candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

LE = "<="
GE = ">="
EQ = "="
RELATIONS = (LE, GE, EQ)

MINIMIZE = "min"
MAXIMIZE = "max"

BINARY = "binary"
INTEGER = "integer"

# Guard on u - l for a single integer variable; larger spans are refused.
EXPANSION_GUARD = 2**30

# Sentinel bound meaning "no objective-bound row".
NO_BOUND = math.inf


class ModelError(ValueError):
    """Base class for model construction/canonicalization failures."""


class InvalidProblemError(ModelError):
    def __init__(self, defects: Sequence["Defect"]):
        self.defects = list(defects)
        super().__init__("; ".join(str(d) for d in defects))


class ExpansionTooLargeError(ModelError):
    pass


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str = BINARY
    lower: int = 0
    upper: int = 1

    @staticmethod
    def binary(name: str) -> "Variable":
        return Variable(name, BINARY, 0, 1)

    @staticmethod
    def integer(name: str, lower: int, upper: int) -> "Variable":
        return Variable(name, INTEGER, lower, upper)


@dataclass(frozen=True)
class Row:
    name: str
    coeffs: Mapping[str, float]
    relation: str
    rhs: float


@dataclass(frozen=True)
class IlpProblem:
    name: str
    variables: tuple[Variable, ...]
    rows: tuple[Row, ...]
    objective: Mapping[str, float] = field(default_factory=dict)
    offset: float = 0.0
    sense: str = MINIMIZE


@dataclass(frozen=True)
class Defect:
    entity: str
    reason: str

    def __str__(self) -> str:
        return f"{self.entity}: {self.reason}"


@dataclass(frozen=True)
class DirectVar:
    """Original binary variable mapped straight to one canonical bit."""

    name: str
    index: int


@dataclass(frozen=True)
class ExpandedVar:
    """Original integer variable x = lower + sum(weight * bit)."""

    name: str
    lower: int
    bits: tuple[tuple[int, int], ...]  # (bit index, weight)


@dataclass(frozen=True)
class VarMap:
    entries: tuple[Union[DirectVar, ExpandedVar], ...]
    n: int


@dataclass(frozen=True)
class CanonicalRow:
    name: str
    coeffs: tuple[tuple[int, float], ...]  # (bit index, coefficient), ascending
    rhs: float
    integral: bool


@dataclass(frozen=True)
class CanonicalProblem:
    n: int
    rows: tuple[CanonicalRow, ...]
    objective: tuple[tuple[int, float], ...]
    offset: float
    var_map: VarMap
    flipped: bool  # original sense was max; original value = -canonical value
    integral: bool
    # Index of an empty row with negative rhs found during canonicalization,
    # i.e. a constant-falsity check; None when no such row exists.
    trivial_infeasible_row: Union[int, None] = None


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    violations: tuple[tuple[int, float], ...]  # (row index, violation amount)


def _is_integral(x: float) -> bool:
    return isinstance(x, int) or (isinstance(x, float) and x.is_integer())


def validate(problem: IlpProblem) -> list[Defect]:
    """Check all structural invariants; an empty list means well-formed."""
    defects: list[Defect] = []
    seen: set[str] = set()
    for v in problem.variables:
        ent = f"variable {v.name!r}"
        if not v.name:
            defects.append(Defect("variable", "empty name"))
        elif v.name in seen:
            defects.append(Defect(ent, "duplicate name"))
        seen.add(v.name)
        if v.kind not in (BINARY, INTEGER):
            defects.append(Defect(ent, f"unknown kind {v.kind!r}"))
        elif v.kind == INTEGER:
            if v.upper < v.lower:
                defects.append(Defect(ent, f"upper {v.upper} < lower {v.lower}"))
            elif v.upper - v.lower > EXPANSION_GUARD:
                defects.append(Defect(ent, f"span {v.upper - v.lower} exceeds guard {EXPANSION_GUARD}"))
    for row in problem.rows:
        ent = f"row {row.name!r}"
        if row.relation not in RELATIONS:
            defects.append(Defect(ent, f"unknown relation {row.relation!r}"))
        if not math.isfinite(row.rhs):
            defects.append(Defect(ent, f"non-finite rhs {row.rhs}"))
        for name, c in row.coeffs.items():
            if name not in seen:
                defects.append(Defect(ent, f"unknown variable {name!r}"))
            if not math.isfinite(c):
                defects.append(Defect(ent, f"non-finite coefficient for {name!r}"))
    for name, c in problem.objective.items():
        if name not in seen:
            defects.append(Defect("objective", f"unknown variable {name!r}"))
        if not math.isfinite(c):
            defects.append(Defect("objective", f"non-finite coefficient for {name!r}"))
    if not math.isfinite(problem.offset):
        defects.append(Defect("objective", f"non-finite offset {problem.offset}"))
    if problem.sense not in (MINIMIZE, MAXIMIZE):
        defects.append(Defect("objective", f"unknown sense {problem.sense!r}"))
    return defects


def expansion_weights(span: int) -> list[int]:
    """Weights 1, 2, 4, ..., 2^(m-1), residual covering {0..span} by subset sums."""
    if span < 0:
        raise ValueError("span must be non-negative")
    if span == 0:
        return []
    m = (span + 1).bit_length() - 1  # largest m with 2^m - 1 <= span
    weights = [1 << k for k in range(m)]
    residual = span - ((1 << m) - 1)
    if residual:
        weights.append(residual)
    return weights


def canonicalize(problem: IlpProblem) -> CanonicalProblem:
    """Rewrite to binary variables, <= rows only, minimization.

    Equality rows split into a <=/>= pair, >= rows are negated, integer
    variables expand to weighted bits with lower-bound constants folded into
    rhs and offset, and a max objective is negated (recorded via ``flipped``).
    Decoding through the returned var_map is a surjection onto the original
    feasible set that preserves objective values.
    """
    defects = validate(problem)
    if defects:
        raise InvalidProblemError(defects)

    entries: list[Union[DirectVar, ExpandedVar]] = []
    n = 0
    for v in problem.variables:
        if v.kind == BINARY:
            entries.append(DirectVar(v.name, n))
            n += 1
        else:
            span = v.upper - v.lower
            if span > EXPANSION_GUARD:
                raise ExpansionTooLargeError(f"variable {v.name!r} span {span}")
            weights = expansion_weights(span)
            bits = tuple((n + k, w) for k, w in enumerate(weights))
            entries.append(ExpandedVar(v.name, v.lower, bits))
            n += len(weights)
    by_name = {e.name: e for e in entries}

    def expand(coeffs: Mapping[str, float]) -> tuple[list[tuple[int, float]], float]:
        """Substitute bits for variables; returns (bit coeffs, folded constant)."""
        out: list[tuple[int, float]] = []
        constant = 0.0
        for name, c in coeffs.items():
            if c == 0:
                continue
            e = by_name[name]
            if isinstance(e, DirectVar):
                out.append((e.index, float(c)))
            else:
                constant += c * e.lower
                out.extend((idx, c * w) for idx, w in e.bits)
        out.sort(key=lambda t: t[0])
        return out, constant

    rows: list[CanonicalRow] = []
    trivial: Union[int, None] = None

    def add_row(name: str, coeffs: list[tuple[int, float]], rhs: float) -> None:
        nonlocal trivial
        integral = all(_is_integral(c) for _, c in coeffs) and _is_integral(rhs)
        rows.append(CanonicalRow(name, tuple(coeffs), float(rhs), integral))
        if not coeffs and rhs < 0 and trivial is None:
            trivial = len(rows) - 1

    for row in problem.rows:
        coeffs, constant = expand(row.coeffs)
        rhs = row.rhs - constant
        neg = [(j, -c) for j, c in coeffs]
        if row.relation == LE:
            add_row(row.name, coeffs, rhs)
        elif row.relation == GE:
            add_row(row.name, neg, -rhs)
        else:
            add_row(f"{row.name}#le", coeffs, rhs)
            add_row(f"{row.name}#ge", neg, -rhs)

    obj, constant = expand(problem.objective)
    offset = problem.offset + constant
    flipped = problem.sense == MAXIMIZE
    if flipped:
        obj = [(j, -c) for j, c in obj]
        offset = -offset

    integral = (
        all(r.integral for r in rows)
        and all(_is_integral(c) for _, c in obj)
        and _is_integral(offset)
    )
    return CanonicalProblem(
        n=n,
        rows=tuple(rows),
        objective=tuple(obj),
        offset=float(offset),
        var_map=VarMap(tuple(entries), n),
        flipped=flipped,
        integral=integral,
        trivial_infeasible_row=trivial,
    )


def evaluate_row(row: CanonicalRow, a: Sequence[int]) -> float:
    """sum(a_ij * x_j) - b_i, exact: integer arithmetic when the row is integral,
    compensated summation otherwise."""
    if row.integral:
        total = sum(int(c) * int(a[j]) for j, c in row.coeffs) - int(row.rhs)
        return float(total)
    return math.fsum([c * a[j] for j, c in row.coeffs] + [-row.rhs])


def check_feasible(cp: CanonicalProblem, a: Sequence[int]) -> FeasibilityReport:
    """Exact feasibility of a canonical 0/1 assignment against every row."""
    violations = []
    for i, row in enumerate(cp.rows):
        value = evaluate_row(row, a)
        if value > 0:
            violations.append((i, value))
    return FeasibilityReport(not violations, tuple(violations))


def objective_value(cp: CanonicalProblem, a: Sequence[int]) -> float:
    """Canonical (minimization) objective c.x + offset, exact."""
    if cp.integral:
        return float(sum(int(c) * int(a[j]) for j, c in cp.objective) + int(cp.offset))
    return math.fsum([c * a[j] for j, c in cp.objective] + [cp.offset])


def original_objective_value(cp: CanonicalProblem, z: float) -> float:
    """Map a canonical objective value back to the problem's stated sense."""
    return -z if cp.flipped else z


def decode(vm: VarMap, a: Sequence[int]) -> dict[str, int]:
    """Map a canonical 0/1 assignment to original-space integer values."""
    out: dict[str, int] = {}
    for e in vm.entries:
        if isinstance(e, DirectVar):
            out[e.name] = int(a[e.index])
        else:
            out[e.name] = e.lower + sum(w * int(a[idx]) for idx, w in e.bits)
    return out


def evaluate_original(problem: IlpProblem, values: Mapping[str, int]) -> tuple[bool, float, list[str]]:
    """Exact original-space check: (feasible, objective in stated sense,
    names of violated rows).  Bounds count as rows for violation reporting."""
    violated: list[str] = []
    for v in problem.variables:
        x = values[v.name]
        lo, hi = (0, 1) if v.kind == BINARY else (v.lower, v.upper)
        if not (lo <= x <= hi):
            violated.append(f"bound({v.name})")
    for row in problem.rows:
        integral = all(_is_integral(c) for c in row.coeffs.values()) and _is_integral(row.rhs)
        if integral:
            lhs: float = sum(int(c) * int(values[name]) for name, c in row.coeffs.items())
        else:
            lhs = math.fsum(c * values[name] for name, c in row.coeffs.items())
        ok = (
            lhs <= row.rhs
            if row.relation == LE
            else lhs >= row.rhs
            if row.relation == GE
            else lhs == row.rhs
        )
        if not ok:
            violated.append(row.name)
    integral_obj = all(_is_integral(c) for c in problem.objective.values()) and _is_integral(problem.offset)
    if integral_obj:
        obj: float = float(sum(int(c) * int(values[name]) for name, c in problem.objective.items()) + int(problem.offset))
    else:
        obj = math.fsum([c * values[name] for name, c in problem.objective.items()] + [problem.offset])
    return (not violated, obj, violated)


def add_objective_bound(cp: CanonicalProblem, bound: float) -> CanonicalProblem:
    """Append the row c.x <= bound - offset; NO_BOUND returns cp unchanged."""
    if bound == NO_BOUND:
        return cp
    rhs = bound - cp.offset
    integral = all(_is_integral(c) for _, c in cp.objective) and _is_integral(rhs)
    row = CanonicalRow("objective-bound", cp.objective, float(rhs), integral)
    return CanonicalProblem(
        n=cp.n,
        rows=cp.rows + (row,),
        objective=cp.objective,
        offset=cp.offset,
        var_map=cp.var_map,
        flipped=cp.flipped,
        integral=cp.integral and integral,
        trivial_infeasible_row=cp.trivial_infeasible_row,
    )
