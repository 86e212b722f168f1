"""Problem ingestion: MPS and native JSON parsing, serialization, generators.

The MPS reader covers the pure-integer free-format subset (NAME, ROWS with
N/L/G/E, COLUMNS with INTORG/INTEND markers, RHS, BOUNDS with UP/LO/FX/BV,
OBJSENSE, ENDATA).  Continuous variables, RANGES, SOS and unbounded or
negative-lower-bound integers are rejected with structured errors.  The JSON
format mirrors IlpProblem field for field and round-trips losslessly; see
problem.schema.json at the repository root.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    BINARY,
    EQ,
    GE,
    INTEGER,
    LE,
    MAXIMIZE,
    MINIMIZE,
    IlpProblem,
    Row,
    Variable,
    validate,
)


class ParseError(ValueError):
    """Malformed input; carries the 1-based source line."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UnsupportedError(ValueError):
    """Recognized but deliberately unsupported MPS feature."""

    def __init__(self, feature: str):
        self.feature = feature
        super().__init__(f"unsupported: {feature}")


class SchemaError(ValueError):
    """JSON input that parses but does not match the problem schema."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}")


# ---------------------------------------------------------------------------
# MPS
# ---------------------------------------------------------------------------

_SECTIONS = {"NAME", "OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "RANGES", "SOS", "ENDATA"}
_ROW_KINDS = {"N", "L", "G", "E"}
_REL_OF = {"L": LE, "G": GE, "E": EQ}


def _num(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(lineno, f"expected a number, got {token!r}") from None


def parse_mps(text: str) -> IlpProblem:
    """Parse free-format pure-integer MPS into an IlpProblem."""
    name = ""
    sense = MINIMIZE
    objective_row: str | None = None
    free_rows: set[str] = set()  # N rows beyond the first; ignored with their entries
    row_rel: dict[str, str] = {}
    row_order: list[str] = []
    row_coeffs: dict[str, dict[str, float]] = {}
    obj_coeffs: dict[str, float] = {}
    col_order: list[str] = []
    col_integral: dict[str, bool] = {}
    rhs: dict[str, float] = {}
    bounds: dict[str, dict[str, float]] = {}

    section = None
    in_integer_block = False
    expect_objsense_value = False

    for lineno, raw in enumerate(text.splitlines(), start=1):
        if raw.startswith("*"):
            continue
        tokens = raw.split()
        if not tokens:
            continue

        if expect_objsense_value:
            word = tokens[0].upper()
            if word in ("MAX", "MAXIMIZE"):
                sense = MAXIMIZE
            elif word in ("MIN", "MINIMIZE"):
                sense = MINIMIZE
            else:
                raise ParseError(lineno, f"bad OBJSENSE value {tokens[0]!r}")
            expect_objsense_value = False
            continue

        head = tokens[0].upper()
        if head in _SECTIONS and not raw[0].isspace():
            if head == "ENDATA":
                break
            if head in ("RANGES", "SOS"):
                raise UnsupportedError(head)
            section = head
            if head == "NAME":
                name = tokens[1] if len(tokens) > 1 else ""
            elif head == "OBJSENSE":
                if len(tokens) > 1:
                    word = tokens[1].upper()
                    if word in ("MAX", "MAXIMIZE"):
                        sense = MAXIMIZE
                    elif word in ("MIN", "MINIMIZE"):
                        sense = MINIMIZE
                    else:
                        raise ParseError(lineno, f"bad OBJSENSE value {tokens[1]!r}")
                else:
                    expect_objsense_value = True
            continue

        if section == "ROWS":
            if len(tokens) != 2:
                raise ParseError(lineno, "ROWS entries are 'kind name'")
            kind, rname = tokens[0].upper(), tokens[1]
            if kind not in _ROW_KINDS:
                raise ParseError(lineno, f"unknown row kind {tokens[0]!r}")
            if rname in row_rel or rname == objective_row or rname in free_rows:
                raise ParseError(lineno, f"duplicate row {rname!r}")
            if kind == "N":
                if objective_row is None:
                    objective_row = rname  # first N row is the objective
                else:
                    free_rows.add(rname)  # extra free rows are ignored entirely
                continue
            row_rel[rname] = _REL_OF[kind]
            row_order.append(rname)
            row_coeffs[rname] = {}

        elif section == "COLUMNS":
            if "'MARKER'" in tokens:
                if "'INTORG'" in tokens:
                    in_integer_block = True
                elif "'INTEND'" in tokens:
                    in_integer_block = False
                else:
                    raise ParseError(lineno, "marker line without INTORG/INTEND")
                continue
            if len(tokens) < 3 or len(tokens) % 2 == 0:
                raise ParseError(lineno, "COLUMNS entries are 'var row value [row value]'")
            var = tokens[0]
            if var not in col_integral:
                if not in_integer_block:
                    raise UnsupportedError(f"continuous variable {var!r}")
                col_order.append(var)
                col_integral[var] = True
            for k in range(1, len(tokens), 2):
                rname, value = tokens[k], _num(tokens[k + 1], lineno)
                if rname == objective_row:
                    obj_coeffs[var] = obj_coeffs.get(var, 0.0) + value
                elif rname in row_coeffs:
                    row_coeffs[rname][var] = row_coeffs[rname].get(var, 0.0) + value
                elif rname not in free_rows:
                    raise ParseError(lineno, f"unknown row {rname!r}")

        elif section == "RHS":
            pairs = tokens[1:] if len(tokens) % 2 == 1 else tokens
            for k in range(0, len(pairs), 2):
                rname, value = pairs[k], _num(pairs[k + 1], lineno)
                if rname == objective_row or rname in free_rows:
                    continue  # objective/free-row constants are ignored by convention
                if rname not in row_coeffs:
                    raise ParseError(lineno, f"unknown row {rname!r}")
                rhs[rname] = value

        elif section == "BOUNDS":
            btype = tokens[0].upper()
            if btype == "BV":
                if len(tokens) == 3:
                    var = tokens[2]
                elif len(tokens) == 2:
                    var = tokens[1]
                else:
                    raise ParseError(lineno, "BV entries are 'BV set var'")
                value = 0.0
            elif btype in ("UP", "LO", "FX"):
                if len(tokens) == 4:
                    var, value = tokens[2], _num(tokens[3], lineno)
                elif len(tokens) == 3:
                    var, value = tokens[1], _num(tokens[2], lineno)
                else:
                    raise ParseError(lineno, f"{btype} entries are '{btype} set var value'")
            else:
                raise UnsupportedError(f"bound type {btype}")
            if var not in col_integral:
                raise ParseError(lineno, f"unknown variable {var!r}")
            bounds.setdefault(var, {})[btype] = value

        elif section is None:
            raise ParseError(lineno, f"data before any section: {raw.strip()!r}")
        # NAME/OBJSENSE continuation lines fall through (nothing to consume)

    if objective_row is None:
        # A pure feasibility file; tolerated with an empty objective.
        obj_coeffs = {}

    variables = []
    for var in col_order:
        b = bounds.get(var, {})
        if "BV" in b:
            variables.append(Variable.binary(var))
            continue
        if "FX" in b:
            lo = hi = b["FX"]
        else:
            lo = b.get("LO", 0.0)
            hi = b.get("UP", math.inf)
        if not float(lo).is_integer() or (math.isfinite(hi) and not float(hi).is_integer()):
            raise UnsupportedError(f"fractional bounds on integer variable {var!r}")
        if lo < 0:
            raise UnsupportedError(f"negative lower bound on integer variable {var!r}")
        if not math.isfinite(hi):
            raise UnsupportedError(f"unbounded integer variable {var!r}")
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise ParseError(0, f"variable {var!r} has upper bound below lower bound")
        if lo_i == 0 and hi_i == 1:
            variables.append(Variable.binary(var))
        else:
            variables.append(Variable.integer(var, lo_i, hi_i))

    rows = tuple(
        Row(rname, dict(row_coeffs[rname]), row_rel[rname], rhs.get(rname, 0.0))
        for rname in row_order
    )
    return IlpProblem(name, tuple(variables), rows, dict(obj_coeffs), 0.0, sense)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def _tidy(x: float):
    return int(x) if isinstance(x, float) and x.is_integer() else x


def write_json(problem: IlpProblem) -> str:
    """Serialize with canonical field order; deterministic byte-for-byte."""
    doc = {
        "name": problem.name,
        "variables": [
            {"name": v.name, "kind": v.kind}
            if v.kind == BINARY
            else {"name": v.name, "kind": v.kind, "lower": v.lower, "upper": v.upper}
            for v in problem.variables
        ],
        "rows": [
            {
                "name": r.name,
                "coeffs": {k: _tidy(v) for k, v in r.coeffs.items()},
                "relation": r.relation,
                "rhs": _tidy(r.rhs),
            }
            for r in problem.rows
        ],
        "objective": {
            "coeffs": {k: _tidy(v) for k, v in problem.objective.items()},
            "offset": _tidy(problem.offset),
        },
        "sense": problem.sense,
    }
    return json.dumps(doc, indent=2) + "\n"


def _expect(obj, path: str, kind) -> None:
    if not isinstance(obj, kind):
        raise SchemaError(path, f"expected {kind.__name__}, got {type(obj).__name__}")


def _number(obj, path: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise SchemaError(path, f"expected a number, got {type(obj).__name__}")
    return float(obj)


def parse_json(text: str) -> IlpProblem:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.msg) from None
    _expect(doc, "$", dict)
    name = doc.get("name", "")
    _expect(name, "name", str)

    variables = []
    raw_vars = doc.get("variables", [])
    _expect(raw_vars, "variables", list)
    for i, rv in enumerate(raw_vars):
        path = f"variables[{i}]"
        _expect(rv, path, dict)
        vname = rv.get("name")
        _expect(vname, f"{path}.name", str)
        kind = rv.get("kind", BINARY)
        if kind == BINARY:
            variables.append(Variable.binary(vname))
        elif kind == INTEGER:
            lo = _number(rv.get("lower", 0), f"{path}.lower")
            hi = _number(rv.get("upper"), f"{path}.upper") if rv.get("upper") is not None else None
            if hi is None:
                raise SchemaError(f"{path}.upper", "missing")
            if not lo.is_integer() or not hi.is_integer():
                raise SchemaError(f"{path}.lower", "integer bounds required")
            variables.append(Variable.integer(vname, int(lo), int(hi)))
        else:
            raise SchemaError(f"{path}.kind", f"unknown kind {kind!r}")

    rows = []
    raw_rows = doc.get("rows", [])
    _expect(raw_rows, "rows", list)
    for i, rr in enumerate(raw_rows):
        path = f"rows[{i}]"
        _expect(rr, path, dict)
        rname = rr.get("name", f"r{i}")
        _expect(rname, f"{path}.name", str)
        coeffs = rr.get("coeffs", {})
        _expect(coeffs, f"{path}.coeffs", dict)
        parsed = {k: _number(v, f"{path}.coeffs.{k}") for k, v in coeffs.items()}
        relation = rr.get("relation")
        if relation not in (LE, GE, EQ):
            raise SchemaError(f"{path}.relation", f"expected one of <=, >=, =, got {relation!r}")
        rhs_value = _number(rr.get("rhs"), f"{path}.rhs") if rr.get("rhs") is not None else None
        if rhs_value is None:
            raise SchemaError(f"{path}.rhs", "missing")
        rows.append(Row(rname, parsed, relation, rhs_value))

    raw_obj = doc.get("objective", {"coeffs": {}, "offset": 0})
    _expect(raw_obj, "objective", dict)
    obj_coeffs = raw_obj.get("coeffs", {})
    _expect(obj_coeffs, "objective.coeffs", dict)
    objective = {k: _number(v, f"objective.coeffs.{k}") for k, v in obj_coeffs.items()}
    offset = _number(raw_obj.get("offset", 0), "objective.offset")

    sense = doc.get("sense", MINIMIZE)
    if sense not in (MINIMIZE, MAXIMIZE):
        raise SchemaError("sense", f"expected 'min' or 'max', got {sense!r}")

    return IlpProblem(name, tuple(variables), tuple(rows), objective, offset, sense)


def write_solution(values: dict[str, int], objective: float) -> str:
    return json.dumps({"assignment": values, "objective": _tidy(float(objective))}, indent=2) + "\n"


def parse_solution(text: str) -> tuple[dict[str, int], float | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.msg) from None
    _expect(doc, "$", dict)
    raw = doc.get("assignment")
    _expect(raw, "assignment", dict)
    values = {}
    for k, v in raw.items():
        x = _number(v, f"assignment.{k}")
        if not x.is_integer():
            raise SchemaError(f"assignment.{k}", "integer value required")
        values[k] = int(x)
    obj = doc.get("objective")
    return values, (None if obj is None else _number(obj, "objective"))


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

PLANTED = "planted-random"
SET_COVER = "set-cover"
KNAPSACK = "knapsack"


@dataclass(frozen=True)
class GenSpec:
    kind: str
    n: int
    m: int
    density: float = 0.3
    coeff_lo: int = 1
    coeff_hi: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (PLANTED, SET_COVER, KNAPSACK):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.n < 1 or self.m < 0:
            raise ValueError("need n >= 1 and m >= 0")
        if not (0 < self.density <= 1) or self.density * self.n < 1:
            raise ValueError("density must be in (0, 1] with density*n >= 1")
        if self.coeff_hi < self.coeff_lo:
            raise ValueError("empty coefficient range")


def generate(spec: GenSpec) -> tuple[IlpProblem, dict[str, int] | None]:
    """Deterministic instance from spec; planted-random also returns the
    planted feasible assignment."""
    rng = np.random.default_rng(spec.seed)
    names = [f"x{j}" for j in range(spec.n)]
    variables = tuple(Variable.binary(nm) for nm in names)
    deg = max(1, round(spec.density * spec.n))

    if spec.kind == PLANTED:
        planted = rng.integers(0, 2, size=spec.n)
        rows = []
        for i in range(spec.m):
            support = np.sort(rng.choice(spec.n, size=deg, replace=False))
            coeffs = rng.integers(spec.coeff_lo, spec.coeff_hi + 1, size=deg)
            lhs = int(np.dot(coeffs, planted[support]))
            slack = int(rng.integers(0, 4))
            rows.append(
                Row(f"c{i}", {names[j]: int(c) for j, c in zip(support, coeffs)}, LE, lhs + slack)
            )
        problem = IlpProblem(
            f"planted-n{spec.n}-m{spec.m}-s{spec.seed}", variables, tuple(rows), {}, 0.0, MINIMIZE
        )
        witness = {names[j]: int(planted[j]) for j in range(spec.n)}
        return problem, witness

    if spec.kind == SET_COVER:
        # n sets over m elements; every element covered by >= 1 chosen set.
        covers: list[set[int]] = [set() for _ in range(spec.m)]
        for j in range(spec.n):
            for e in rng.choice(spec.m, size=min(spec.m, deg), replace=False) if spec.m else []:
                covers[e].add(j)
        for e in range(spec.m):
            if not covers[e]:
                covers[e].add(int(rng.integers(0, spec.n)))
        costs = rng.integers(max(1, abs(spec.coeff_lo)), abs(spec.coeff_hi) + 1, size=spec.n)
        rows = tuple(
            Row(f"cover{e}", {names[j]: 1 for j in sorted(covers[e])}, GE, 1)
            for e in range(spec.m)
        )
        objective = {names[j]: int(costs[j]) for j in range(spec.n)}
        problem = IlpProblem(
            f"setcover-n{spec.n}-m{spec.m}-s{spec.seed}", variables, rows, objective, 0.0, MINIMIZE
        )
        return problem, None

    # Multi-dimensional knapsack: m weight rows, maximize value.
    weights = rng.integers(max(1, abs(spec.coeff_lo)), abs(spec.coeff_hi) + 1, size=(spec.m, spec.n))
    values = rng.integers(max(1, abs(spec.coeff_lo)), abs(spec.coeff_hi) + 1, size=spec.n)
    rows = tuple(
        Row(
            f"cap{i}",
            {names[j]: int(weights[i, j]) for j in range(spec.n)},
            LE,
            int(weights[i].sum()) // 2,
        )
        for i in range(spec.m)
    )
    objective = {names[j]: int(values[j]) for j in range(spec.n)}
    problem = IlpProblem(
        f"knapsack-n{spec.n}-m{spec.m}-s{spec.seed}", variables, rows, objective, 0.0, MAXIMIZE
    )
    return problem, None


def generate_validated(spec: GenSpec) -> tuple[IlpProblem, dict[str, int] | None]:
    problem, witness = generate(spec)
    defects = validate(problem)
    assert not defects, f"generator produced defects: {defects}"
    return problem, witness
