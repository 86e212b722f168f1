"""Model invariants: validation, canonicalization, exact evaluation, decoding."""

import itertools
import math

import numpy as np
import pytest

from soac import model
from soac.model import (
    EQ,
    GE,
    LE,
    IlpProblem,
    Row,
    Variable,
    add_objective_bound,
    canonicalize,
    check_feasible,
    decode,
    evaluate_row,
    expansion_weights,
    objective_value,
    validate,
)


def problem(variables, rows, objective=None, offset=0.0, sense="min", name="t"):
    return IlpProblem(name, tuple(variables), tuple(rows), objective or {}, offset, sense)


def all_assignments(n):
    return itertools.product((0, 1), repeat=n)


class TestValidate:
    def test_well_formed_knapsack(self):
        p = problem(
            [Variable.binary("x1"), Variable.binary("x2")],
            [Row("cap", {"x1": 2, "x2": 3}, LE, 4)],
            {"x1": 3, "x2": 5},
            sense="max",
        )
        assert validate(p) == []

    def test_duplicate_name(self):
        p = problem([Variable.binary("x"), Variable.binary("x")], [])
        defects = validate(p)
        assert any("duplicate" in d.reason and "x" in d.entity for d in defects)

    def test_unknown_variable_in_row(self):
        p = problem([Variable.binary("x")], [Row("r", {"z": 1}, LE, 1)])
        defects = validate(p)
        assert any("unknown variable 'z'" in d.reason for d in defects)

    def test_unknown_variable_in_objective(self):
        p = problem([Variable.binary("x")], [], {"w": 1})
        assert any("'w'" in d.reason for d in validate(p))

    def test_non_finite(self):
        p = problem([Variable.binary("x")], [Row("r", {"x": math.inf}, LE, 1)])
        assert validate(p)
        p = problem([Variable.binary("x")], [Row("r", {"x": 1}, LE, math.nan)])
        assert validate(p)

    def test_bad_integer_bounds(self):
        p = problem([Variable.integer("x", 5, 2)], [])
        assert any("upper" in d.reason for d in validate(p))

    def test_span_guard(self):
        p = problem([Variable.integer("x", 0, 2**31)], [])
        assert any("guard" in d.reason for d in validate(p))


class TestExpansionWeights:
    def test_span_five(self):
        assert expansion_weights(5) == [1, 2, 2]

    def test_reachable_sets(self):
        # subset sums must cover {0..span} exactly (surjective, maybe not unique)
        for span in range(0, 40):
            w = expansion_weights(span)
            sums = {sum(c) for c in itertools.chain.from_iterable(
                itertools.combinations(w, k) for k in range(len(w) + 1))}
            assert sums == set(range(span + 1)), span
            assert sum(w) == span

    def test_weights_structure(self):
        assert expansion_weights(0) == []
        assert expansion_weights(1) == [1]
        assert expansion_weights(7) == [1, 2, 4]
        assert expansion_weights(10) == [1, 2, 4, 3]


class TestCanonicalize:
    def test_max_flip(self):
        p = problem([Variable.binary("x1")], [Row("r", {"x1": 1}, LE, 1)], {"x1": 1}, sense="max")
        cp = canonicalize(p)
        assert cp.flipped
        assert cp.objective == ((0, -1.0),)
        assert cp.offset == 0.0

    def test_equality_split(self):
        p = problem(
            [Variable.binary("x1"), Variable.binary("x2")],
            [Row("r", {"x1": 1, "x2": 1}, EQ, 1)],
        )
        cp = canonicalize(p)
        assert len(cp.rows) == 2
        le, ge = cp.rows
        assert le.coeffs == ((0, 1.0), (1, 1.0)) and le.rhs == 1
        assert ge.coeffs == ((0, -1.0), (1, -1.0)) and ge.rhs == -1
        # assignment satisfies = iff it satisfies both splits
        for a in all_assignments(2):
            orig_ok = a[0] + a[1] == 1
            split_ok = evaluate_row(le, a) <= 0 and evaluate_row(ge, a) <= 0
            assert orig_ok == split_ok

    def test_ge_negation(self):
        p = problem([Variable.binary("x1")], [Row("r", {"x1": 1}, GE, 1)])
        cp = canonicalize(p)
        assert cp.rows[0].coeffs == ((0, -1.0),) and cp.rows[0].rhs == -1

    def test_integer_expansion_folds_constants(self):
        p = problem(
            [Variable.integer("x", 2, 7)],
            [Row("r", {"x": 3}, LE, 20)],
            {"x": 2},
            offset=1.0,
        )
        cp = canonicalize(p)
        # x = 2 + y-bits; row: 3x <= 20 -> 3*bits <= 14; objective 2x+1 -> 2*bits + 5
        assert cp.rows[0].rhs == 14
        assert cp.offset == 5
        weights = [w for _, w in cp.var_map.entries[0].bits]
        assert weights == expansion_weights(5)

    def test_expansion_guard_raises(self):
        p = problem([Variable.integer("x", 0, 2**31)], [])
        with pytest.raises(model.ModelError):
            canonicalize(p)

    def test_invalid_problem_raises(self):
        p = problem([Variable.binary("x"), Variable.binary("x")], [])
        with pytest.raises(model.InvalidProblemError):
            canonicalize(p)

    def test_empty_row_vacuous_vs_infeasible(self):
        p = problem([Variable.binary("x")], [Row("ok", {}, LE, 0), Row("bad", {}, LE, -1)])
        cp = canonicalize(p)
        assert cp.trivial_infeasible_row == 1


class TestEvaluate:
    def test_examples(self):
        row = canonicalize(
            problem([Variable.binary("x1"), Variable.binary("x2")], [Row("r", {"x1": 1, "x2": 1}, LE, 1)])
        ).rows[0]
        assert evaluate_row(row, (1, 1)) == 1
        assert evaluate_row(row, (0, 0)) == -1

    def test_mixed_signs(self):
        row = canonicalize(
            problem([Variable.binary("x1"), Variable.binary("x2")], [Row("r", {"x1": 3, "x2": -2}, LE, 0)])
        ).rows[0]
        assert evaluate_row(row, (1, 1)) == 1

    def test_integer_exactness(self):
        # values large enough that naive float addition would round
        big = 2**53
        row = model.CanonicalRow("r", ((0, float(big)), (1, 1.0)), float(big), True)
        assert evaluate_row(row, (1, 1)) == 1.0

    def test_check_feasible_empty_rows(self):
        cp = canonicalize(problem([Variable.binary("x")], []))
        assert check_feasible(cp, (1,)).feasible

    def test_check_feasible_violation_amount(self):
        cp = canonicalize(problem([Variable.binary("x1")], [Row("r", {"x1": 1}, LE, 0)]))
        rep = check_feasible(cp, (1,))
        assert not rep.feasible
        assert rep.violations == ((0, 1.0),)

    def test_objective_examples(self):
        cp = canonicalize(problem([Variable.binary("x")], []))
        assert objective_value(cp, (0,)) == 0
        p = problem(
            [Variable.binary("x1"), Variable.binary("x2")], [], {"x1": -1, "x2": -1}
        )
        cp = canonicalize(p)
        assert objective_value(cp, (1, 1)) == -2


class TestDecode:
    def test_direct(self):
        cp = canonicalize(problem([Variable.binary("x1")], []))
        assert decode(cp.var_map, (1,)) == {"x1": 1}

    def test_expansion(self):
        cp = canonicalize(problem([Variable.integer("x", 0, 5)], []))
        # weights (1, 2, 2): y = (1, 0, 1) -> 3
        assert decode(cp.var_map, (1, 0, 1)) == {"x": 3}

    def test_fixed_variable(self):
        cp = canonicalize(problem([Variable.integer("x", 2, 2)], []))
        assert cp.n == 0
        assert decode(cp.var_map, ()) == {"x": 2}

    def test_decoded_within_bounds_exhaustive(self):
        p = problem(
            [Variable.integer("x", -3, 4), Variable.binary("y"), Variable.integer("z", 1, 6)],
            [],
        )
        cp = canonicalize(p)
        assert cp.n <= 12
        for a in all_assignments(cp.n):
            values = decode(cp.var_map, a)
            assert -3 <= values["x"] <= 4
            assert values["y"] in (0, 1)
            assert 1 <= values["z"] <= 6


class TestObjectiveBound:
    def test_sentinel_no_row(self):
        cp = canonicalize(problem([Variable.binary("x")], [], {"x": 1}))
        assert add_objective_bound(cp, model.NO_BOUND) is cp

    def test_bound_forces_assignment(self):
        p = problem(
            [Variable.binary("x1"), Variable.binary("x2")], [], {"x1": -1, "x2": -1}
        )
        cp = add_objective_bound(canonicalize(p), -2)
        feasible = [a for a in all_assignments(2) if check_feasible(cp, a).feasible]
        assert feasible == [(1, 1)]

    def test_bound_below_floor_infeasible(self):
        p = problem(
            [Variable.binary("x1"), Variable.binary("x2"), Variable.binary("x3")],
            [],
            {"x1": -1, "x2": -1, "x3": 2},
        )
        cp = add_objective_bound(canonicalize(p), -3)  # floor is -2
        assert not any(check_feasible(cp, a).feasible for a in all_assignments(3))


class TestCanonicalizationSoundness:
    """Original and canonical feasible sets correspond through decode."""

    def _original_feasible(self, p, values):
        ok, obj, _ = model.evaluate_original(p, values)
        return ok, obj

    @pytest.mark.parametrize("seed", range(20))
    def test_random_problems(self, seed):
        rng = np.random.default_rng(seed)
        n_vars = int(rng.integers(1, 4))
        variables = []
        for i in range(n_vars):
            if rng.random() < 0.5:
                variables.append(Variable.binary(f"v{i}"))
            else:
                lo = int(rng.integers(-3, 3))
                variables.append(Variable.integer(f"v{i}", lo, lo + int(rng.integers(0, 5))))
        rows = []
        for r in range(int(rng.integers(0, 4))):
            coeffs = {
                v.name: int(rng.integers(-3, 4))
                for v in variables
                if rng.random() < 0.8
            }
            rel = (LE, GE, EQ)[int(rng.integers(0, 3))]
            rows.append(Row(f"r{r}", coeffs, rel, int(rng.integers(-5, 10))))
        objective = {v.name: int(rng.integers(-3, 4)) for v in variables}
        sense = "max" if rng.random() < 0.5 else "min"
        p = problem(variables, rows, objective, offset=int(rng.integers(-2, 3)), sense=sense)
        cp = canonicalize(p)
        if cp.n > 12:
            pytest.skip("expansion larger than exhaustive budget")

        # every canonical-feasible assignment decodes to an original-feasible one
        # with exactly matching objective; decode covers the original feasible set
        decoded_feasible = set()
        for a in all_assignments(cp.n):
            values = decode(cp.var_map, a)
            ok, obj = self._original_feasible(p, values)
            if check_feasible(cp, a).feasible:
                assert ok
                z = objective_value(cp, a)
                assert model.original_objective_value(cp, z) == obj
                decoded_feasible.add(tuple(sorted(values.items())))

        original_feasible = set()
        domains = [
            (0, 1) if v.kind == model.BINARY else range(v.lower, v.upper + 1)
            for v in variables
        ]
        for combo in itertools.product(*domains):
            values = {v.name: x for v, x in zip(variables, combo)}
            ok, _ = self._original_feasible(p, values)
            if ok:
                original_feasible.add(tuple(sorted(values.items())))
        assert decoded_feasible == original_feasible
