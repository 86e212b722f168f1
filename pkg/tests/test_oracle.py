"""Reference solver correctness: enumeration, branch-and-bound, agreement."""

import numpy as np
import pytest

from soac import ingest, model
from soac.model import LE, IlpProblem, Row, Variable, canonicalize
from soac.oracle import INFEASIBLE, OPTIMAL, TooLargeError, branch_and_bound, enumerate_optimum


def canon(rows, n_vars, objective=None, offset=0.0, sense="min"):
    variables = tuple(Variable.binary(f"x{j + 1}") for j in range(n_vars))
    return canonicalize(IlpProblem("t", variables, tuple(rows), objective or {}, offset, sense))


def random_cp(rng, n_max=10, kinds=("planted-random", "set-cover", "knapsack")):
    kind = kinds[int(rng.integers(0, len(kinds)))]
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, 8))
    spec = ingest.GenSpec(
        kind, n=n, m=m, density=0.5, coeff_lo=1, coeff_hi=5, seed=int(rng.integers(0, 2**62))
    )
    p, _ = ingest.generate(spec)
    return model.canonicalize(p)


class TestEnumerate:
    def test_single_variable(self):
        cp = canon([Row("r", {"x1": 1}, LE, 0)], 1, {"x1": -1})
        res = enumerate_optimum(cp)
        assert res.status == OPTIMAL and res.value == 0 and res.witness == (0,)

    def test_infeasible_pair(self):
        cp = canon(
            [Row("a", {"x1": 1, "x2": 1}, LE, 1), Row("b", {"x1": -1, "x2": -1}, LE, -2)], 2
        )
        assert enumerate_optimum(cp).status == INFEASIBLE

    def test_empty_problem_offset(self):
        cp = canon([], 0, offset=7)
        res = enumerate_optimum(cp)
        assert res.status == OPTIMAL and res.value == 7 and res.witness == ()

    def test_guard(self):
        cp = canon([], 25)
        with pytest.raises(TooLargeError):
            enumerate_optimum(cp)

    def test_lexicographic_witness(self):
        # two optima (1,0) and (0,1); lexicographically smaller is (0,1)
        cp = canon(
            [Row("r", {"x1": 1, "x2": 1}, LE, 1)], 2, {"x1": -1, "x2": -1}
        )
        res = enumerate_optimum(cp)
        assert res.value == -1 and res.witness == (0, 1)


class TestBranchAndBound:
    def test_no_rows_all_positive(self):
        cp = canon([], 4, {f"x{j + 1}": j + 1 for j in range(4)}, offset=2)
        res = branch_and_bound(cp)
        assert res.value == 2 and res.witness == (0, 0, 0, 0)

    def test_guard(self):
        cp = canon([], 35)
        with pytest.raises(TooLargeError):
            branch_and_bound(cp)

    def test_planted_n30_terminates(self):
        spec = ingest.GenSpec("planted-random", n=30, m=20, density=0.2, seed=9)
        p, _ = ingest.generate(spec)
        cp = model.canonicalize(p)
        res = branch_and_bound(cp)
        assert res.status == OPTIMAL
        assert model.check_feasible(cp, res.witness).feasible

    def test_agreement_with_enumeration(self):
        rng = np.random.default_rng(17)
        for _ in range(500):
            cp = random_cp(rng, n_max=9)
            a = enumerate_optimum(cp)
            b = branch_and_bound(cp)
            assert a.status == b.status
            if a.status == OPTIMAL:
                assert a.value == b.value
                assert model.check_feasible(cp, b.witness).feasible
                assert model.objective_value(cp, b.witness) == b.value

    def test_agreement_larger(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            cp = random_cp(rng, n_max=16)
            a = enumerate_optimum(cp)
            b = branch_and_bound(cp)
            assert a.status == b.status
            if a.status == OPTIMAL:
                assert a.value == b.value

    def test_witness_validity_random(self):
        rng = np.random.default_rng(29)
        for _ in range(100):
            cp = random_cp(rng)
            res = branch_and_bound(cp)
            if res.status == OPTIMAL:
                assert model.check_feasible(cp, res.witness).feasible
