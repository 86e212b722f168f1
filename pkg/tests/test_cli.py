"""Command-line interface: exit codes, flags, pipelines, CSV contracts."""

import json

from soac import ingest, model
from soac.cli import BENCH_HEADER, main


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def make_instance(tmp_path, kind="planted-random", name="inst.json", **kw):
    spec = ingest.GenSpec(kind, **kw)
    problem, witness = ingest.generate(spec)
    path = write(tmp_path, name, ingest.write_json(problem))
    return path, problem, witness


TRIVIAL_INFEASIBLE = """\
{
  "name": "bad",
  "variables": [{"name": "x", "kind": "binary"}],
  "rows": [{"name": "r", "coeffs": {"x": 1}, "relation": "<=", "rhs": -1}],
  "objective": {"coeffs": {}, "offset": 0},
  "sense": "min"
}
"""


class TestSolve:
    def test_solve_feasible_json_report(self, tmp_path, capsys):
        path, problem, _ = make_instance(tmp_path, n=8, m=5, seed=3)
        code = main(["solve", path, "--seed", "1", "--restarts", "8",
                     "--max-steps", "20000", "--json"])
        out = capsys.readouterr().out
        assert code == 0
        doc = json.loads(out)
        assert doc["best"] is not None
        ok, _, _ = model.evaluate_original(problem, doc["best"]["assignment"])
        assert ok

    def test_trivially_infeasible_exit_2(self, tmp_path, capsys):
        path = write(tmp_path, "bad.json", TRIVIAL_INFEASIBLE)
        assert main(["solve", path]) == 2

    def test_param_echo(self, tmp_path, capsys):
        path, _, _ = make_instance(tmp_path, n=4, m=2, seed=1)
        code = main(["solve", path, "--param", "dt=0.05", "--max-steps", "2000"])
        out = capsys.readouterr().out
        assert code == 0
        assert "dt=0.05" in out

    def test_unknown_param_exit_3(self, tmp_path, capsys):
        path, _, _ = make_instance(tmp_path, n=4, m=2, seed=1)
        assert main(["solve", path, "--param", "bogus=1"]) == 3
        assert "bogus" in capsys.readouterr().err

    def test_parse_error_exit_3_with_location(self, tmp_path, capsys):
        path = write(tmp_path, "broken.mps", "NAME X\nROWS\n Q weird\nENDATA\n")
        assert main(["solve", path]) == 3
        err = capsys.readouterr().err
        assert f"{path}:3:" in err
        assert err.count("\n") == 1  # single-line diagnostic

    def test_trace_file(self, tmp_path):
        path, _, _ = make_instance(tmp_path, n=5, m=3, seed=2)
        trace = tmp_path / "trace.csv"
        code = main(["solve", path, "--max-steps", "50", "--trace", str(trace)])
        assert code == 0
        lines = trace.read_text().splitlines()
        assert lines[0] == "step,t,max_violation,violated_rows"
        assert len(lines) >= 2

    def test_trace_full_voltages(self, tmp_path):
        path, _, _ = make_instance(tmp_path, n=3, m=2, seed=2, density=1.0)
        trace = tmp_path / "trace.csv"
        main(["solve", path, "--max-steps", "20", "--trace", str(trace), "--trace-full"])
        header = trace.read_text().splitlines()[0]
        assert header.endswith("v0,v1,v2")

    def test_mps_input(self, tmp_path):
        mps = """\
NAME T
ROWS
 N obj
 G r
COLUMNS
    M 'MARKER' 'INTORG'
    x obj 1 r 1
    M 'MARKER' 'INTEND'
RHS
    s r 1
BOUNDS
 BV B x
ENDATA
"""
        path = write(tmp_path, "t.mps", mps)
        assert main(["solve", path, "--max-steps", "500"]) == 0


class TestCheck:
    def test_witness_accepted(self, tmp_path, capsys):
        path, problem, witness = make_instance(tmp_path, n=7, m=5, seed=9)
        _, obj, _ = model.evaluate_original(problem, witness)
        sol = write(tmp_path, "sol.json", ingest.write_solution(witness, obj))
        assert main(["check", path, sol]) == 0
        assert "feasible" in capsys.readouterr().out

    def test_tampered_rejected_with_row_name(self, tmp_path, capsys):
        path, problem, witness = make_instance(tmp_path, n=7, m=5, seed=9)
        # make some row tight, then break it by flipping a zero bit to one
        tampered = None
        for name in witness:
            cand = dict(witness)
            cand[name] = 1 - cand[name]
            ok, _, violated = model.evaluate_original(problem, cand)
            if not ok:
                tampered = (cand, violated)
                break
        assert tampered is not None
        cand, violated = tampered
        sol = write(tmp_path, "sol.json", ingest.write_solution(cand, 0))
        assert main(["check", path, sol]) == 2
        out = capsys.readouterr().out
        assert violated[0] in out

    def test_missing_variable_exit_3(self, tmp_path, capsys):
        path, problem, witness = make_instance(tmp_path, n=5, m=3, seed=4)
        partial = dict(list(witness.items())[:-1])
        sol = write(tmp_path, "sol.json", ingest.write_solution(partial, 0))
        assert main(["check", path, sol]) == 3


class TestGen:
    def test_gen_writes_instance_and_witness(self, tmp_path, capsys):
        out = tmp_path / "g.json"
        code = main(["gen", "planted-random", "--n", "6", "--m", "4",
                     "--seed", "5", "--out", str(out)])
        assert code == 0
        problem = ingest.parse_json(out.read_text())
        assert model.validate(problem) == []
        witness_file = tmp_path / "g.witness.json"
        values, _ = ingest.parse_solution(witness_file.read_text())
        ok, _, _ = model.evaluate_original(problem, values)
        assert ok

    def test_gen_then_check_pipeline(self, tmp_path):
        out = tmp_path / "g.json"
        main(["gen", "planted-random", "--n", "6", "--m", "4", "--seed", "5",
              "--out", str(out)])
        assert main(["check", str(out), str(tmp_path / "g.witness.json")]) == 0

    def test_gen_bad_spec_exit_3(self, tmp_path):
        assert main(["gen", "planted-random", "--n", "0", "--m", "1",
                     "--out", str(tmp_path / "x.json")]) == 3


class TestOracleCmd:
    def test_optimum(self, tmp_path, capsys):
        path, _, _ = make_instance(tmp_path, kind="knapsack", n=6, m=1, seed=8)
        assert main(["oracle", path]) == 0
        out = capsys.readouterr().out
        assert out.startswith("optimum ")

    def test_methods_agree(self, tmp_path, capsys):
        path, _, _ = make_instance(tmp_path, kind="set-cover", n=7, m=5, seed=8)
        main(["oracle", path, "--method", "enum"])
        a = capsys.readouterr().out.splitlines()[0]
        main(["oracle", path, "--method", "bnb"])
        b = capsys.readouterr().out.splitlines()[0]
        assert a == b

    def test_infeasible_exit_2(self, tmp_path, capsys):
        path = write(tmp_path, "bad.json", TRIVIAL_INFEASIBLE)
        assert main(["oracle", path]) == 2
        assert "infeasible" in capsys.readouterr().out


class TestBench:
    def test_directory_csv(self, tmp_path, capsys):
        d = tmp_path / "instances"
        d.mkdir()
        for k in range(3):
            spec = ingest.GenSpec("knapsack", n=6, m=1, seed=k)
            problem, _ = ingest.generate(spec)
            (d / f"i{k}.json").write_text(ingest.write_json(problem))
        code = main(["bench", str(d), "--with-oracle", "--max-steps", "3000",
                     "--total-max-steps", "30000"])
        out = capsys.readouterr().out
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == BENCH_HEADER
        assert len(lines) == 4
        for line in lines[1:]:
            cols = line.split(",")
            best, oracle_opt = cols[5], cols[6]
            if best and oracle_opt not in ("", "infeasible"):
                # maximization instances: reported best never exceeds optimum
                assert float(best) <= float(oracle_opt) + 1e-9

    def test_empty_dir_header_only(self, tmp_path, capsys):
        d = tmp_path / "empty"
        d.mkdir()
        assert main(["bench", str(d)]) == 0
        assert capsys.readouterr().out.strip() == BENCH_HEADER

    def test_missing_dir_exit_3(self, tmp_path):
        assert main(["bench", str(tmp_path / "nope")]) == 3


class TestPipelines:
    def test_solve_json_to_check(self, tmp_path, capsys):
        path, _, _ = make_instance(tmp_path, n=8, m=6, seed=13)
        code = main(["solve", path, "--json", "--restarts", "8", "--max-steps", "20000"])
        doc = json.loads(capsys.readouterr().out)
        assert code == 0 and doc["best"]
        sol = write(
            tmp_path, "sol.json",
            ingest.write_solution(doc["best"]["assignment"], doc["best"]["objective"]),
        )
        assert main(["check", path, sol]) == 0
