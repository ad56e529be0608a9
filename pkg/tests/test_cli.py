import csv
import io
import json

import pytest

from stoplab import cli


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert cli.parse_range("3") == [3]
    assert cli.parse_range("1..4") == [1, 2, 3, 4]
    assert cli.parse_range("0.1..0.3", step=0.1, integer=False) == pytest.approx([0.1, 0.2, 0.3])


def test_cutoffs_csv():
    code, out, _ = call("cutoffs", "--k", "11")
    assert code == 0
    table = rows(out)
    assert list(table[0]) == ["k", "delta_k"]
    assert len(table) == 11
    assert float(table[0]["delta_k"]) == pytest.approx(1.35313, abs=1e-5)
    assert "\r" not in out


def test_matrix_shape():
    code, out, _ = call("matrix")
    table = rows(out)
    assert code == 0 and len(table) == 9
    assert list(table[0])[:2] == ["N", "n=1"] and len(table[0]) == 11
    assert float(table[0]["n=1"]) == 0.5


def test_values_bounds():
    table = rows(call("values", "--n", "1..5")[1])
    for r in table:
        assert float(r["lower_bound"]) <= float(r["V_n"]) < float(r["upper_bound"])


def test_curve_and_steps():
    table = rows(call("curve", "--which", "u,w,h", "--T", "0.3..0.5", "--step", "0.1")[1])
    assert [float(r["T"]) for r in table] == pytest.approx([0.3, 0.4, 0.5])
    steps = rows(call("curve", "--which", "steps", "--k", "4")[1])
    assert [int(r["level"]) for r in steps] == [2, 3, 4, 5]


def test_simulate_reports_reference():
    code, out, _ = call("simulate", "--strategy", "cutoff", "--T", "1", "--reps", "20000")
    (r,) = rows(out)
    assert code == 0
    assert abs(float(r["mean"]) - float(r["reference"])) < 5 * float(r["stderr"])


@pytest.mark.parametrize("strategy", ["beta", "discrete", "lindley"])
def test_simulate_strategies_run(strategy):
    code, out, _ = call("simulate", "--strategy", strategy, "--reps", "5000", "--n", "20")
    assert code == 0 and rows(out)


def test_lindley_rows():
    table = rows(call("lindley", "--n", "1..3", "--rule", "delta")[1])
    assert [float(r["R_n"]) for r in table] == pytest.approx([1, 1.5, 5 / 3])
    assert all(float(r["delta_rule_loss"]) >= float(r["R_n"]) for r in table)


def test_json_output():
    code, out, _ = call("cutoffs", "--k", "2", "--format", "json")
    data = json.loads(out)
    assert code == 0 and [d["k"] for d in data] == [1, 2]


def test_output_file(tmp_path):
    path = tmp_path / "c.csv"
    code, out, _ = call("cutoffs", "--k", "3", "--output", str(path))
    assert code == 0 and out == ""
    assert path.read_text() == call("cutoffs", "--k", "3")[1]


def test_domain_error_exit_code():
    code, out, err = call("values", "--n", "0")
    assert code == 1 and out == "" and "positive" in err


def test_usage_error_exit_code():
    assert call("bogus")[0] == 2
    assert call("simulate", "--strategy", "nope")[0] == 2


def test_repeat_runs_are_identical():
    argv = ("simulate", "--strategy", "beta", "--reps", "70000", "--seed", "11")
    assert call(*argv)[1] == call(*argv)[1]
    assert call(*argv)[1] != call(*argv[:-1], "12")[1]


def test_verify_fast_runs():
    code, out, _ = call("verify", "--suite", "fast")
    assert "criterion" in out.splitlines()[0]
    assert code in (0, 1)
