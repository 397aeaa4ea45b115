import json

import pytest

from riesz_hermite import cli
from riesz_hermite.suites import SUITES, SuiteConfig


def _run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def _strip_time(text):
    data = json.loads(text)
    data.pop("timestamp")
    return json.dumps(data, sort_keys=True)


def test_list_text(capsys):
    code, out, _ = _run(["list"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == len(SUITES)
    five = next(line for line in lines if line.startswith("five-term"))
    assert "Prop 3.7" in five


def test_list_json_schema(capsys):
    code, out, _ = _run(["list", "--json"], capsys)
    assert code == 0
    cat = json.loads(out)
    assert cat["schema"] == 1
    assert [s["name"] for s in cat["suites"]] == list(SUITES)
    assert len(cat["suites"]) == 9
    for s in cat["suites"]:
        assert set(s) == {"name", "description", "paper_anchor"}
        assert s["paper_anchor"] and s["description"]
    assert {s["name"]: s["paper_anchor"] for s in cat["suites"]}["five-term"] == "Prop 3.7"


def test_anchor_longest_prefix():
    assert cli.anchor_for("prop31.d1.5_lambda_printed") == "Prop 3.1 item (5)"
    assert cli.anchor_for("prop31.d1.1a_zbar_grad") == "Prop 3.1"
    assert cli.anchor_for("kernels.semigroup.mehler.d1") == "Sec 2.1"
    assert cli.anchor_for("norm-ratios.ineq_B.p2.0.bounded") == "Eq 2.12"


@pytest.mark.parametrize("argv", [["run", "nonexistent"], ["frobnicate"], [], ["run"]])
def test_usage_errors_exit_2(argv, capsys):
    code, _, _ = _run(argv, capsys)
    assert code == 2


def test_help_exits_0(capsys):
    code, out, _ = _run(["--help"], capsys)
    assert code == 0 and "run" in out


@pytest.mark.parametrize("flags", [["--tol", "-1"], ["--dim", "7"], ["--p", "0.5"], ["--format", "xml"], ["--seed", "abc"], ["--trials", "0"]])
def test_bad_values_exit_3(flags, capsys):
    code, _, err = _run(["run", "kernels", *flags], capsys)
    assert code == 3 and "config error" in err


def test_config_file_errors(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("seed = 3\nbogus_key = 1\n")
    code, _, err = _run(["run", "kernels", "--config", str(bad)], capsys)
    assert code == 3 and "bogus_key" in err
    code, _, _ = _run(["run", "kernels", "--config", str(tmp_path / "missing.cfg")], capsys)
    assert code == 3
    nokey = tmp_path / "nokey.cfg"
    nokey.write_text("just words\n")
    assert _run(["run", "kernels", "--config", str(nokey)], capsys)[0] == 3


def test_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\ntol = 1e-3\nseed = 5  # trailing\ndim = 1\n")
    out = tmp_path / "r.json"
    code, _, _ = _run(["run", "kernels", "--config", str(cfg), "--tol", "1e-6", "--out", str(out)], capsys)
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["config"]["tol"] == 1e-6
    assert rep["config"]["seed"] == 5
    assert rep["config"]["dim"] == [1]
    assert all(c["tolerance"] in (1e-6,) for c in rep["checks"])


def test_report_round_trip_and_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert _run(["run", "kernels", "--seed", "3", "--out", str(a)], capsys)[0] == 0
    assert _run(["run", "kernels", "--seed", "3", "--out", str(b)], capsys)[0] == 0
    ta, tb = a.read_text(), b.read_text()
    assert _strip_time(ta) == _strip_time(tb)
    rep = cli.Report.from_json(ta)
    assert rep.to_json() + "\n" == ta
    data = json.loads(ta)
    assert data["schema"] == 1 and data["version"]
    assert data["calibrated_constants"]["schema"] == 1
    assert data["summary"]["failed"] == 0
    for c in data["checks"]:
        assert {"name", "residual", "tolerance", "pass", "detail", "paper_anchor"} <= set(c)


def test_csv_output(capsys):
    code, out, _ = _run(["run", "kernels", "--format", "csv", "--dim", "1"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# suite: kernels")
    header = next(i for i, line in enumerate(lines) if not line.startswith("#"))
    assert lines[header] == "name,paper_anchor,residual,tolerance,pass"
    assert all(line.endswith(",true") for line in lines[header + 1 :])


def test_failing_check_exits_1(capsys):
    code, out, err = _run(["run", "prop31", "--dim", "1", "--max-bidegree", "2"], capsys)
    assert code == 1
    rep = json.loads(out)
    assert rep["summary"]["failed_checks"] == ["prop31.d1.5_lambda_printed"]
    assert "FAIL prop31.d1.5_lambda_printed" in err


def test_suite_config_validation():
    with pytest.raises(KeyError):
        SuiteConfig("nope")
    with pytest.raises(ValueError):
        SuiteConfig("kernels", max_bidegree=9)
    cfg = SuiteConfig("kernels", dim=(1,), tol=1e-4)
    assert cfg.tolerance(1.0) == 1e-4 and cfg.dims((1, 2)) == (1,)
    assert cfg.echo()["suite"] == "kernels"
