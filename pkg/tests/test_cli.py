import json

import pytest
from click.testing import CliRunner

from thetacert.cli import main
from thetacert.exppoly import ExpPoly, builtin_case


@pytest.fixture
def runner():
    return CliRunner()


def test_certify_s1(runner, tmp_path):
    src = tmp_path / "s1.json"
    src.write_text(builtin_case("S1").dumps())
    out = tmp_path / "cert.json"
    res = runner.invoke(main, ["certify", "--input", str(src), "--out", str(out)])
    assert res.exit_code == 0, res.output
    cert = json.loads(out.read_text())
    assert cert["verdict"] == "certified" and cert["mu"] == 23
    assert list(cert)[:6] == ["order", "degrees", "mu", "lambda", "stages", "verdict"]


def test_certify_inconclusive(runner, tmp_path):
    src = tmp_path / "neg.json"
    src.write_text(ExpPoly([[-1]]).dumps())
    res = runner.invoke(main, ["certify", "--input", str(src)])
    assert res.exit_code == 2


@pytest.mark.parametrize(
    "text", ['{"parts": [["1", ', '{"parts": [["a"]]}', "[]", '{"parts": []}']
)
def test_certify_input_errors(runner, tmp_path, text):
    src = tmp_path / "bad.json"
    src.write_text(text)
    res = runner.invoke(main, ["certify", "--input", str(src)])
    assert res.exit_code == 1
    assert " at " in res.output


def test_certify_missing_file(runner, tmp_path):
    res = runner.invoke(main, ["certify", "--input", str(tmp_path / "nope.json")])
    assert res.exit_code == 1


def test_certify_output_is_deterministic(runner, tmp_path):
    src = tmp_path / "s3.json"
    src.write_text(builtin_case("S3").dumps())
    outs = []
    for name in ("a.json", "b.json"):
        runner.invoke(main, ["certify", "--input", str(src), "--out", str(tmp_path / name)])
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_cases(runner, tmp_path):
    out = tmp_path / "cases.json"
    res = runner.invoke(main, ["cases", "--out", str(out)])
    assert res.exit_code == 0
    data = json.loads(out.read_text())
    assert [d["mu"] for d in data] == [23, 39, 42]
    assert all(d["verdict"] == "certified" for d in data)
    assert data[1]["mismatches"] == []
    assert [m["index"] for m in data[0]["mismatches"]] == [18]
    assert "suspect print" in res.output


def test_theta(runner, tmp_path):
    out = tmp_path / "theta.csv"
    res = runner.invoke(main, ["theta", "--max-n", "10", "--format", "csv", "--out", str(out)])
    assert res.exit_code == 0
    lines = out.read_text().strip().splitlines()
    assert len(lines) == 12
    for line in lines[1:]:
        _, lo, hi, *_ = line.split(",")
        assert 1 / 3 <= float(lo) <= float(hi) <= 1 / 2


def test_theta_json(runner, tmp_path):
    out = tmp_path / "theta.json"
    res = runner.invoke(main, ["theta", "--max-n", "3", "--out", str(out)])
    assert res.exit_code == 0
    assert json.loads(out.read_text())[0]["k_lo"] == "8/45"


def test_bad_options(runner):
    assert runner.invoke(main, ["theta", "--precision-digits", "5"]).exit_code != 0
    assert runner.invoke(main, ["verify", "--grid", "1:2"]).exit_code != 0
    assert runner.invoke(main, ["verify", "--tol", "0"]).exit_code != 0


def test_monotone(runner, tmp_path):
    out = tmp_path / "mono.json"
    res = runner.invoke(main, ["monotone", "--depth", "20", "--out", str(out)])
    assert res.exit_code == 0
    data = json.loads(out.read_text())
    assert set(data) == {"theta", "shifted", "koumandos"}
    assert all(v["not_positive"] == [] and v["count"] == 231 for v in data.values())


def test_verify_small(runner, tmp_path):
    out = tmp_path / "verify.json"
    res = runner.invoke(
        main, ["verify", "--grid", "1e-3:30:100:log", "--max-n", "3", "--out", str(out)]
    )
    assert res.exit_code == 0, res.output
    rep = json.loads(out.read_text())
    assert rep["passed"] and not rep["unreachable"]
    rs = [c for c in rep["checks"] if c["name"].endswith("factorization")]
    assert len(rs) == 3 and all(c["max_residual"] < 1e-10 for c in rs)
    csv_out = tmp_path / "grid.csv"
    res = runner.invoke(
        main,
        ["verify", "--grid", "1e-3:30:100:log", "--max-n", "1", "--format", "csv", "--out", str(csv_out)],
    )
    lines = csv_out.read_text().splitlines()
    assert lines[0].startswith("x,t,u,U") and len(lines) == 101


def test_verify_unreachable_exit_code(runner, monkeypatch):
    from thetacert import suite
    from thetacert.quadrature import QuadratureError

    def boom(*a, **k):
        raise QuadratureError("budget exhausted")

    monkeypatch.setattr(suite, "exact_moments", boom)
    res = runner.invoke(main, ["verify", "--grid", "1e-3:30:100:log", "--max-n", "1"])
    assert res.exit_code == 3
    assert "UNREACHABLE" in res.output
