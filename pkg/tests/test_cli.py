import json
import subprocess
import sys

import pytest

from qcurv.cli import cmd_spectra, cmd_sweep, main, parse_operator, parse_range
from qcurv.errors import InvalidSpec
from qcurv.spectra import OperatorSpec


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_operator():
    assert parse_operator("gjms:n=4,m=4") == OperatorSpec.gjms(4, 4)
    assert parse_operator("intertwinor:n=4,nu=-0.5") == OperatorSpec.intertwinor(4, -0.5)
    for bad in ("foo:n=2", "laplacian", "laplacian:n=2,q=1", "gjms:n=4,m=6"):
        with pytest.raises(InvalidSpec):
            parse_operator(bad)


def test_spectra_rows():
    assert cmd_spectra(OperatorSpec.laplacian(2), 1) == [(0, 0.0, 1), (1, 2.0, 3)]
    assert cmd_spectra(OperatorSpec.laplacian(1), 1) == [(0, 0.0, 1), (1, 1.0, 2)]
    assert cmd_spectra(OperatorSpec.gjms(4, 4), 0) == [(0, 0.0, 1)]


def test_spectra_command(capsys):
    code, out, _ = run(["spectra", "laplacian:n=2", "--j-max", "2"], capsys)
    assert code == 0
    assert out.splitlines() == ["j,lambda,multiplicity", "0,0.0,1", "1,2.0,3", "2,6.0,5"]


def test_det_command_json(capsys):
    code, out, _ = run(["det", "laplacian:n=1", "--format", "json"], capsys)
    assert code == 0
    rows = {r["name"]: r for r in json.loads(out)}
    assert abs(rows["det"]["value"] - 39.47841760435743) < 1e-6
    assert rows["det"]["provenance"] == "MellinSplit"
    code, out, _ = run(["det", "dirac_squared:n=2", "--format", "json"], capsys)
    assert abs(json.loads(out)[0]["value"] + 1 / 3) < 1e-9


def test_det_is_byte_identical_with_cache(capsys, tmp_path, monkeypatch):
    _, plain, _ = run(["det", "laplacian:n=2"], capsys)
    monkeypatch.setenv("QCURV_CACHE_DIR", str(tmp_path))
    _, cold, _ = run(["det", "laplacian:n=2"], capsys)
    _, warm, _ = run(["det", "laplacian:n=2"], capsys)
    assert plain == cold == warm
    assert any(tmp_path.iterdir())


@pytest.mark.parametrize("suite", ["mt-equality", "q4-two-path", "checkerboard"])
def test_verify_passes(suite, capsys):
    code, out, err = run(["verify", suite], capsys)
    assert code == 0
    assert "FAIL" not in err
    assert out.startswith("check,status,value,bound,detail")


def test_usage_errors(capsys):
    assert run(["bogus"], capsys)[0] == 2
    assert run(["spectra", "foo:n=2"], capsys)[0] == 2
    assert run(["verify", "nope"], capsys)[0] == 2
    assert run(["sweep", "alpha", "--range", "1:0:0.1"], capsys)[0] == 2
    assert run(["det", "laplacian:n=2", "--jobs", "0"], capsys)[0] == 2
    assert run(["det", "laplacian:n=2", "--config", "/nonexistent/file"], capsys)[0] == 2


def test_computation_failure_exit_code(capsys):
    # at t = 1e-13 the heat-trace tail cannot be certified within the mode cap
    code, _, err = run(["sweep", "t", "--range", "1e-13:1e-13:1", "--target", "laplacian:n=6"], capsys)
    assert code == 1
    assert "TailBudgetExceeded" in err


def test_range_parsing():
    assert parse_range("0:1:0.1") == [i / 10 for i in range(11)]
    assert len(parse_range("-1:1:0.25")) == 9


def test_sweep_alpha_f0(capsys):
    code, out, _ = run(["sweep", "alpha", "--range", "0:1:0.1"], capsys)
    assert code == 0
    rows = out.splitlines()[1:]
    assert len(rows) == 11
    assert rows[0] == "alpha,F0,0.0,0.0"
    assert all(abs(float(r.split(",")[-1])) < 1e-9 for r in rows)


def test_sweep_leading_form_crosses_threshold():
    rows = cmd_sweep("a", parse_range("-0.6:-0.5:0.01"))
    labels = [r[-1] for r in rows]
    assert labels[0] == "PositiveDefinite" and labels[-1] == "Indefinite"
    flip = next(r[2] for r in rows if r[-1] == "Indefinite")
    assert -8 / 15 < flip <= -8 / 15 + 0.01


def test_sweep_nu_gamma_curve():
    import math

    rows = cmd_sweep("nu", parse_range("-1:1:0.5"), n=4)
    for _, _, nu, val in rows:
        assert val == pytest.approx(abs(math.gamma(2 + nu) / math.gamma(2 - nu)), rel=1e-12)


def test_parallel_sweep_matches_serial():
    vals = parse_range("0:1:0.25")
    assert cmd_sweep("alpha", vals, "Y", n=4, jobs=3) == cmd_sweep("alpha", vals[::-1], "Y", n=4)


def test_rerun_is_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"o{i}.json"
        subprocess.run([sys.executable, "-m", "qcurv", "sweep", "alpha", "--range", "0:1:0.5",
                        "--format", "json", "--jobs", "2", "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_all_suites_pass():
    from qcurv.suites import SUITES, run_suite

    checks = run_suite("all")
    assert len({c.name for c in checks}) == len(checks)
    failed = [c.line() for c in checks if not c.passed]
    assert not failed
    assert set(SUITES) >= {"s1-det", "zeta0", "heat-fit", "a6", "mt-equality", "q4-two-path",
                           "conformal-index", "dim6", "checkerboard", "rep-theory"}
    with pytest.raises(KeyError):
        run_suite("missing")
