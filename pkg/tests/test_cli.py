import json
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import expm

from sfcalc import cli
from sfcalc.operator import random_operator, random_quaternion_operator, random_two_group_operator


def write_operator(path, T):
    path.write_text(json.dumps(T.to_json()))
    return str(path)


@pytest.fixture
def zero_op(tmp_path):
    data = {"n": 1, "d": 2, "components": [[[0, 0], [0, 0]], [[0, 0], [0, 0]]]}
    p = tmp_path / "zero.json"
    p.write_text(json.dumps(data))
    return str(p)


def run_main(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_of_zero_operator(zero_op, capsys):
    code, out, err = run_main(["spectrum", "--input", zero_op], capsys)
    assert code == 0
    report = json.loads(out)
    assert report["spheres"] == [{"u": 0.0, "v": 0.0, "mult": 4}]
    assert "norm bound check: ok" in err


def test_spectrum_of_generator(tmp_path, capsys):
    # T = e1 I on R_1 with d = 1: the sphere (0, 1)
    p = tmp_path / "e1.json"
    p.write_text(json.dumps({"n": 1, "d": 1, "components": [[[0.0]], [[1.0]]]}))
    code, out, _ = run_main(["spectrum", "--input", str(p)], capsys)
    assert code == 0
    spheres = json.loads(out)["spheres"]
    assert len(spheres) == 1
    assert spheres[0]["u"] == pytest.approx(0.0, abs=1e-12)
    assert spheres[0]["v"] == pytest.approx(1.0, abs=1e-12)


def test_malformed_input_is_exit_two(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, out, err = run_main(["spectrum", "--input", str(p)], capsys)
    assert code == 2 and out == "" and "sfcalc:" in err


def test_missing_input_is_exit_two(capsys):
    assert run_main(["funcalc"], capsys)[0] == 2


def test_spectrum_csv(tmp_path, capsys):
    path = write_operator(tmp_path / "t.json", random_operator(2, 2, 3))
    code, out, _ = run_main(["spectrum", "--input", path, "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "u,v,mult"


def test_funcalc_exp_matches_expm(tmp_path, capsys):
    T = random_operator(2, 2, 5)
    path = write_operator(tmp_path / "t.json", T)
    out_path = tmp_path / "out.json"
    code, _, _ = run_main(["funcalc", "--input", path, "--function", "exp", "--output", str(out_path)], capsys)
    assert code == 0
    report = json.loads(out_path.read_text())
    assert np.linalg.norm(np.array(report["value"]) - expm(T.matrix), 2) < 1e-7
    assert report["err_estimate"] >= 0


def test_funcalc_contour_through_spectrum_is_exit_four(tmp_path, capsys):
    T = random_operator(1, 2, 2)
    path = write_operator(tmp_path / "t.json", T)
    from sfcalc.spectrum import s_spectrum

    r = s_spectrum(T).max_modulus()
    out_path = tmp_path / "never.json"
    code, out, err = run_main(
        ["funcalc", "--input", path, "--radius", str(r), "--output", str(out_path)], capsys
    )
    assert code == 4
    assert "margins" in err
    assert not out_path.exists()


def test_unknown_function_is_exit_two(tmp_path, capsys):
    path = write_operator(tmp_path / "t.json", random_operator(1, 2, 2))
    assert run_main(["funcalc", "--input", path, "--function", "tan"], capsys)[0] == 2


def test_riesz_full_subset_is_identity(tmp_path, capsys):
    T = random_two_group_operator(1, 2, 4)
    path = write_operator(tmp_path / "t.json", T)
    code, out, _ = run_main(["riesz", "--input", path], capsys)
    assert code == 0
    report = json.loads(out)
    assert np.linalg.norm(np.array(report["P"]) - np.eye(T.size), 2) < 1e-8


def test_riesz_bad_index_is_exit_two(tmp_path, capsys):
    path = write_operator(tmp_path / "t.json", random_operator(1, 2, 1))
    assert run_main(["riesz", "--input", path, "--subset", "99"], capsys)[0] == 2


def test_riesz_inseparable_subset_is_exit_four(tmp_path, capsys):
    # two spheres 1e-8 apart: selecting only one cannot be separated
    comps = [np.diag([1.0, 1.0 + 1e-7]), np.zeros((2, 2))]
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"n": 1, "d": 2, "components": [c.tolist() for c in comps]}))
    code, _, err = run_main(["riesz", "--input", str(path), "--subset", "0"], capsys)
    assert code == 4, err


def test_laplace_command(tmp_path, capsys):
    Q = random_quaternion_operator(2, 6)
    path = write_operator(tmp_path / "q.json", Q)
    s0 = 2 * Q.norm_bound() + 0.2
    code, out, _ = run_main(["laplace", "--input", path, "--scalar", f"{s0},0.3,0,0.1", "--side", "right"], capsys)
    assert code == 0
    assert json.loads(out)["closed_form_gap"] < 1e-6


def test_laplace_divergent_scalar_is_exit_two(tmp_path, capsys):
    path = write_operator(tmp_path / "t.json", random_operator(1, 2, 6))
    assert run_main(["laplace", "--input", path, "--scalar", "0.01,0.5"], capsys)[0] == 2


def test_verify_is_deterministic(capsys):
    argv = ["verify", "--seed", "7", "--instances", "2", "--nodes", "128"]
    code1, out1, _ = run_main(argv, capsys)
    code2, out2, _ = run_main(argv, capsys)
    assert code1 == 0 and out1 == out2
    report = json.loads(out1)
    assert report["passed"] and {r["instance"] for r in report["records"]} == {0, 1}


def test_verify_zero_tolerance_fails(capsys):
    code, out, err = run_main(["verify", "--instances", "1", "--nodes", "64", "--tol", "0"], capsys)
    assert code == 1
    assert "failed" in err
    assert json.loads(out)["failures"]


def test_verify_csv_header(capsys):
    code, out, _ = run_main(["verify", "--instances", "1", "--nodes", "64", "--format", "csv"], capsys)
    assert out.splitlines()[0] == "instance,seed,n,d,identity,residual,tolerance,pass"


def test_run_config_roundtrip():
    cfg = cli.config_from_args(["riesz", "--subset", "0,2", "--scalar", "1.5,0.2", "--radius", "0.1", "-vv"])
    back = cli.RunConfig.from_json(cfg.to_json())
    assert back == cfg
    assert back.subset == [0, 2] and back.verbosity == 2
    with pytest.raises(ValueError):
        cli.RunConfig.from_json('{"command": "verify", "bogus": 1}')


def test_console_entry_point(zero_op):
    proc = subprocess.run(
        [sys.executable, "-m", "sfcalc.cli", "spectrum", "--input", zero_op],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["spheres"][0]["mult"] == 4


def test_reports_match_published_schemas(tmp_path, capsys):
    jsonschema = pytest.importorskip("jsonschema")
    from sfcalc.schemas import OPERATOR, REPORTS

    T = random_two_group_operator(2, 2, 3)
    Q = random_quaternion_operator(2, 3)
    path = write_operator(tmp_path / "t.json", T)
    qpath = write_operator(tmp_path / "q.json", Q)
    for p in (path, qpath):
        jsonschema.validate(json.loads(open(p).read()), OPERATOR)
    s0 = 2 * Q.norm_bound() + 0.2
    runs = {
        "spectrum": ["spectrum", "--input", path],
        "verify": ["verify", "--instances", "1", "--nodes", "256"],
        "funcalc": ["funcalc", "--input", path, "--function", "x^2"],
        "riesz": ["riesz", "--input", path, "--subset", "0"],
        "laplace": ["laplace", "--input", qpath, "--scalar", f"{s0},0.1,0.2,0.3"],
    }
    for command, argv in runs.items():
        code, out, err = run_main(argv, capsys)
        assert code == 0, err
        jsonschema.validate(json.loads(out), REPORTS[command])
