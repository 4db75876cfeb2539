import json
import subprocess
import sys

import numpy as np
import pytest

from exactlts.cli import (
    EXIT_CAP,
    EXIT_INPUT,
    EXIT_NO_CANDIDATE,
    EXIT_OK,
    RunConfig,
    config_from_args,
    load_csv,
    main,
    resolve_h,
    run,
    save_csv,
)
from exactlts.datasets import EXAMPLE1_X, EXAMPLE1_Y, gen_instance
from exactlts.errors import InvalidInputError


@pytest.fixture
def ex1_csv(tmp_path):
    path = tmp_path / "ex1.csv"
    lines = ["y,x"] + [f"{y},{x}" for y, x in zip(EXAMPLE1_Y, EXAMPLE1_X)]
    path.write_text("\n".join(lines) + "\n")
    return path


def test_load_example(ex1_csv):
    ds = load_csv(ex1_csv)
    assert (ds.n, ds.p) == (9, 1)
    np.testing.assert_array_equal(ds.Y, EXAMPLE1_Y)
    assert load_csv(ex1_csv, response_column="x").Y[0] == 1.39


def test_load_without_header(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("1,2,3\n4,5,7\n1,0,2\n3,3,1\n2,2,2\n")
    ds = load_csv(path, response_column=3, intercept=True)
    assert ds.p == 3 and ds.has_intercept
    np.testing.assert_array_equal(ds.X[0], [1.0, 1.0, 2.0])
    np.testing.assert_array_equal(ds.Y, [3, 7, 2, 1, 2])


def test_load_errors(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(InvalidInputError, match="no rows"):
        load_csv(empty)
    with pytest.raises(InvalidInputError, match="no such file"):
        load_csv(tmp_path / "missing.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("y,x\n1,2\n3,abc\n")
    with pytest.raises(InvalidInputError, match=r"bad.csv:3: column 2"):
        load_csv(bad)
    small = tmp_path / "small.csv"
    small.write_text("1,2,3\n4,5,6\n")
    with pytest.raises(InvalidInputError, match="more observations"):
        load_csv(small)


def test_resolve_h():
    assert resolve_h("7", 10, 2) == 7
    assert resolve_h("0.75", 10, 2) == 8
    assert resolve_h("0.7", 10, 2) == 7
    assert resolve_h(None, 9, 1) == 5
    assert resolve_h("1.0", 9, 1) == 9
    with pytest.raises(InvalidInputError):
        resolve_h("12", 10, 2)
    with pytest.raises(InvalidInputError):
        resolve_h("1", 10, 2)


def test_both_algorithms_agree(ex1_csv):
    code, out = run(RunConfig(input_path=str(ex1_csv), h=5, algorithm="both"))
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["agreement"] == {"objective": True, "subset": True, "relative_gap": 0.0}
    assert rep["objective"] == pytest.approx(71.96, abs=0.05)
    assert rep["subset"] == [1, 2, 7, 8, 9]
    for key in ("beta", "objective", "subset", "counters", "assumptions", "algorithm", "wall_ms"):
        assert key in rep


def test_short_circuit_noted(ex1_csv):
    code, out = run(RunConfig(input_path=str(ex1_csv), h=9))
    assert code == EXIT_OK and "ols_short_circuit" in json.loads(out)["notes"]


def test_cap_exceeded_exit():
    code, out = run(RunConfig(gen=(0, 30, 1, 0.0), h=15, algorithm="exact"))
    assert code == EXIT_CAP and "155117520" in out


def test_no_candidate_exit(tmp_path):
    path = tmp_path / "par.csv"
    path.write_text("y,a,b\n1,1,1\n0,2,2\n2,3,3\n1,4.5,4.5\n3,6,6\n")
    code, _ = run(RunConfig(input_path=str(path), h=3))
    assert code == EXIT_NO_CANDIDATE


def test_input_error_exit(tmp_path):
    assert run(RunConfig(input_path=str(tmp_path / "nope.csv")))[0] == EXIT_INPUT
    assert run(RunConfig(gen=(0, 8, 2, 0.0), landscape=True))[0] == EXIT_INPUT


def test_json_round_trip(ex1_csv):
    code, out = run(RunConfig(input_path=str(ex1_csv), h=5, algorithm="both", landscape=True))
    assert code == EXIT_OK
    rep = json.loads(out)
    assert json.dumps(rep, indent=2, sort_keys=True) == out
    assert rep["landscape"]["cells"][0]["lower"] is None
    assert float(repr(rep["beta"][0])) == rep["beta"][0]


def test_threads_identical_reports():
    base = dict(gen=(5, 11, 2, 0.2), h=8, algorithm="both")
    r1 = json.loads(run(RunConfig(threads=1, **base))[1])
    r4 = json.loads(run(RunConfig(threads=4, **base))[1])
    r1.pop("wall_ms"), r4.pop("wall_ms")
    assert r1 == r4


def test_gen_is_deterministic():
    a, ta = gen_instance(1, 12, 3, 0.2)
    b, tb = gen_instance(1, 12, 3, 0.2)
    assert a.X.tobytes() == b.X.tobytes() and a.Y.tobytes() == b.Y.tobytes()
    assert ta.tobytes() == tb.tobytes()
    c, _ = gen_instance(2, 12, 3, 0.2)
    assert c.X.tobytes() != a.X.tobytes()


def test_gen_without_outliers_is_linear():
    ds, beta = gen_instance(1, 40, 2, 0.0)
    resid = ds.Y - ds.X @ beta
    assert np.abs(resid).max() < 5.0


def test_gen_rejects_bad_fraction():
    with pytest.raises(InvalidInputError):
        gen_instance(1, 10, 2, 0.5)


def test_contaminated_lts_beats_ols_on_its_best_h():
    ds, _ = gen_instance(11, 12, 2, 0.3)
    from exactlts.model import Problem, squared_residuals
    from exactlts.numerics import least_squares
    from exactlts.oracle import exact_enumerate
    h = int(np.ceil(0.7 * 12))
    pr = Problem(ds, h)
    ols = least_squares(ds.X, ds.Y)
    ols_trimmed = np.sort(squared_residuals(pr, ols))[:h].sum()
    assert exact_enumerate(pr).objective < 0.5 * ols_trimmed


def test_save_and_reload(tmp_path):
    ds, _ = gen_instance(3, 10, 3, 0.0, intercept=True)
    path = tmp_path / "g.csv"
    save_csv(path, ds)
    back = load_csv(path, intercept=True)
    np.testing.assert_array_equal(back.X, ds.X)
    np.testing.assert_array_equal(back.Y, ds.Y)


@pytest.mark.parametrize("fmt", ["csv", "text"])
def test_other_formats(ex1_csv, fmt):
    code, out = run(RunConfig(input_path=str(ex1_csv), h=5, report_format=fmt, algorithm="both"))
    assert code == EXIT_OK
    assert "1 2 7 8 9" in out


def test_argument_parsing():
    cfg = config_from_args(["--gen", "1,10,2,0.2", "--h", "0.7", "--algorithm", "both", "--threads", "3"])
    assert cfg.gen == (1, 10, 2, 0.2) and cfg.h == "0.7" and cfg.threads == 3
    with pytest.raises(SystemExit):
        config_from_args(["--gen", "1,2"])


def test_main_entry(ex1_csv, capsys):
    assert main([str(ex1_csv), "--h", "5", "--report", "text"]) == 0
    assert "objective" in capsys.readouterr().out


def test_module_invocation(ex1_csv):
    proc = subprocess.run([sys.executable, "-m", "exactlts", str(ex1_csv), "--h", "5"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["subset"] == [1, 2, 7, 8, 9]
