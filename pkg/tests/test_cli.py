import json

import numpy as np
import pytest

from hermite_rolle.cli import main, parse_config_text
from hermite_rolle.errors import ConfigError
from hermite_rolle.experiment import ExperimentConfig, read_csv, run_experiment, write_csv

OUTPUTS = ("config.echo", "trajectory.csv", "error_curves.csv", "fits.json", "integration.json")
SMALL = ["run", "--samples", "2000", "--degrees", "5,7"]


def test_small_run_writes_all_outputs(tmp_path, capsys):
    assert main(SMALL + ["--out", str(tmp_path)]) == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(OUTPUTS)
    fits = json.loads((tmp_path / "fits.json").read_text())
    assert fits["status"] == "ok"
    assert [e["degree"] for e in fits["fits"]] == [5, 7]
    assert all(e["node_check"]["passed"] for e in fits["fits"])
    assert "status: ok" in capsys.readouterr().out


def test_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(SMALL + ["--out", str(a)]) == 0
    assert main(SMALL + ["--out", str(b)]) == 0
    for name in OUTPUTS:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_csv_round_trip(tmp_path):
    rep = run_experiment(ExperimentConfig(samples=2000, degrees=(5,), spline=False,
                                          out=str(tmp_path)))
    traj = read_csv(tmp_path / "trajectory.csv")
    assert np.array_equal(traj["x"], rep.arrays["xs"])
    assert np.array_equal(traj["xi"], rep.arrays["xis"])
    curves = read_csv(tmp_path / "error_curves.csv")
    for col, key in [("delta_true", "delta_true"), ("delta_model", "delta_model"),
                     ("difference", "difference")]:
        assert np.array_equal(curves[col], rep.arrays[key])


def test_csv_round_trip_awkward_values(tmp_path):
    cols = [np.array([0.1, 1 / 3, -2.5e-300, 1e300]), np.array([np.pi, -0.0, 5e-324, 7.0])]
    write_csv(tmp_path / "t.csv", ["u", "v"], cols)
    back = read_csv(tmp_path / "t.csv")
    assert np.array_equal(back["u"], cols[0]) and np.array_equal(back["v"], cols[1])


def test_degenerate_cube_exits_cleanly(tmp_path, capsys):
    assert main(["run", "--function", "cube", "--nodes", "0,1", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "fits.json").read_text())["status"] == "degenerate"
    assert json.loads((tmp_path / "integration.json").read_text())["error_H"] <= 1e-15
    assert "degenerate" in capsys.readouterr().out


@pytest.mark.parametrize("args", [
    ["--nodes", "1,0"],
    ["--nodes", "0,1,1"],
    ["--function", "tan"],
    ["--xz-offset", "0"],
    ["--nodes", "0,1"],          # default grid step equals the offset
    ["--degrees", "5,-1"],
    ["--bogus"],
])
def test_config_errors_exit_2(args, tmp_path):
    assert main(["run", *args, "--out", str(tmp_path)]) == 2


def test_missing_config_file_exit_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.cfg")]) == 2


def test_numeric_failure_exits_3_with_partial_outputs(tmp_path, capsys):
    # f = x^4 has a constant fourth derivative, so the bootstrap cannot pin xi
    assert main(["run", "--function", "quartic", "--nodes", "0,1", "--out", str(tmp_path)]) == 3
    assert "rolle" in capsys.readouterr().err
    fits = json.loads((tmp_path / "fits.json").read_text())
    assert fits["status"] == "failed:rolle"
    assert fits["hermite"]["coefficients"] == pytest.approx([0, 0, -1, 2], abs=1e-12)


def test_config_file_and_flag_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# small run\nsamples = 2000\ndegrees = 5\nspline = off\nxz-offset = 2e-5\n")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--degrees", "7", "--out", str(out)]) == 0
    echo = (out / "config.echo").read_text()
    assert "samples = 2000\n" in echo
    assert "degrees = 7\n" in echo
    assert "spline = False\n" in echo
    assert "xz_offset = 2.0000000000000002e-05\n" in echo
    assert not json.loads((out / "fits.json").read_text())["spline"]


def test_parse_config_text_errors():
    assert parse_config_text("steps = none\nmargin = 1e-4") == {"steps": None, "margin": 1e-4}
    with pytest.raises(ConfigError):
        parse_config_text("samples 10")
    with pytest.raises(ConfigError):
        parse_config_text("colour = blue")
    with pytest.raises(ConfigError):
        parse_config_text("spline = maybe")
