import io as stdio
import json
import math

import numpy as np
import pytest

from ptentropy import cli, coherent, eigenstates, io, numerics


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- serialisation ------------------------------------------------------------

def test_csv_round_trip_is_exact(rng):
    rows = [{"n": i, "a": float(v), "b": float(w)} for i, (v, w) in
            enumerate(zip(rng.normal(size=20) * 1e-7, rng.normal(size=20) * 1e9))]
    rows.append({"n": 99, "a": math.pi, "b": 1 / 3})
    buf = stdio.StringIO()
    io.write_table_csv(rows, buf)
    buf.seek(0)
    assert io.read_table_csv(buf) == rows


def test_carpet_csv_round_trip():
    well = eigenstates.TrigPTSpec(2.0)
    s = coherent.CoherentStateSpec(well, 3.0, 6)
    carpet = coherent.entropy_carpet(s, coherent.default_x_grid(well, 7),
                                     coherent.default_t_grid(well, 5))
    buf = stdio.StringIO()
    io.write_carpet_csv(carpet, buf)
    buf.seek(0)
    x, t, v = io.read_carpet_csv(buf)
    np.testing.assert_array_equal(x, carpet.x_grid.points)
    np.testing.assert_array_equal(t, carpet.t_grid.points)
    np.testing.assert_array_equal(v, carpet.values)


def test_pgm_format(tmp_path):
    values = np.arange(12, dtype=float).reshape(3, 4)
    pixels, vmin, vmax, degenerate = io.carpet_to_pixels(values)
    assert (vmin, vmax, degenerate) == (0.0, 11.0, False)
    assert pixels[0, 0] == 0 and pixels[-1, -1] == 255
    assert pixels[0, 1] == round(255 / 11)
    path = tmp_path / "img.pgm"
    io.write_pgm(pixels, path)
    data = path.read_bytes()
    assert data.startswith(b"P5\n4 3\n255\n") and len(data) == len(b"P5\n4 3\n255\n") + 12
    back, maxval = io.read_pgm(path)
    np.testing.assert_array_equal(back, pixels)
    assert maxval == 255


def test_pgm_readable_by_pillow(tmp_path):
    from PIL import Image
    pixels = (np.arange(20 * 10) % 256).astype(np.uint8).reshape(10, 20)
    io.write_pgm(pixels, tmp_path / "a.pgm")
    with Image.open(tmp_path / "a.pgm") as img:
        assert img.size == (20, 10) and img.mode == "L"
        np.testing.assert_array_equal(np.asarray(img), pixels)


def test_degenerate_image_is_mid_grey():
    pixels, vmin, vmax, degenerate = io.carpet_to_pixels(np.full((2, 3), 0.25))
    assert degenerate and np.all(pixels == 128)


def test_load_config(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nn-states = 30\n\nrho=2  # trailing\n")
    assert io.load_config(path) == {"n_states": "30", "rho": "2"}
    path.write_text("just words\n")
    with pytest.raises(ValueError):
        io.load_config(path)


def test_json_handles_complex_and_arrays():
    buf = stdio.StringIO()
    io.dump_json({"g": 1 + 2j, "a": np.arange(3), "x": np.float64(0.5)}, buf)
    assert json.loads(buf.getvalue()) == {"a": [0, 1, 2], "g": {"im": 2.0, "re": 1.0}, "x": 0.5}


# --- command line --------------------------------------------------------------

def test_ground_stdout_table(capsys):
    code, out, _ = run(capsys, "ground", "--n", "1")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header.split()[:4] == ["n", "s_pos", "s_mom", "sum"]
    assert row.split()[2] == "0.162123"


def test_ground_momentum_only(capsys):
    code, out, _ = run(capsys, "ground", "--n", "2", "--space", "mom", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "n,s_mom,err_estimate"


def test_table1_csv_with_manifest(tmp_path, capsys):
    out = tmp_path / "t1.csv"
    code, _, _ = run(capsys, "table1", "--n-range", "2..3", "--out", str(out))
    assert code == 0
    with open(out) as fh:
        rows = io.read_table_csv(fh)
    assert [r["n"] for r in rows] == [2, 3]
    assert rows[0]["s_pos"] == pytest.approx(2.23472, abs=1e-5)
    assert rows[0]["bound"] == pytest.approx(1 + math.log(math.pi), abs=1e-15)
    manifest = json.loads((tmp_path / "t1.csv.manifest.json").read_text())
    assert manifest["command"] == "table1"
    assert manifest["parameters"]["n_range"] == [2, 3]
    assert set(manifest["versions"]) >= {"ptentropy", "numpy", "python", "kernel_backend"}
    assert manifest["wall_time_s"] > 0


def test_bbm_scan_json(tmp_path, capsys):
    out = tmp_path / "scan.json"
    assert run(capsys, "bbm-scan", "--n-max", "5", "--out", str(out))[0] == 0
    doc = json.loads(out.read_text())
    assert doc["summary"]["trend"] == "decreasing"
    first = doc["rows"][0]
    assert first["s_pos"] == pytest.approx(2.0, abs=1e-9)
    assert first["s_pos_analytic"] == pytest.approx(first["s_pos"], abs=1e-9)


def test_density_command(capsys):
    code, out, _ = run(capsys, "density", "--state", "excited", "--space", "mom", "--n", "4",
                       "--grid=-6:6:121", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,density,entropy_density" and len(lines) == 122


def test_carpet_pgm_is_deterministic(tmp_path, capsys):
    args = ["carpet", "--rho", "2", "--alpha", "1", "--gamma", "10", "--n-states", "5",
            "--x-points", "60", "--t-points", "40"]
    a, b = tmp_path / "a.pgm", tmp_path / "b.pgm"
    assert run(capsys, *args, "--out", str(a))[0] == 0
    assert run(capsys, *args, "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    pixels, _ = io.read_pgm(a)
    assert pixels.shape == (40, 60)
    side = json.loads((tmp_path / "a.pgm.manifest.json").read_text())
    assert side["v_min"] < side["v_max"]
    assert side["parameters"]["rho"] == 2.0 and side["x_grid"][2] == 60


def test_carpet_csv_output(tmp_path, capsys):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "carpet", "--rho", "1.5", "--gamma", "2+1j", "--n-states", "4",
                     "--x-points", "9", "--t-points", "3", "--t-max", "1", "--out", str(out))
    assert code == 0
    with open(out) as fh:
        x, t, v = io.read_carpet_csv(fh)
    assert v.shape == (3, 9) and t[-1] == 1.0


def test_carpet_requires_physics_parameters(tmp_path, capsys):
    code, _, err = run(capsys, "carpet", "--gamma", "5", "--n-states", "5",
                       "--out", str(tmp_path / "x.pgm"))
    assert code == 2 and "--rho" in err


@pytest.mark.parametrize("argv", [
    ["excited", "--n", "1"],
    ["table1", "--n-range", "1..4"],
    ["ground"],
    ["ground", "--n", "0"],
    ["ground", "--n", "2", "--bogus"],
    ["carpet", "--rho", "0.5", "--gamma", "1", "--n-states", "3", "--out", "x.pgm"],
    ["excited", "--n", "2", "--n-range", "2..3"],
    ["ground", "--n", "2", "--format", "pgm"],
    ["nosuch"],
])
def test_usage_errors_exit_2(argv, capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run(capsys, *argv)[0] == 2


def test_convergence_failure_exits_1(capsys):
    code, _, err = run(capsys, "ground", "--n", "3", "--tol", "1e-18")
    assert code == 1 and "failed" in err


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\nspace = pos\n")
    code, out, _ = run(capsys, "--config", str(cfg), "ground", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "n,s_pos,err_estimate,s_pos_analytic"
    assert out.splitlines()[1].startswith("3,")
    code, out, _ = run(capsys, "--config", str(cfg), "ground", "--n", "2", "--format", "csv")
    assert out.splitlines()[1].startswith("2,")


def test_config_rejects_unknown_keys_and_bad_values(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\ncolour = red\n")
    assert run(capsys, "--config", str(cfg), "ground")[0] == 2
    cfg.write_text("space = sideways\nn = 2\n")
    assert run(capsys, "--config", str(cfg), "ground")[0] == 2
    assert run(capsys, "--config", str(tmp_path / "missing.cfg"), "ground")[0] == 2


def test_config_mutually_exclusive_defers_to_flags(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("n = 3\n")
    code, out, _ = run(capsys, "--config", str(cfg), "excited", "--n-range", "4..5",
                       "--format", "csv")
    assert code == 0
    assert [line.split(",")[0] for line in out.splitlines()[1:]] == ["4", "5"]


def test_env_tolerance_recorded(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(numerics.TOL_ENV_VAR, "1e-8")
    out = tmp_path / "g.json"
    assert run(capsys, "ground", "--n", "2", "--out", str(out))[0] == 0
    manifest = json.loads((tmp_path / "g.json.manifest.json").read_text())
    assert manifest["tolerances"]["entropy"] == 1e-8


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "ptentropy", "ground", "--n", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "0.162123" in res.stdout
