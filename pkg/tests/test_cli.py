import json
import subprocess
import sys

import numpy as np
import pytest

from checkers.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# --- wave -----------------------------------------------------------------

def test_wave_boundary_point(capsys):
    code, out, _ = run(capsys, "wave", "-x", "3", "-t", "3")
    assert code == 0
    assert "a = 0.5i" in out


def test_wave_single_quantity(capsys):
    code, out, _ = run(capsys, "wave", "-x", "0", "-t", "5", "--what", "a1")
    assert code == 0
    assert float(out) == pytest.approx(-0.3535534, abs=1e-7)


def test_wave_outside_cone(capsys):
    code, out, _ = run(capsys, "wave", "-x", "9", "-t", "3", "--what", "a")
    assert code == 0 and out.strip() == "0"


@pytest.mark.parametrize("engine", ["oracle", "exact", "float"])
def test_wave_engines_agree(capsys, engine):
    code, out, _ = run(capsys, "wave", "-x", "1", "-t", "3", "--engine", engine, "--what", "a")
    assert code == 0 and out.strip().endswith("0.5 - 0.5i")


def test_wave_physical_coordinates(capsys):
    code, out, _ = run(capsys, "wave", "-x", "1.5", "-t", "1.5", "--m", "2", "--eps", "0.5", "--what", "a")
    assert code == 0 and out.strip() == "0.5i"


def test_wave_errors(capsys):
    assert run(capsys, "wave", "-x", "0", "-t", "3", "--engine", "exact", "--m", "2")[0] == 2
    assert run(capsys, "wave", "-x", "0.2", "-t", "1", "--eps", "0.5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["wave", "-x", "1"])
    assert exc.value.code == 2


# --- young / signmap ------------------------------------------------------

def test_young_values(capsys):
    assert run(capsys, "young", "-w", "3", "-h", "3")[1].strip() == "-2"
    assert run(capsys, "young", "-w", "1", "-h", "6")[1].strip() == "1"
    assert run(capsys, "young", "-w", "2", "-h", "12", "--brute-force")[1].strip() == "-10"
    assert run(capsys, "young", "-w", "0", "-h", "3")[0] == 2


def test_young_map_ppm(tmp_path, capsys):
    path = tmp_path / "signs.ppm"
    code, _, _ = run(capsys, "young", "map", "60", "60", "-o", str(path))
    assert code == 0
    data = path.read_bytes()
    header = b"P6\n60 60\n255\n"
    assert data.startswith(header)
    pixels = np.frombuffer(data[len(header):], dtype=np.uint8).reshape(60, 60, 3)
    for w in range(2, 61, 2):
        assert tuple(pixels[w - 1, w - 1]) == (0, 0, 255)


def test_signmap_csv(capsys):
    code, out, _ = run(capsys, "signmap", "3", "3", "--format", "csv")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "w,h,difference,sign"
    assert "3,3,-2,-1" in lines


def test_young_map_usage_error(capsys):
    assert run(capsys, "young", "map", "3")[0] == 2


# --- layer / dips ---------------------------------------------------------

def test_layer_small(capsys):
    code, out, _ = run(capsys, "layer", "-t", "5")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "x,a1,asymptotic,abs_error" and len(lines) == 4


def test_dips_outputs(tmp_path, capsys):
    csv_path, json_path = tmp_path / "scan.csv", tmp_path / "dips.json"
    code, _, _ = run(capsys, "dips", "-T", "3", "-t", "2000", "--resolution", "201",
                     "-o", str(csv_path), "--json", str(json_path))
    assert code == 0
    assert csv_path.read_text().startswith("v,metric\n")
    info = json.loads(json_path.read_text())
    assert [p["k"] for p in info["predicted"]] == [-1, 0, 1]
    assert info["predicted"][2]["v"] == pytest.approx((3 / 7) ** 0.5)


def test_dips_rejects_heavy_mass(capsys):
    assert run(capsys, "dips", "-T", "3", "-t", "100", "--m", "2")[0] == 2


# --- verify / zeros -------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["verify", "outside", "--tmax", "200"],
    ["verify", "outside", "--tmax", "2000", "--samples", "20", "--m", "0.5"],
    ["verify", "middle", "--tmax", "400", "--exact"],
    ["verify", "recurrence", "--samples", "500", "--tmax", "200", "--exact-tmax", "40"],
    ["verify", "symmetry", "--tmax", "200"],
    ["verify", "symmetry", "--tmax", "2000", "--m", "0.3"],
    ["verify", "middle-values", "--tmax", "40"],
    ["verify", "young-outside", "--tmax", "300"],
])
def test_verify_passes(capsys, argv):
    code, out, _ = run(capsys, *argv)
    report = json.loads(out)
    assert code == 0 and report["violations"] == []


def test_verify_recurrence_reports_residuals(capsys):
    code, out, _ = run(capsys, "verify", "recurrence", "--samples", "300", "--tmax", "100", "--exact-tmax", "10")
    thresholds = json.loads(out)["thresholds"]
    assert code == 0
    assert thresholds["max_relative"] <= 1e-9
    assert "max_relative_float64" in thresholds


def test_verify_sharpness(capsys):
    code, out, _ = run(capsys, "verify", "sharpness", "--tmax", "3000")
    witness = json.loads(out)["notes"]["witness"]
    assert code == 0 and (witness["x"], witness["t"]) == (1771, 2530) and witness["confirmed_exact"]
    assert run(capsys, "verify", "sharpness", "--tmax", "50")[0] == 1


def test_verify_young_middle_flags_d_zero(capsys):
    code, out, _ = run(capsys, "verify", "young-middle", "--tmax", "100", "--xmax", "2")
    report = json.loads(out)
    assert code == 1 and [v["d"] for v in report["violations"]] == [0]


def test_zeros(capsys):
    code, out, _ = run(capsys, "zeros", "--tmax", "11")
    data = json.loads(out)
    assert code == 0 and data["unexpected"] == []
    points = {(z["x"], z["t"]) for z in data["zeros"]}
    assert {(-3, 11), (5, 11)} <= points
    code, out, _ = run(capsys, "zeros", "--tmax", "3")
    assert all(z["x"] in (0, 2) for z in json.loads(out)["zeros"])


# --- config, determinism, entry point -------------------------------------

def test_config_file_sets_defaults_and_flags_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nm = 2\neps = 0.5\nwhat = a\n")
    assert run(capsys, "--config", str(cfg), "wave", "-x", "1.5", "-t", "1.5")[1].strip() == "0.5i"
    out = run(capsys, "--config", str(cfg), "wave", "-x", "1.5", "-t", "1.5", "--what", "P")[1]
    assert float(out) == pytest.approx(0.25)


def test_outputs_do_not_depend_on_threads(tmp_path, capsys):
    files = {}
    for threads in ("1", "3"):
        scan, grid = tmp_path / f"scan{threads}.csv", tmp_path / f"grid{threads}.ppm"
        run(capsys, "--threads", threads, "dips", "-T", "4", "-t", "3000", "--resolution", "301", "-o", str(scan))
        run(capsys, "--threads", threads, "signmap", "80", "80", "-o", str(grid))
        files[threads] = (scan.read_bytes(), grid.read_bytes())
    assert files["1"] == files["3"]


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "checkers.cli", "young", "-w", "3", "-h", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.strip() == "-2"
