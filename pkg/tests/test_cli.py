import json
import math
import subprocess
import sys

import pytest

from osmgsc.cli import main
from osmgsc.protocol import CoolingReport


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def parse_csv(text):
    lines = text.splitlines()
    assert lines[0] == "t,f"
    return [tuple(float(x) for x in line.split(",")) for line in lines[1:]]


def test_scan_toy_csv_and_sidecar(capsys):
    code, out, err = run(capsys, "scan-f", "--model", "toy", "--t-max", "10")
    assert code == 0
    rows = parse_csv(out)
    assert len(rows) == 2000 and rows[0] == (0.0, 1.0) and rows[-1][0] == 10.0
    for t, f in rows[::97]:
        assert f == pytest.approx(math.cos(t) ** 2, abs=1e-14)
    side = json.loads(err)
    ts = [m["t"] for m in side["minima"]]
    assert ts == pytest.approx([1.5708, 4.7124, 7.8540], abs=1e-4)


def test_scan_writes_files(tmp_path, capsys):
    out = tmp_path / "damped.csv"
    code, stdout, _ = run(capsys, "scan-f", "--model", "damped", "--t-max", "10",
                          "--threshold", "1e-4", "--out", str(out))
    assert code == 0 and stdout == ""
    side = json.loads((tmp_path / "damped.minima.json").read_text())
    [window] = side["windows"]
    assert window["t_start"] == pytest.approx(math.log(50 * math.pi), abs=0.01)
    assert window["t_end"] == 10.0
    assert len(parse_csv(out.read_text())) == 2000


def test_scan_jc(capsys, tmp_path):
    side = tmp_path / "jc.json"
    code, out, _ = run(capsys, "scan-f", "--model", "jc", "--omega", "1", "--delta", "1",
                       "--g", "0.2", "--k", "3", "--t-max", "200", "--sidecar", str(side))
    assert code == 0
    best = json.loads(side.read_text())["best"]
    assert best["t"] == pytest.approx(150, abs=1)
    rows = dict(parse_csv(out))
    assert rows[0.0] == pytest.approx(3.0)


def test_scan_csv_full_precision(capsys):
    _, out, _ = run(capsys, "scan-f", "--model", "toy", "--t-max", "1", "--grid", "3")
    assert out.splitlines()[1:] == ["0,1", "0.5,0.77015115293406988", "1,0.29192658172642888"]


def test_scan_is_byte_deterministic(capsys):
    argv = ["scan-f", "--model", "jc", "--t-max", "200", "--grid", "5000"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_cool_toy(capsys):
    code, out, _ = run(capsys, "cool", "--model", "toy", "--t", "1.5708", "--temp", "1")
    assert code == 0
    report = CoolingReport.from_json(out)
    assert report.p_c == pytest.approx(1, abs=1e-9)


def test_cool_jc(capsys):
    code, out, _ = run(capsys, "cool", "--model", "jc", "--t", "150", "--temp", "1")
    r = json.loads(out)
    assert set(r) >= {"p_g", "p_c", "ground_fidelity", "populations", "f_at_measurement",
                      "bound_rhs"}
    assert r["p_c"] >= 0.93 and r["bound_rhs"] == pytest.approx(0.9396, abs=2e-3)


def test_cool_xu(capsys):
    code, out, _ = run(capsys, "cool", "--model", "xu", "--s", "1.5708", "--gamma", "0",
                       "--temp", "1")
    assert json.loads(out)["p_c"] == pytest.approx(1, abs=1e-9)


def test_cool_repeated(capsys):
    code, out, _ = run(capsys, "cool", "--model", "toy", "--repeated", "4", "--seed", "3")
    reports = [CoolingReport.from_dict(d) for d in json.loads(out)]
    assert len(reports) == 4


def test_cool_vanishing_postselection_exit_code(capsys):
    code, out, err = run(capsys, "cool", "--model", "xu", "--s", "0",
                         "--gamma", repr(-math.pi / 2))
    assert code == 3 and "vanishing" in err


def test_count_params(capsys):
    _, out, _ = run(capsys, "count-params", "-n", "2", "-m", "2")
    d = json.loads(out)
    assert (d["constraints"], d["free_u"], d["free_h"]) == (4, 12, 22)
    assert d["nm_squared"] == 16 and d["free_h_exceeds_nm_squared"] is True
    assert json.loads(run(capsys, "count-params", "-n", "3", "-m", "2")[1])["constraints"] == 12
    assert json.loads(run(capsys, "count-params", "-n", "2", "-m", "3")[1])["free_h"] == 60
    assert run(capsys, "count-params", "-n", "1", "-m", "2")[0] == 2


def test_config_file_with_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.ini"
    cfg.write_text("model = jc\ng = 0.2\nt = 10\ntemp = 1\n")
    _, out, _ = run(capsys, "cool", "--config", str(cfg), "--t", "150")
    r = json.loads(out)
    assert r["measure_time"] == 150.0 and r["p_c"] >= 0.93


def test_config_errors_report_lines(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("model = toy\ntemp = warm\n")
    code, _, err = run(capsys, "cool", "--config", str(cfg))
    assert code == 2 and "line 2" in err
    cfg.write_text("model = toy\nthis line is broken\n")
    code, _, err = run(capsys, "cool", "--config", str(cfg))
    assert code == 2 and "line 2" in err
    cfg.write_text("model = toy\nflux = 3\n")
    code, _, err = run(capsys, "cool", "--config", str(cfg))
    assert code == 2 and "unknown key" in err
    code, _, _ = run(capsys, "cool", "--config", str(tmp_path / "missing.ini"))
    assert code == 2


def test_invalid_flags_exit_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["scan-f", "--model", "nonsense"])
    assert exc.value.code != 0
    assert "usage" in capsys.readouterr().err
    assert run(capsys, "scan-f", "--t-min", "5", "--t-max", "1")[0] == 2


def test_verify_subcommand(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    assert out.count("PASS") == len(out.splitlines())


@pytest.mark.parametrize("sub", ["scan-f", "cool", "count-params", "verify"])
def test_help(sub):
    proc = subprocess.run([sys.executable, "-m", "osmgsc.cli", sub, "--help"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "usage" in proc.stdout
