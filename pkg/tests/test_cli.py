import json
import math
import shutil
import subprocess

import pytest

from kratzer_spectra import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("g2, rid", [("0.75", "R1"), ("0.1", "R2"), ("-0.25", "R3"),
                                     ("-1.25", "R4"), ("0", "R5")])
def test_classify(capsys, g2, rid):
    code, out, _ = run(capsys, "classify", "--g1", "-1", "--g2", g2, "--format", "json")
    assert code == 0
    assert json.loads(out)["range"] == rid


def test_classify_text_threshold(capsys):
    code, out, _ = run(capsys, "classify", "--g1", "1", "--g2", "-0.25")
    assert code == 0
    assert "range: R3" in out
    assert "threshold_angle:" in out


def test_usage_errors(capsys):
    assert run(capsys, "classify", "--g1", "1")[0] == 2
    assert run(capsys, "spectrum", "--g1", "-1", "--g2", "0.1")[0] == 2            # angle missing
    assert run(capsys, "spectrum", "--g1", "-1", "--g2", "0.75", "--angle", "0")[0] == 2
    assert run(capsys, "spectrum", "--g1", "-1", "--g2", "0.1", "--angle", "pi/")[0] == 2
    assert run(capsys, "verify", "--range", "R7")[0] == 2
    assert run(capsys, "classify", "--g1", "1", "--g2", "1", "--k0", "-1")[0] == 2


def test_parse_angle():
    assert cli.parse_angle("pi/2") == pytest.approx(math.pi / 2)
    assert cli.parse_angle("-3*pi/4") == pytest.approx(-3 * math.pi / 4)
    assert cli.parse_angle("0.25") == 0.25
    with pytest.raises(cli.UsageError):
        cli.parse_angle("__import__('os')")


def test_parse_grid():
    assert cli.parse_grid("0:1:3") == [0.0, 0.5, 1.0]
    assert cli.parse_grid("log:1:100:3") == pytest.approx([1, 10, 100])
    assert cli.parse_grid("1, 2,3") == [1.0, 2.0, 3.0]
    with pytest.raises(cli.UsageError):
        cli.parse_grid("a:b")


def test_spectrum_json_round_trip(capsys):
    argv = ["spectrum", "--g1", "-1", "--g2", "0.75", "--emin=-1", "--levels", "4",
            "--grid", "0.5,1,2", "--format", "json"]
    code, out, _ = run(capsys, *argv)
    assert code == 0
    rep = json.loads(out)
    assert [lv["energy"] for lv in rep["discrete"]] == [-1 / (3 + 2 * n) ** 2 for n in range(4)]
    assert all(d > 0 for d in rep["continuum"]["density"])
    assert run(capsys, *argv)[1] == out


def test_spectrum_out_files(capsys, tmp_path):
    prefix = str(tmp_path / "r2")
    code, _, _ = run(capsys, "spectrum", "--g1", "-1", "--g2", "0.1", "--angle", "0.3",
                     "--emin=-10", "--levels", "3", "--grid", "0.1:1:4", "--out", prefix)
    assert code == 0
    rep = json.loads(open(prefix + ".json").read())
    assert rep["range"] == "R2" and len(rep["discrete"]) == 3
    dens = open(prefix + "_density.csv").read().splitlines()
    assert dens[0] == "E,density" and len(dens) == 5
    levels = open(prefix + "_levels.csv").read().splitlines()
    assert levels[0] == "n,E,Q" and len(levels) == 4


def test_threshold_spectrum_reports_zero_mode(capsys):
    code, out, _ = run(capsys, "spectrum", "--g1", "1", "--g2", "-1.25",
                       "--angle", str(_threshold(1, -1.25)), "--grid", "0,1", "--format", "json")
    assert code == 0
    rep = json.loads(out)
    assert rep["zero_mode"] == pytest.approx(0.3, rel=1e-9)
    assert rep["continuum"]["energies"] == [1.0]


def _threshold(g1, g2):
    from kratzer_spectra import spectral
    from kratzer_spectra.model import CouplingParams
    return repr(spectral.threshold_param(CouplingParams(g1, g2)))


def test_profile(capsys):
    code, out, _ = run(capsys, "profile", "--g1", "-2", "--g2", "1", "--grid", "1,2")
    assert code == 0
    assert out.splitlines() == ["x,V", "1,-1", "2,-0.75"]


def test_eigenfunction_is_normalized(capsys):
    code, out, _ = run(capsys, "eigenfunction", "--g1", "-1", "--g2", "0.75", "--level", "1",
                       "--grid", "0.01:120:6000")
    assert code == 0
    rows = [tuple(map(float, r.split(","))) for r in out.splitlines()[1:]]
    h = rows[1][0] - rows[0][0]
    norm = sum(u * u for _, u in rows) * h
    assert norm == pytest.approx(1.0, abs=1e-3)
    assert run(capsys, "eigenfunction", "--g1", "-1", "--g2", "0.75", "--level", "200",
               "--emin=-1", "--levels", "3")[0] == 2


def test_green_grid_symmetric(capsys):
    code, out, _ = run(capsys, "green", "--g1", "-1", "--g2", "0", "--angle", "0.4",
                       "--W=-0.3+0.2j", "--grid", "0.5,1,2", "--format", "json")
    assert code == 0
    rows = {(r["x"], r["y"]): complex(r["re_G"], r["im_G"]) for r in json.loads(out)}
    for (x, y), g in rows.items():
        assert abs(g - rows[(y, x)]) < 1e-9 * abs(g)


def test_verify_passes_and_is_deterministic(capsys):
    code, out, _ = run(capsys, "verify", "--range", "1,R4", "--levels", "2")
    assert code == 0
    rep = json.loads(out)
    assert rep["pass"] and len(rep["checks"]) == 10
    assert {c["name"].split(".")[0] for c in rep["checks"]} == {"R1", "R4"}
    assert run(capsys, "verify", "--range", "1,R4", "--levels", "2")[1] == out


def test_verify_reports_failures(capsys):
    code, out, err = run(capsys, "verify", "--range", "R3", "--levels", "2", "--tol", "1e-30")
    assert code == 1
    assert not json.loads(out)["pass"]
    assert "FAILED R3.wronskian" in err


@pytest.mark.skipif(shutil.which("kratzer-spectra") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["kratzer-spectra", "classify", "--g1", "-1", "--g2", "2", "--format", "json"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["range"] == "R1"
