import csv
import json
import math
import subprocess
import sys

import pytest

from wormcert.cli import EXIT_CONFIG, EXIT_FAIL, EXIT_OK, main


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_build_profile_writes_json(tmp_path, capsys):
    assert main(["build-profile", "--out", str(tmp_path)]) == EXIT_OK
    doc = json.loads((tmp_path / "profile.json").read_text())
    assert doc["alpha"] == 0.07
    assert doc["beta"] == pytest.approx(0.9991149844, abs=1e-9)
    assert "epsilon0" in capsys.readouterr().out


def test_build_profile_with_eta(tmp_path):
    assert main(["build-profile", "--eta", "5e-5", "--out", str(tmp_path)]) == EXIT_OK
    doc = json.loads((tmp_path / "profile.json").read_text())
    assert doc["eta"] == 5e-5 and doc["gamma"] > 0


@pytest.mark.parametrize("argv", [
    ["build-profile", "--alpha", "0.2"],
    ["build-profile", "--extension-c", "0"],
    ["build-profile", "--blend-width", "0.1"],
    ["build-profile", "--eta", "0.01"],
    ["annuli", "--eps", "1e-3"],
    ["annuli", "--s", "0.5"],
    ["annuli", "--grid-scale", "0"],
    ["annuli", "--profile", "/nonexistent/profile.json"],
    ["slice", "--kind", "radial", "--z-range", "0,2"],
    ["slice", "--abs-z", "0"],
    ["slice", "--delta", "1.5"],
    ["no-such-command"],
])
def test_config_errors_exit_2(tmp_path, argv, capsys):
    assert main(argv + (["--out", str(tmp_path)] if argv[0] != "no-such-command" else [])) \
        == EXIT_CONFIG
    capsys.readouterr()


def test_corrupt_profile_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["annuli", "--profile", str(bad), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_saved_profile_is_reusable(tmp_path):
    assert main(["build-profile", "--out", str(tmp_path)]) == EXIT_OK
    out = tmp_path / "run"
    assert main(["annuli", "--profile", str(tmp_path / "profile.json"), "--eps", "1e-8",
                 "--grid-scale", "0.25", "--out", str(out)]) == EXIT_OK
    doc = json.loads((out / "annuli.json").read_text())
    assert doc["pass"] is True and doc["params"]["eps_list"] == [1e-8]


def test_annuli_csv(tmp_path):
    assert main(["annuli", "--eps", "1e-7,1e-9", "--grid-scale", "0.25", "--format", "csv",
                 "--out", str(tmp_path)]) == EXIT_OK
    rows = _read_csv(tmp_path / "annuli.csv")
    assert rows[0] == ["check", "pass", "min_margin", "tolerance"]
    assert rows[1][0] == "annuli" and rows[1][1] == "True"
    assert any(r[0] == "annuli/annuli_eps_1e-09/circles" for r in rows)


def test_witness_command(tmp_path):
    assert main(["witness", "--grid-scale", "0.2", "--format", "csv", "--no-timing",
                 "--out", str(tmp_path)]) == EXIT_OK
    rows = _read_csv(tmp_path / "witness_table.csv")
    assert rows[0] == ["eps", "x_minus_pi", "rho", "distance", "ratio_s1", "ratio_s2", "ratio_s4"]
    assert len(rows) == 7
    doc = json.loads((tmp_path / "witness.json").read_text())
    assert doc["pass"] is True and "wall_time_s" not in doc


def test_crucial_estimate_command(tmp_path):
    assert main(["crucial-estimate", "--grid-scale", "0.25", "--out", str(tmp_path)]) == EXIT_OK
    doc = json.loads((tmp_path / "crucial_estimate.json").read_text())
    assert 0.24 < doc["details"]["d1"] < 0.25


def test_w_plane_slice(tmp_path):
    assert main(["slice", "--n", "21,21", "--out", str(tmp_path)]) == EXIT_OK
    rows = _read_csv(tmp_path / "slice_w-plane.csv")
    assert rows[0] == ["re_w", "im_w", "rho", "rho_delta_eta", "halfplane_margin", "in_D"]
    assert len(rows) == 1 + 21 * 21
    # at |z| = e^{pi/4} the slice of Omega is the unit disc about i
    centre = min(rows[1:], key=lambda r: float(r[0]) ** 2 + (float(r[1]) - 1.0) ** 2)
    assert float(centre[2]) == pytest.approx(-1.0, abs=0.02)


def test_radial_slice_to_stdout(capsys):
    assert main(["slice", "--kind", "radial", "--n", "5,4", "--w-angle", str(math.pi / 2),
                 "--out", "-"]) == EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0].startswith("abs_z,abs_w,rho")
    assert len(lines) == 21


def test_version(capsys):
    assert main(["--version"]) == EXIT_OK
    assert "0.1.0" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "wormcert", "slice", "--n", "2,2", "--out", "-"],
                         capture_output=True, text=True, timeout=300)
    assert res.returncode == EXIT_OK
    assert res.stdout.count("\n") == 5


def test_exit_codes_distinct():
    assert len({EXIT_OK, EXIT_FAIL, EXIT_CONFIG}) == 3
