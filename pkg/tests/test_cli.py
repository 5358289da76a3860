import json
import subprocess
import sys

import pytest

from lgexp.cli import fmt, main, parse_poly

TABLE1 = [
    "1.000000e-02,7.418599e-12,7.418606e-12,thm2_eps1",
    "1.000000e-01,5.422462e-10,5.422471e-10,thm2_eps1",
    "1.000000e+00,6.181248e-09,6.182216e-09,thm2_eps1",
    "1.000000e+01,2.479971e-10,2.492662e-10,thm2_eps1",
    "1.000000e+02,2.475525e-10,2.488244e-10,thm2_eps1",
]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    assert fmt(0.000123456789) == "1.234568e-04"
    assert fmt(5) == "5" and fmt(None) == "" and fmt("x") == "x"
    assert fmt(2.0, 3) == "2.00e+00"


def test_parse_poly():
    p = parse_poly("x**2/4 - 1")
    assert str(p) == "-1 + (1/4)*x^2"
    with pytest.raises(ValueError):
        parse_poly("sin(x)")
    with pytest.raises(ValueError):
        parse_poly("x*y")


def test_table_rows(capsys):
    code, out, _ = run(capsys, "bessel", "table", "--nu", "20", "--n", "5", "--r", "5", "--z", "0.01,0.1,1,10,100")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# ") and lines[1] == "z,eta_abs,bound,formula"
    assert lines[2:] == TABLE1


def test_table2_row(capsys):
    code, out, _ = run(capsys, "bessel", "table", "--nu", "20", "--n", "5", "--r", "0", "--z", "1")
    assert code == 0
    z, eta, bound, formula = out.splitlines()[-1].split(",")
    assert f"{float(bound):.2e}" == "4.15e-08" and formula == "thm1_eps1"


def test_coeffs_json(capsys):
    code, out, _ = run(capsys, "bessel", "coeffs", "--N", "2")
    obj = json.loads(out)
    assert code == 0
    assert obj["E"][0]["coeffs"] == ["0/1", "1/8", "0/1", "-5/24"]
    assert obj["Etilde_text"][0] == "(1/8)*p + (-5/24)*p^3"
    assert obj["k"] == ["-1/12", "0/1"]


def test_generic_coeffs(capsys):
    code, out, _ = run(capsys, "coeffs", "--psi", "2*x", "--N", "2")
    obj = json.loads(out)
    assert code == 0 and obj["F"][0]["coeffs"] == ["0/1", "1/1"]
    assert obj["F"][1]["coeffs"] == ["-1/2"]
    code, out, _ = run(capsys, "coeffs", "--model", "jet", "--psi", "0,2,0", "--N", "2")
    assert code == 0 and json.loads(out)["model"] == "jet"
    code, _, err = run(capsys, "coeffs", "--model", "jet", "--psi", "1", "--N", "3")
    assert code == 2 and "N=3" in err


def test_figure_csv_and_plot(capsys, tmp_path):
    png = tmp_path / "omega.png"
    code, out, _ = run(capsys, "bessel", "figure", "--diag", "omega", "--nu", "20", "--n", "5", "--samples", "8", "--plot", str(png))
    assert code == 0
    lines = out.splitlines()
    assert lines[1] == "p,omega" and len(lines) == 10
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"


def test_table_plot_and_file_output(capsys, tmp_path):
    csv, png = tmp_path / "t.csv", tmp_path / "t.png"
    code, out, _ = run(capsys, "bessel", "table", "--z", "1,10", "--plot", str(png), "-o", str(csv))
    assert code == 0 and out == ""
    assert csv.read_text().splitlines()[1] == "z,eta_abs,bound,formula"
    assert png.stat().st_size > 1000


def test_bound_bessel(capsys):
    code, out, _ = run(capsys, "bound", "--z", "1", "--n", "5", "--exact")
    obj = json.loads(out)
    assert code == 0 and obj["formula_used"] == "thm1_eps1"
    assert obj["bound"] >= obj["exact_error"]
    assert obj["delta_exp"] > obj["bound"]


def test_bound_poly(capsys, tmp_path):
    path = tmp_path / "path.json"
    path.write_text(json.dumps({"u": [7, 0], "j": 1, "arcs": [{"from": [-1, 0], "to": [1, 0]}]}))
    code, out, _ = run(capsys, "bound", "--model", "poly", "--psi", "3*(1-x**2)/2", "--u", "7", "--n", "1", "--path", str(path))
    obj = json.loads(out)
    assert code == 0
    assert obj["int_abs_chi"] == pytest.approx(2.0)
    code, _, err = run(capsys, "bound", "--model", "poly", "--psi", "3*(1-x**2)/2", "--u", "7", "--n", "1", "--r", "1", "--path", str(path))
    assert code == 2 and "r = 0" in err


def test_exit_codes(capsys, tmp_path):
    # kappa >= 1: the exponent-form bound is unavailable
    code, _, err = run(capsys, "bound", "--nu", "0.1", "--z", "1", "--n", "3")
    assert code == 3 and "kappa < 1" in err
    code, _, err = run(capsys, "bessel", "table", "--r", "-1")
    assert code == 2 and "r >= 0" in err
    with pytest.raises(SystemExit) as exc:
        main(["bessel", "table", "--bogus"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["bessel", "table", "--nu", "-3"])
    assert exc.value.code == 2
    code, _, err = run(capsys, "bound", "--z", "1", "--n", "4", "--exact", "--digits", "10")
    assert code == 3 and "precision" in err
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"u": [1, 0], "j": 1, "arcs": [{"from": [1, 0], "to": [-1, 0]}]}))
    code, _, err = run(capsys, "bound", "--model", "poly", "--psi", "x", "--u", "1", "--n", "1", "--path", str(path))
    assert code == 2 and "progressive" in err
    code, _, err = run(capsys, "bessel", "table", "--z", "1", "-o", str(tmp_path / "missing" / "x.csv"))
    assert code == 2


def test_nonhomog_demo(capsys):
    code, out, _ = run(capsys, "nonhomog", "demo", "--u", "5,10", "--n", "2")
    lines = out.splitlines()
    assert code == 0 and lines[1] == "u,n,r,exact_error,bound_82,bound_88"
    assert lines[2] == "5.000000e+00,1,1,4.040404e-04,6.084381e-04,4.060844e-04"
    assert len(lines) == 6


def test_oracle_command(capsys, monkeypatch):
    code, out, _ = run(capsys, "oracle", "besseli", "--nu", "20", "--x", "20", "--digits", "50")
    assert code == 0 and out.startswith("3.18875032885361480155313050690234787255632519148")
    monkeypatch.setenv("LG_PRECISION_DIGITS", "20")
    code, out, _ = run(capsys, "oracle", "besselk", "--nu", "0.5", "--x", "1")
    assert code == 0 and len(out.strip().split("e")[0].replace(".", "")) == 20


def test_byte_identical_runs(tmp_path):
    outs = []
    for i in range(2):
        csv, png = tmp_path / f"a{i}.csv", tmp_path / f"a{i}.png"
        subprocess.run(
            [sys.executable, "-m", "lgexp", "bessel", "figure", "--samples", "32", "--plot", str(png), "-o", str(csv)],
            check=True,
        )
        outs.append((csv.read_bytes(), png.read_bytes()))
    assert outs[0] == outs[1]
