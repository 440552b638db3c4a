import csv
import json
import math

import pytest

from oscifit.cli import EXIT_NUMERICAL, EXIT_USAGE, main, parse_grid, write_trajectory_csv
from oscifit.coefficients import coefficients_for
from oscifit.integrator import IntegrationConfig, integrate
from oscifit.problems import harmonic_problem


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


@pytest.fixture
def out_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("OSCIFIT_OUT_DIR", str(tmp_path))
    return tmp_path


def test_parse_grid():
    assert parse_grid("0.3") == [0.3]
    assert parse_grid("0.1, 0.2") == [0.1, 0.2]
    assert parse_grid("0:0.2:0.05") == [0.0, 0.05, 0.1, 0.15, 0.2]


def test_coeffs_classical_rows(out_dir):
    assert main(["coeffs", "--scheme", "C", "--v0", "0:1:0.25"]) == 0
    rows = read_rows(out_dir / "coeffs.csv")
    assert len(rows) == 5
    for r in rows:
        assert float(r["b0"]) == 1 / 12 and float(r["b1"]) == 5 / 6 and float(r["a"]) == 0


def test_coeffs_zero_frequency_is_classical(out_dir):
    main(["coeffs", "--v0", "0"])
    for r in read_rows(out_dir / "coeffs.csv"):
        assert (float(r["b0"]), float(r["b1"]), float(r["a"])) == (1 / 12, 5 / 6, 0.0)


def test_coeffs_roundtrip(out_dir):
    main(["coeffs", "--scheme", "S", "--v0", "0.3", "--out", "s.csv"])
    (row,) = read_rows(out_dir / "s.csv")
    c = coefficients_for("S", 0.3)
    assert (float(row["b0"]), float(row["b1"]), float(row["a"])) == c.as_tuple()


def test_coeffs_manifest(out_dir):
    main(["coeffs", "--scheme", "T,SD", "--v0", "0.5"])
    manifest = json.loads((out_dir / "coeffs.manifest.json").read_text())
    assert manifest["subcommand"] == "coeffs"
    assert manifest["parameters"]["schemes"] == ["T", "SD"]
    assert manifest["artifacts"] == [str(out_dir / "coeffs.csv")]
    assert "timestamp" in manifest and "version" in manifest


def test_coeffs_out_of_range_exit(out_dir, capsys):
    assert main(["coeffs", "--scheme", "S", "--v0", "2.5"]) == EXIT_NUMERICAL
    assert "outside" in capsys.readouterr().err


def test_invalid_arguments_exit_2(out_dir):
    with pytest.raises(SystemExit) as info:
        main(["coeffs", "--scheme", "X"])
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        main(["verify-series", "--order", "20"])
    assert info.value.code == EXIT_USAGE


def test_phaselag_rows(out_dir):
    main(["phaselag", "--v0", "0.6", "--u-grid", "0.55,0.6,0.65,3.0"])
    rows = read_rows(out_dir / "phaselag.csv")
    assert len(rows) == 16
    at_v0 = {r["scheme"]: float(r["phase_lag"]) for r in rows if float(r["u"]) == 0.6}
    for s in ("T", "S", "SD"):
        assert abs(at_v0[s]) < 1e-10
    assert abs(at_v0["C"]) > 1e-5
    flagged = [r for r in rows if r["in_periodicity"] == "false"]
    assert flagged and all(r["phase_lag"] == "nan" for r in flagged)

    near = [r for r in rows if abs(float(r["u"]) - 0.6) == pytest.approx(0.05)]
    for u in {r["u"] for r in near}:
        lag = {r["scheme"]: abs(float(r["phase_lag"])) for r in near if r["u"] == u}
        assert lag["SD"] <= lag["S"] <= lag["T"]


def test_phaselag_classical_independent_of_v0(tmp_path):
    main(["phaselag", "--scheme", "C", "--v0", "0.2", "--out", str(tmp_path / "a.csv")])
    main(["phaselag", "--scheme", "C", "--v0", "1.4", "--out", str(tmp_path / "b.csv")])
    a = [r["phase_lag"] for r in read_rows(tmp_path / "a.csv")]
    b = [r["phase_lag"] for r in read_rows(tmp_path / "b.csv")]
    assert a == b


def test_kepler_circular_trig_fit(out_dir):
    assert main(["kepler", "--eccentricity", "0", "--t-end", "50", "--scheme", "T,C"]) == 0
    summary = {r["scheme"]: r for r in read_rows(out_dir / "kepler_summary.csv")}
    assert float(summary["T"]["max_error"]) < 1e-11
    assert float(summary["C"]["max_error"]) > 1e-6
    rows = read_rows(out_dir / "kepler.csv")
    assert len(rows) == 500
    assert list(rows[0]) == ["t", "error_T", "error_C"]


def test_kepler_zero_length(out_dir):
    assert main(["kepler", "--t-end", "0"]) == 0
    assert read_rows(out_dir / "kepler.csv") == []
    summary = read_rows(out_dir / "kepler_summary.csv")
    assert len(summary) == 4
    assert all(r["status"] == "zero_steps" and r["num_steps"] == "0" for r in summary)


def test_kepler_trajectories_and_fixed_mode(out_dir):
    args = ["kepler", "--t-end", "2", "--scheme", "S", "--frequency-mode", "fixed", "--trajectories"]
    assert main(args) == 0
    traj = read_rows(out_dir / "kepler_traj_S.csv")
    assert len(traj) == 21
    assert set(traj[0]) == {"t", "y0", "y1", "error"}
    last = (out_dir / "kepler_traj_S.csv").read_text().splitlines()[-1]
    assert last.startswith("# scheme=S,h=0.10000000000000001,mean_error=")


def test_kepler_rejects_bad_eccentricity(out_dir):
    assert main(["kepler", "--eccentricity", "0.95", "--t-end", "1"]) == EXIT_USAGE


def test_sensitivity_rows_and_determinism(out_dir):
    main(["sensitivity", "--v0", "0.5", "--out", "a.csv"])
    main(["sensitivity", "--v0", "0.5", "--out", "b.csv"])
    body_a = (out_dir / "a.csv").read_bytes()
    assert body_a == (out_dir / "b.csv").read_bytes()
    rows = {r["scheme"]: r for r in read_rows(out_dir / "a.csv")}
    for scheme, expected in (("T", 1.0), ("S", 2.0), ("SD", 3.0)):
        assert abs(float(rows[scheme]["slope"]) - expected) <= 0.15
        assert rows[scheme]["slope_applicable"] == "true"
    assert rows["C"]["expected_slope"] == "NA"
    assert rows["C"]["slope_applicable"] == "false"


def test_verify_series(out_dir, capsys):
    assert main(["verify-series"]) == 0
    rows = read_rows(out_dir / "verify_series.csv")

    def find(scheme, coef, power):
        return next(
            r for r in rows
            if r["scheme"] == scheme and r["coefficient"] == coef and r["power"] == str(power)
        )

    r = find("S", "b1", 4)
    assert (r["derived"], r["printed"], r["match"]) == ("5/2016", "5/2016", "match")
    r = find("SD", "a", 6)
    assert (r["derived"], r["printed"], r["match"]) == ("-1/240", "-1/240", "match")
    r = find("T", "b0", 2)
    assert (r["derived"], r["printed"], r["match"]) == ("1/240", "1/120", "mismatch")
    assert "PASS" in capsys.readouterr().out


def test_csv_format(out_dir):
    main(["coeffs", "--scheme", "T", "--v0", "0.7"])
    raw = (out_dir / "coeffs.csv").read_bytes()
    assert b"\r" not in raw
    value = raw.decode().splitlines()[1].split(",")[2]
    assert value == format(coefficients_for("T", 0.7).b0, ".17g")
    assert float(value) == coefficients_for("T", 0.7).b0


def test_write_trajectory_csv(tmp_path):
    p = harmonic_problem(1.0)
    traj = integrate(p, IntegrationConfig(h=0.1, num_steps=10, scheme="T", omega0=1.0))
    path = tmp_path / "traj.csv"
    write_trajectory_csv(traj, path)
    rows = read_rows(path)
    assert len(rows) == 11
    assert float(rows[10]["y0"]) == traj.states[10, 0]
    assert math.isclose(float(rows[10]["t"]), 1.0)
