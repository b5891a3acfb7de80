import csv
import io
import json

import pytest

from cvqkd_mcf import cli, noise
from cvqkd_mcf.config import ConfigError, RunConfig, parse_config_text
from cvqkd_mcf.noise import CrosstalkModel, PowerNoisePoint, WavelengthNoiseTable


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def wavelength_csv(tmp_path):
    path = tmp_path / "wl.csv"
    noise.write_wavelength_csv(path, WavelengthNoiseTable(
        (1537.0, 1545.0, 1550.35, 1555.0, 1563.0), (0.02, 0.02, 2.0, 0.02, 0.02), 12.2))
    return path


@pytest.fixture
def power_csv(tmp_path):
    model = CrosstalkModel(0.002, 1.5)
    path = tmp_path / "power.csv"
    noise.write_power_csv(path, [PowerNoisePoint(p, model(p)) for p in (-30.0, -25.0, -20.0, -15.0, -10.0)])
    return path


def test_skr_reference_defaults(capsys):
    code, out, _ = run(capsys, "skr")
    assert code == 0
    report = json.loads(out)
    combos = {(r["attack"], r["beta"]) for r in report["results"]}
    assert combos == {("collective", 1.0), ("collective", 0.898), ("individual", 1.0), ("individual", 0.898)}
    assert report["noise"]["chi_line_snu"] == pytest.approx(4.0)
    for r in report["results"]:
        assert r["skr_per_symbol"] == pytest.approx(r["beta"] * r["i_ab"] - r["leak_eve"], abs=1e-15)
        assert r["skr_bps"] == pytest.approx(r["skr_per_symbol"] * 1e9)
        assert len(r["eigen"]["lambdas"]) == 4


def test_skr_lossless_link_has_zero_leakage(capsys):
    code, out, _ = run(capsys, "skr", "--link.t", "1", "--link.eta", "1", "--link.nu_el_snu", "0",
                       "--protocol.v_a_snu", "4")
    assert code == 0
    for r in json.loads(out)["results"]:
        assert r["leak_eve"] == 0.0
        assert r["chi_be"] == 0.0 and r["i_be"] == 0.0


def test_skr_large_excess_noise_reports_no_key(capsys):
    code, out, _ = run(capsys, "skr", "--link.eps_snu", "1.0", "--protocol.v_a_snu", "10")
    assert code == 0
    for r in json.loads(out)["results"]:
        assert r["skr_per_symbol"] < 0.0
        assert r["skr_bps"] == 0.0
        assert r["positive_key"] is False


def test_validation_errors_exit_2(capsys):
    code, _, err = run(capsys, "skr", "--link.t", "0")
    assert code == 2 and "[link]" in err and "t must" in err
    code, _, err = run(capsys, "skr", "--set", "link.bogus=1")
    assert code == 2 and "link.bogus" in err
    code, _, err = run(capsys, "skr", "--link.t", "abc")
    assert code == 2 and "link.t" in err


def test_plan_reference_numbers(capsys):
    code, out, _ = run(capsys, "plan", "--plan.per_channel_skr_bps", "46e6", "--output.include_slots", "false")
    assert code == 0
    report = json.loads(out)
    assert report["plan"]["channels"] == 341 and report["plan"]["bands"] == 31
    assert report["skr_per_core_bps"] == pytest.approx(15.686e9)
    assert report["plan"]["aggregate_skr_bps"] == pytest.approx(94.116e9)
    assert report["plan"]["classical_bps"] == pytest.approx(17.64e12)


def test_plan_small_grids(capsys):
    _, out, _ = run(capsys, "plan", "--grid.n_channels", "2", "--plan.per_channel_skr_bps", "1")
    assert json.loads(out)["plan"]["bands"] == 3
    _, out, _ = run(capsys, "plan", "--grid.spacing_ghz", "50", "--plan.per_channel_skr_bps", "1")
    assert json.loads(out)["plan"]["slots_per_band"] == 5


def test_plan_infeasible_link_exit_3(capsys):
    code, _, err = run(capsys, "plan", "--link.eps_snu", "2.0")
    assert code == 3 and "infeasible" in err


def test_plan_table_mode(capsys, wavelength_csv):
    code, out, _ = run(capsys, "plan", "--input.wavelength_csv", str(wavelength_csv),
                       "--protocol.v_a_snu", "3")
    assert code == 0
    report = json.loads(out)
    assert report["rate_source"] == "wavelength_table"
    assert len(report["slot_skr_bps"]) == 341
    assert report["skr_per_core_bps"] == pytest.approx(sum(report["slot_skr_bps"]))


def test_sweep_wavelength_csv(capsys, wavelength_csv, tmp_path):
    summary = tmp_path / "summary.json"
    code, out, _ = run(capsys, "sweep", "--axis", "wavelength", "--input.wavelength_csv", str(wavelength_csv),
                       "--output.summary_path", str(summary))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [float(r["wavelength_nm"]) for r in rows] == [1537.0, 1545.0, 1550.35, 1555.0, 1563.0]
    assert float(rows[2]["skr_coll_beta_bps"]) == 0.0
    s = json.loads(summary.read_text())
    assert s["summary"]["skr_coll_beta_bps"]["n_positive"] == 4


def test_sweep_uniform_table_constant_columns(capsys, tmp_path):
    path = tmp_path / "u.csv"
    noise.write_wavelength_csv(path, WavelengthNoiseTable((1540.0, 1550.0, 1560.0), (0.03,) * 3, 12.2))
    _, out, _ = run(capsys, "sweep", "--axis", "wavelength", "--input.wavelength_csv", str(path))
    rows = list(csv.DictReader(io.StringIO(out)))
    for col in ("skr_coll_ideal_bps", "skr_ind_ideal_bps", "skr_coll_beta_bps", "skr_ind_beta_bps"):
        assert len({r[col] for r in rows}) == 1


def test_sweep_power_model_monotone(capsys):
    code, out, _ = run(capsys, "sweep", "--axis", "power", "--model.eps_floor_snu", "0.005",
                       "--model.k_xt_snu_per_mw", "2", "--sweep.power_step_db", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["power_dbm", "eps_snu", "skr_coll_ideal_bps", "skr_ind_ideal_bps",
                             "skr_coll_beta_bps", "skr_ind_beta_bps"]
    for col in ("skr_coll_beta_bps", "skr_ind_beta_bps"):
        values = [float(r[col]) for r in rows]
        assert all(b <= a + 1e-6 for a, b in zip(values, values[1:]))


def test_sweep_missing_file_names_path(capsys, tmp_path):
    missing = tmp_path / "nope.csv"
    code, _, err = run(capsys, "sweep", "--axis", "wavelength", "--input.wavelength_csv", str(missing))
    assert code == 2 and str(missing) in err


def test_fit_command(capsys, power_csv):
    code, out, _ = run(capsys, "fit", "--input.power_csv", str(power_csv), "--run.attacks", "individual")
    assert code == 0
    report = json.loads(out)
    assert report["model"]["eps_floor_snu"] == pytest.approx(0.002, rel=1e-8)
    assert report["model"]["k_xt_snu_per_mw"] == pytest.approx(1.5, rel=1e-8)
    assert {r["beta"] for r in report["max_launch_power"]} == {1.0, 0.898}
    for r in report["max_launch_power"]:
        assert r["max_launch_power_dbm"] < 0.0


def test_fit_power_independent_model_reports_flag(capsys, tmp_path):
    path = tmp_path / "flat.csv"
    noise.write_power_csv(path, [PowerNoisePoint(-20.0, 0.01), PowerNoisePoint(-10.0, 0.01)])
    _, out, _ = run(capsys, "fit", "--input.power_csv", str(path))
    for r in json.loads(out)["max_launch_power"]:
        assert r["power_independent"] is True and r["max_launch_power_dbm"] is None


def test_fit_infeasible_floor_exit_3(capsys, tmp_path):
    path = tmp_path / "loud.csv"
    noise.write_power_csv(path, [PowerNoisePoint(-20.0, 3.0), PowerNoisePoint(-10.0, 3.5)])
    code, _, _ = run(capsys, "fit", "--input.power_csv", str(path))
    assert code == 3


def test_calibrate_sim(capsys):
    code, out, _ = run(capsys, "calibrate-sim", "--calib.n_samples", "200000", "--calib.eps_planted_snu", "0.1",
                       "--link.t", "0.9", "--link.eta", "0.9", "--run.seed", "4")
    assert code == 0
    report = json.loads(out)
    eps = report["eps_snu"]
    assert abs(eps["estimated"] - eps["planted"]) < 3 * eps["stderr"]
    assert set(report) >= {"nu_el_snu", "n0", "eps_snu", "stage_variances"}


@pytest.mark.parametrize("argv", [
    ("skr",),
    ("plan",),
    ("calibrate-sim", "--calib.n_samples", "10000"),
    ("sweep", "--axis", "power", "--model.k_xt_snu_per_mw", "1", "--sweep.power_step_db", "5"),
])
def test_outputs_byte_identical(tmp_path, argv):
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main([*argv, "-o", str(a)]) == 0
    assert cli.main([*argv, "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_and_override_precedence(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# test\nlink.t = 0.45\nprotocol.beta = 0.9  # comment\nqkd.max_slots_per_band = none\n")
    cfg = RunConfig.from_sources(path, {"link.t": "0.3"})
    assert cfg.link().t == 0.3
    assert cfg.beta == 0.9
    assert cfg["qkd.max_slots_per_band"] is None


@pytest.mark.parametrize("text", ["link.t 0.2", "nosuch.key = 1"])
def test_config_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_nonfinite_output_is_refused():
    with pytest.raises(AssertionError):
        cli.dumps({"x": float("inf")})
