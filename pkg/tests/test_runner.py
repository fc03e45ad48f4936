import csv
import io
import math

import numpy as np
import pytest

from twocavity import runner
from twocavity.runner import (
    CSV_COLUMNS,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    ConfigError,
    SweepConfig,
    builtin_scenario,
    config_from_mapping,
    main,
    read_config_text,
    reduce_records,
    sweep_results,
)

T0_FIG2 = 250 * math.pi


def read_csv(path):
    with open(path) as fh:
        lines = fh.read().splitlines()
    comments = [l for l in lines if l.startswith("#")]
    rows = list(csv.DictReader(l for l in lines if not l.startswith("#")))
    return comments, rows


def column(rows, key):
    return np.array([float(r[key]) for r in rows])


def test_builtin_scenarios():
    fig2 = builtin_scenario("fig2")
    assert (fig2.params.delta_1, fig2.params.delta_small) == (20, 5)
    assert fig2.initial == ("g", 0, 2) and fig2.bell_target_m == 2
    assert fig2.grid.n_points == 1600 and fig2.grid.t_end == 1600
    fig3 = builtin_scenario("fig3")
    assert fig3.initial == ("g", 4, 0) and fig3.bell_target_m == 4 and fig3.params.n_max == 4
    fig6 = builtin_scenario("fig6")
    assert fig6.params.kappa == 0.005 and fig6.params.delta_1 == 8 and fig6.params.delta_small == 3
    assert fig6.lindblad and fig6.grid.n_points == 800 and fig6.grid.t_end == 160
    fig7 = builtin_scenario("fig7")
    assert fig7.initial == ("g", 4, 0) and fig7.params.kappa == 0.005
    for name in ("fig4", "fig5"):
        assert not builtin_scenario(name).lindblad
    with pytest.raises(ConfigError):
        builtin_scenario("fig9")


def test_run_fig2_csv(tmp_path):
    out = tmp_path / "fig2.csv"
    assert runner.run(builtin_scenario("fig2"), str(out)) == EXIT_OK
    comments, rows = read_csv(out)
    assert any("Delta_over_delta" in c for c in comments)
    assert list(rows[0].keys()) == list(CSV_COLUMNS)
    assert len(rows) == 1600
    fid = column(rows, "bell_fidelity")
    t = column(rows, "t")
    assert fid.max() >= 0.999
    # "near" T0: the full model peaks ~2.8% late on this grid
    assert abs(t[fid.argmax()] - T0_FIG2) / T0_FIG2 < 0.05
    assert rows[0]["P_40"] == "" and rows[0]["trace"] == ""


def test_run_rejects_small_truncation(tmp_path):
    with pytest.raises(ConfigError):
        config_from_mapping({"scenario": "fig2", "n_max": "1"})
    assert main(["simulate", "--scenario", "fig2", "--n-max", "1", "--out", str(tmp_path / "x")]) == EXIT_CONFIG


def test_run_fig6_trace(tmp_path):
    out = tmp_path / "fig6.csv"
    assert runner.run(builtin_scenario("fig6"), str(out)) == EXIT_OK
    _, rows = read_csv(out)
    trace = column(rows, "trace")
    assert np.all(np.abs(trace - 1) <= 1e-6)


def test_numerical_violation_exit_code(tmp_path, capsys):
    config = config_from_mapping({"scenario": "fig4", "kappa": "2.0", "step": "5.0", "t_end": "50",
                                  "n_points": "6"})
    assert runner.run(config, str(tmp_path / "bad.csv")) == EXIT_NUMERICAL
    err = capsys.readouterr().err
    assert "trace" in err or "positivity" in err


def test_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    config = config_from_mapping({"scenario": "fig4", "n_points": "200"})
    runner.run(config, str(a))
    runner.run(config, str(b))
    assert a.read_bytes() == b.read_bytes()


def test_config_text_and_overrides(tmp_path):
    text = """
    # the Fig. 4 setup with a different truncation
    scenario = fig4
    hamiltonian = effective
    kappa = 0.001   # weak loss
    n_points = 100
    """
    values = read_config_text(text)
    config = config_from_mapping(values)
    assert config.hamiltonian == "effective" and config.params.kappa == 0.001
    assert config.lindblad and config.params.n_max == 2

    path = tmp_path / "c.cfg"
    path.write_text(text)
    out = tmp_path / "c.csv"
    assert main(["simulate", "--config", str(path), "--kappa", "0", "--out", str(out)]) == EXIT_OK
    comments, rows = read_csv(out)
    assert any("kappa = 0.0" in c for c in comments)
    assert rows[0]["trace"] == ""
    assert float(rows[0]["p_ground"]) == 1.0


@pytest.mark.parametrize("values", [
    {"bogus": "1"},
    {"hamiltonian": "quartic"},
    {"delta1": "abc"},
    {"delta_small": "0"},
    {"hamiltonian": "two_photon", "delta2": "-20"},
    {"atom": "i1", "hamiltonian": "two_photon"},
    {"bell_m": "5"},
    {"n_points": "1"},
])
def test_config_errors(values):
    with pytest.raises(ConfigError):
        config = config_from_mapping(values)
        runner.simulate(config)


def test_two_photon_excited_start_defaults_truncation():
    config = config_from_mapping({"hamiltonian": "two_photon", "atom": "e", "m": "0", "n": "0",
                                  "bell_m": "none"})
    assert config.params.n_max == 2
    _, records = runner.simulate(config)
    assert records[0].p_ground == pytest.approx(0, abs=1e-30)


def test_validate_command(capsys, tmp_path):
    assert main(["validate", "--scenario", "fig4"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "Delta_over_delta = 2.66667 (FAIL)" in out
    assert "adiabatic = False" in out
    assert main(["validate", "--config", str(tmp_path / "missing.cfg")]) == EXIT_CONFIG


def test_sweep_single_value_matches_run(fig_run):
    base = builtin_scenario("fig4")
    sweep = SweepConfig(base, "delta_small", (3.0,), "peak_fidelity")
    (value, result, status), = sweep_results(sweep, workers=1)
    _, records = runner.simulate(base)
    assert status == "ok" and result == reduce_records(records, "peak_fidelity")


def test_sweep_failed_point_does_not_abort(tmp_path):
    base = config_from_mapping({"scenario": "fig4", "n_points": "100"})
    sweep = SweepConfig(base, "delta_small", (3.0, 0.0, 2.0), "peak_entropy")
    results = sweep_results(sweep, workers=2)
    assert [r[0] for r in results] == [0.0, 2.0, 3.0]
    assert results[0][2].startswith("failed")
    assert [r[2] for r in results[1:]] == ["ok", "ok"]


def test_sweep_parallel_matches_serial():
    base = config_from_mapping({"scenario": "fig4", "n_points": "100"})
    sweep = SweepConfig(base, "delta", (12.0, 8.0, 10.0), "time_of_peak")
    assert sweep_results(sweep, workers=3) == sweep_results(sweep, workers=1)


def test_sweep_cli(tmp_path):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("scenario = fig4\nn_points = 100\naxis = delta_small\nvalues = 3, 4\nreduction = peak_fidelity\n")
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    _, rows = read_csv(out)
    assert [r["delta_small"] for r in rows] == ["3.0", "4.0"]
    assert all(r["status"] == "ok" for r in rows)
    cfg.write_text("scenario = fig4\naxis = omega\nvalues = 1\nreduction = peak_fidelity\n")
    assert main(["sweep", "--config", str(cfg)]) == EXIT_CONFIG


def test_sweep_workers_env(monkeypatch):
    monkeypatch.setenv(runner.WORKERS_ENV, "3")
    assert runner.sweep_workers() == 3
    monkeypatch.setenv(runner.WORKERS_ENV, "junk")
    assert runner.sweep_workers() >= 1


def _kappa_sweep():
    base = builtin_scenario("fig6")
    sweep = SweepConfig(base, "kappa", (0.0, 0.001, 0.005), "peak_entropy")
    return [r[1] for r in sweep_results(sweep)]


@pytest.fixture(scope="module")
def kappa_peaks():
    return _kappa_sweep()


@pytest.mark.xfail(strict=True, reason="mode-a entropy of the decayed mixed state grows with kappa")
def test_kappa_sweep_peak_entropy_non_increasing(kappa_peaks):
    assert kappa_peaks[0] >= kappa_peaks[1] >= kappa_peaks[2]


def test_kappa_sweep_peak_entropy_exceeds_closed_system(kappa_peaks):
    assert kappa_peaks[1] > kappa_peaks[0] and kappa_peaks[2] > kappa_peaks[0]


@pytest.fixture(scope="module")
def delta_peaks():
    base = builtin_scenario("fig2")
    sweep = SweepConfig(base, "delta", (8.0, 20.0), "time_of_peak")
    out = {}
    for value, t_peak, status in sweep_results(sweep):
        T0 = base.params.delta_small * math.pi * value**2 / 8
        out[value] = abs(t_peak - T0) / T0
    return out


def test_delta_sweep_time_of_peak_non_adiabatic(delta_peaks):
    assert delta_peaks[8.0] <= 0.05


@pytest.mark.xfail(strict=True, reason="at Delta=20 the full-model peak sits ~2.8% after T0")
def test_delta_sweep_time_of_peak_adiabatic(delta_peaks):
    assert delta_peaks[20.0] <= 0.01
