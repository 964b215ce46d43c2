import math

import numpy as np
import pytest

from nrxx import cli
from nrxx.scenarios import (
    KN_PRIME_FACTOR,
    SHOCK_TUBE_T_END,
    ConfigError,
    ScenarioConfig,
    SolutionRecord,
    SolverBreakdown,
    initial_field,
    knudsen_convert,
    knudsen_prime,
    metadata_path,
    read_metadata,
    run_scenario,
)


# --- Knudsen conversion -----------------------------------------------------

def test_knudsen_example():
    assert knudsen_convert(0.001) == pytest.approx(7.8333e-4, rel=1e-4)
    # forward substitution
    assert knudsen_convert(0.001) * (8 / 5) * math.sqrt(2 / math.pi) == pytest.approx(0.001, rel=1e-14)


def test_knudsen_unit_case():
    assert knudsen_convert((8 / 5) * math.sqrt(2 / math.pi)) == pytest.approx(1.0, rel=1e-15)


@pytest.mark.parametrize("kn", [1e-6, 0.003, 0.5, 17.0])
def test_knudsen_round_trip(kn):
    assert knudsen_convert(knudsen_prime(kn)) == pytest.approx(kn, rel=4 * np.finfo(float).eps)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_knudsen_rejects_nonpositive(bad):
    with pytest.raises(ValueError):
        knudsen_convert(bad)


# --- configuration ------------------------------------------------------------

def test_config_defaults():
    cfg = ScenarioConfig()
    assert cfg.cfl == 0.95 and cfg.reconstruction and cfg.integrator == "rkc"
    assert cfg.knudsen == 0.5 and cfg.end_time == 0.4
    tube = ScenarioConfig(scenario="shock_tube")
    assert tube.knudsen == pytest.approx(0.001 / KN_PRIME_FACTOR)
    assert tube.end_time == pytest.approx(0.09291, abs=5e-6)


@pytest.mark.parametrize(
    "kwargs, match",
    [
        ({"kn": 0.1, "kn_prime": 0.1}, "either"),
        ({"kn": -1.0}, "positive"),
        ({"scenario": "vortex"}, "unknown scenario"),
        ({"integrator": "rk4"}, "integrator"),
        ({"cfl": 1.5}, "cfl"),
        ({"t_end": -0.1}, "t_end"),
        ({"N": 2}, "N >= 3"),
    ],
)
def test_config_rejects(kwargs, match):
    with pytest.raises(ConfigError, match=match):
        ScenarioConfig(**kwargs)


def test_config_file(tmp_path):
    path = tmp_path / "case.cfg"
    path.write_text(
        "# custom tube\n"
        "scenario = custom\n"
        "M = 4\nN = 60   # cells\n"
        "Kn = 0.02\n"
        "reconstruction = off\n"
        "u_l = 0.5\n"
        "u_r = 0.1, 0.2, 0.3\n"
        "grids = 10, 20\n"
    )
    cfg = ScenarioConfig.from_file(path, N=30)
    assert (cfg.scenario, cfg.M, cfg.N, cfg.kn, cfg.reconstruction) == ("custom", 4, 30, 0.02, False)
    assert cfg.u_l == (0.5, 0.0, 0.0) and cfg.u_r == (0.1, 0.2, 0.3)
    assert cfg.grids == (10, 20)


@pytest.mark.parametrize("text, match", [("colour = red\n", "unknown config key"), ("M 3\n", "key = value"),
                                         ("reconstruction = maybe\n", "boolean")])
def test_config_file_errors(tmp_path, text, match):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(ConfigError, match=match):
        ScenarioConfig.from_file(path)


def test_initial_states():
    f = initial_field(ScenarioConfig(N=40))
    x = f.grid.centers
    np.testing.assert_allclose(f.rho, 2 + 0.5 * np.cos(np.pi * x), rtol=1e-14)
    np.testing.assert_allclose(f.rho * f.theta, 1.0, rtol=1e-14)
    np.testing.assert_allclose(f.u[:, 1], 0.5 * np.sin(np.pi * x), atol=1e-15)
    # Maxwellian: nothing above degree 0 in the cell's own frame
    assert np.all(f.coeffs[:, 1:] == 0.0)
    tube = initial_field(ScenarioConfig(scenario="shock_tube", N=10))
    np.testing.assert_allclose(tube.rho, [0.445] * 5 + [0.5] * 5)
    np.testing.assert_allclose(tube.theta, [13.21] * 5 + [1.9] * 5)
    np.testing.assert_allclose(tube.u[:5, 0], 0.698 * math.sqrt(2))


# --- runs and output ------------------------------------------------------------

def test_zero_end_time_returns_initial_profile(tmp_path):
    cfg = ScenarioConfig(N=30, t_end=0.0, out=str(tmp_path / "p.csv"), write_coeffs=True)
    res = run_scenario(cfg)
    f0 = initial_field(cfg)
    assert res.meta["steps"] == 0
    assert np.array_equal(res.record.rho, f0.rho)
    assert np.array_equal(res.record.theta, f0.theta)
    assert np.array_equal(res.record.u, f0.u)
    back = SolutionRecord.read_csv(cfg.out)
    assert np.array_equal(back.rho, f0.rho) and np.array_equal(back.u, f0.u)


def test_csv_layout_and_round_trip(tmp_path):
    cfg = ScenarioConfig(N=24, M=4, t_end=0.05, out=str(tmp_path / "p.csv"), write_coeffs=True)
    res = run_scenario(cfg)
    lines = (tmp_path / "p.csv").read_text().splitlines()
    header = lines[0].split(",")
    assert header[:6] == ["x", "rho", "u1", "u2", "u3", "theta"]
    # all multi-indices up to degree 3
    assert len(header) == 6 + 20 and "f_000" in header and "f_300" in header and "f_111" in header
    assert len(lines) == 1 + cfg.N
    back = SolutionRecord.read_csv(cfg.out)
    assert np.array_equal(back.rho, res.field.rho)
    assert np.array_equal(back.theta, res.field.theta)
    for k, v in res.record.coeffs.items():
        assert np.array_equal(back.coeffs[k], v)
    meta = read_metadata(metadata_path(cfg.out))
    assert int(meta["steps"]) == res.meta["steps"] > 0
    assert float(meta["t_end"]) == 0.05


def test_runs_are_deterministic(tmp_path):
    for name in ("a.csv", "b.csv"):
        run_scenario(ScenarioConfig(N=20, t_end=0.05, out=str(tmp_path / name)))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


@pytest.mark.parametrize("scenario, t_end", [("periodic", 0.4), ("shock_tube", 0.02)])
def test_clock_lands_on_end_time(scenario, t_end):
    res = run_scenario(ScenarioConfig(scenario=scenario, N=40, t_end=t_end))
    assert res.meta["sum_dt"] == t_end
    assert res.field.t == t_end


def test_periodic_run_conserves():
    cfg = ScenarioConfig(N=40, M=4, t_end=0.2)
    before = initial_field(cfg).conserved_totals()
    after = run_scenario(cfg).field.conserved_totals()
    np.testing.assert_allclose(after, before, rtol=1e-10, atol=1e-10 * np.abs(before).max())


def test_periodic_profile_shape():
    res = run_scenario(ScenarioConfig(N=200))
    for q in (res.field.rho, res.field.theta):
        d = np.diff(np.concatenate([q, q[:1]]))
        # smooth: second differences stay far below the profile range
        assert np.abs(np.diff(d)).max() < 0.02 * np.ptp(q)
    # temperature carries one wave: a single maximum and a single minimum
    d = np.diff(np.concatenate([res.field.theta, res.field.theta[:1]]))
    assert np.count_nonzero(np.sign(d) != np.roll(np.sign(d), 1)) == 2
    assert 1.4 < res.field.rho.min() < res.field.rho.max() < 2.6


def test_breakdown_reports_step_and_cell():
    # reconstruction off at this resolution is a known RKC failure
    cfg = ScenarioConfig(N=200, reconstruction=False)
    with pytest.raises(SolverBreakdown, match=r"breakdown in step \d+ \(t = [0-9.e-]+\): inadmissible state in cell \d+") as info:
        run_scenario(cfg)
    assert info.value.step >= 1 and 0 < info.value.t < 0.4


# --- command line -----------------------------------------------------------------

def test_cli_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "run.csv"
    assert cli.main(["--N", "20", "--t-end", "0.05", "--out", str(out)]) == 0
    assert "periodic: M=3 N=20" in capsys.readouterr().out
    assert SolutionRecord.read_csv(out).rho.shape == (20,)
    assert metadata_path(out).exists()


def test_cli_config_file_and_overrides(tmp_path):
    cfgfile = tmp_path / "c.cfg"
    cfgfile.write_text("scenario = shock_tube\nN = 50\nkn_prime = 0.01\nt_end = 0.01\n")
    parser = cli.build_parser()
    args = parser.parse_args(["run", "--config", str(cfgfile), "--N", "30", "--kn", "0.2", "--no-reconstruction"])
    cfg = cli.config_from_args(args)
    assert (cfg.scenario, cfg.N, cfg.kn, cfg.kn_prime, cfg.reconstruction) == ("shock_tube", 30, 0.2, None, False)
    args = parser.parse_args(["run", "--config", str(cfgfile)])
    cfg = cli.config_from_args(args)
    assert cfg.knudsen == pytest.approx(knudsen_convert(0.01)) and cfg.reconstruction


def test_cli_convergence_and_scaling(tmp_path, capsys):
    assert cli.main(["convergence", "--N", "10", "--grids", "10,20", "--ref-N", "40", "--t-end", "0.05"]) == 0
    text = capsys.readouterr().out
    assert "reference N = 40" in text and "order_rho" in text
    out = tmp_path / "s.csv"
    assert cli.main(["scaling", "--grids", "8,16,32,64", "--t-end", "0.02", "--out", str(out)]) == 0
    assert "slopes:" in capsys.readouterr().out
    assert out.read_text().splitlines()[0] == "N,wall_time,steps,avg_dt,avg_s,avg_dt_over_s"


def test_cli_exit_codes(tmp_path, capsys):
    assert cli.main(["--kn", "0.1", "--kn-prime", "0.1"]) == 2
    assert cli.main(["--config", str(tmp_path / "missing.cfg")]) == 2
    assert cli.main(["convergence", "--grids", "20,30", "--ref-N", "40", "--t-end", "0.01"]) == 2
    assert "configuration error" in capsys.readouterr().err
    assert cli.main(["--N", "200", "--no-reconstruction"]) == 3
    assert "breakdown in step" in capsys.readouterr().err


def test_shock_tube_end_time():
    assert SHOCK_TUBE_T_END == 0.1314 / math.sqrt(2.0)
