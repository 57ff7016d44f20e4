import importlib.util
import math
import runpy

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thermofid.fidelity import ground_state_fidelity, thermal_fidelity
from thermofid.loschmidt import EchoQuery, thermal_echo
from thermofid.model import Grid, ThermalStateSpec, XYParams, xy_to_quasifree
from thermofid.sweep import (
    CSV_HEADER,
    ConfigError,
    Quantity,
    SweepConfig,
    argmin_lambda,
    dip_depth,
    emit_plot_script,
    plot_script_text,
    read_csv,
    run_sweep,
    write_csv,
)


def small(**kw):
    base = dict(n_sites=8, gamma_range=(0.5, 1.0, 3), lambda_range=(0.0, 2.0, 5), beta_list=(1.0, 10.0))
    base.update(kw)
    return SweepConfig(**base)


# validation


@pytest.mark.parametrize(
    "kw,field_name",
    [
        (dict(n_sites=7), "n_sites"),
        (dict(n_sites=0), "n_sites"),
        (dict(gamma_range=(0.0, 1.0, 1)), "gamma_range"),
        (dict(gamma_range=(1.0, 0.0, 3)), "gamma_range"),
        (dict(lambda_range=(0.0, 1.0, 2.5)), "lambda_range"),
        (dict(lambda_range=(0.0, math.inf, 3)), "lambda_range"),
        (dict(lambda_range=(0.0, 1.0)), "lambda_range"),
        (dict(delta_gamma=-1e-2), "delta_gamma"),
        (dict(delta_gamma=0.0, delta_lambda=0.0), "delta_lambda"),
        (dict(beta_list=()), "beta_list"),
        (dict(beta_list=(1.0, 0.0)), "beta_list"),
        (dict(quantity=Quantity.ECHO), "echo_time"),
        (dict(quantity=Quantity.ECHO, echo_time=-1.0), "echo_time"),
    ],
)
def test_invalid_config_names_field(kw, field_name):
    with pytest.raises(ConfigError) as info:
        small(**kw).validate()
    assert info.value.field == field_name


def test_degenerate_axis_allowed():
    small(gamma_range=(1.0, 1.0, 1)).validate()


# run_sweep


def test_single_row_matches_direct_call():
    cfg = SweepConfig(n_sites=4, gamma_range=(0.0, 0.0, 1), lambda_range=(0.0, 0.0, 1),
                      delta_gamma=0.0, delta_lambda=1e-2, beta_list=(1.0,))
    result = run_sweep(cfg)
    assert result.rows.shape == (1, 5)
    direct = thermal_fidelity(
        ThermalStateSpec(xy_to_quasifree(XYParams(0.0, 0.0, 4)), 1.0),
        ThermalStateSpec(xy_to_quasifree(XYParams(0.0, 0.01, 4)), 1.0),
    )
    beta, gamma, lam, value, log_value = result.rows[0]
    assert (beta, gamma, lam) == (1.0, 0.0, 0.0)
    assert value == pytest.approx(direct.total, rel=1e-14)
    assert log_value == pytest.approx(direct.log_total, rel=1e-14, abs=1e-16)


def test_echo_rows_match_direct_calls():
    cfg = small(quantity=Quantity.ECHO, echo_time=3.0, grid=Grid.HALF_INTEGER)
    result = run_sweep(cfg)
    for beta, gamma, lam, value, _ in result.rows:
        m0 = xy_to_quasifree(XYParams(gamma, lam, 8, Grid.HALF_INTEGER))
        m1 = xy_to_quasifree(XYParams(gamma + 1e-2, lam + 1e-2, 8, Grid.HALF_INTEGER))
        assert value == pytest.approx(thermal_echo(EchoQuery(m0, m1, beta, 3.0)).total, rel=1e-13)


def test_row_order():
    rows = run_sweep(small()).rows
    keys = [tuple(r[:3]) for r in rows]
    assert keys == sorted(keys, key=lambda k: ([1.0, 10.0].index(k[0]), k[1], k[2]))


@settings(max_examples=25)
@given(
    st.integers(1, 4).map(lambda n: 2 * n),
    st.integers(1, 5),
    st.integers(2, 6),
    st.lists(st.sampled_from([0.5, 1.0, 10.0, math.inf]), min_size=1, max_size=3),
)
def test_row_count_and_range(n_sites, g_steps, l_steps, betas):
    g_range = (0.3, 0.3, 1) if g_steps == 1 else (0.0, 1.5, g_steps)
    cfg = SweepConfig(n_sites=n_sites, gamma_range=g_range, lambda_range=(0.0, 2.0, l_steps), beta_list=tuple(betas))
    result = run_sweep(cfg)
    assert len(result.rows) == len(betas) * g_steps * l_steps
    values = result.rows[:, 3]
    assert np.all((values >= 0.0) & (values <= 1.0))


def test_infinite_beta_rows_are_ground_state_values():
    result = run_sweep(small(beta_list=(math.inf,)))
    for _, gamma, lam, value, _ in result.rows:
        m0 = xy_to_quasifree(XYParams(gamma, lam, 8))
        m1 = xy_to_quasifree(XYParams(gamma + 1e-2, lam + 1e-2, 8))
        assert value == pytest.approx(ground_state_fidelity(m0, m1).total, rel=1e-14)


def test_low_temperature_pattern_follows_ground_state():
    cfg = SweepConfig(gamma_range=(0.0, 1.5, 31), lambda_range=(0.0, 2.0, 41), beta_list=(100.0, math.inf))
    rows = run_sweep(cfg).rows
    thermal, ground = rows[rows[:, 0] == 100.0], rows[np.isinf(rows[:, 0])]
    # gapless lines: |lambda| = 1 for any gamma, and gamma = 0 with |lambda| < 1
    g, lam = thermal[:, 1], thermal[:, 2]
    away = (np.abs(lam - 1.0) > 0.1) & ~((g < 0.1) & (lam < 1.1))
    assert np.max(np.abs(thermal[away, 3] - ground[away, 3])) <= 5e-3


def test_dip_helpers():
    cfg = SweepConfig(gamma_range=(1.0, 1.0, 1), lambda_range=(0.0, 2.0, 201), beta_list=(100.0,))
    result = run_sweep(cfg)
    assert abs(argmin_lambda(result, 100.0) - 1.0) <= 0.05
    assert dip_depth(result, 100.0) > 0


# CSV


def test_csv_single_row(tmp_path):
    cfg = small(gamma_range=(1.0, 1.0, 1), lambda_range=(0.5, 0.5, 1), beta_list=(2.0,))
    path = tmp_path / "one.csv"
    write_csv(run_sweep(cfg), path)
    lines = path.read_text().splitlines()
    data = [l for l in lines if not l.startswith("#")]
    assert data[0] == CSV_HEADER
    assert len(data) == 2
    assert all(l.startswith("# ") for l in lines[: lines.index(CSV_HEADER)])


def test_csv_round_trip(tmp_path):
    result = run_sweep(small(beta_list=(1.0, math.inf)), timestamp="2000-01-01T00:00:00+00:00")
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(result, first)
    back = read_csv(first)
    assert back.metadata == result.metadata
    np.testing.assert_array_equal(back.rows, result.rows)
    write_csv(back, second)
    assert first.read_bytes() == second.read_bytes()


def test_csv_seventeen_digits(tmp_path):
    path = tmp_path / "x.csv"
    result = run_sweep(small())
    write_csv(result, path)
    row = path.read_text().splitlines()[-1].split(",")
    assert float(row[3]) == result.rows[-1, 3]


def test_csv_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_csv(run_sweep(small()), a)
    write_csv(run_sweep(small()), b)
    assert a.read_bytes() == b.read_bytes()
    assert "timestamp" not in a.read_text()


def test_full_surface_row_count(tmp_path):
    steps = 11
    cfg = SweepConfig(gamma_range=(0.0, 1.5, steps), lambda_range=(0.0, 2.0, steps))
    path = tmp_path / "surface.csv"
    write_csv(run_sweep(cfg), path)
    data = [l for l in path.read_text().splitlines() if l and not l.startswith("#")]
    assert len(data) - 1 == 4 * steps**2


def test_csv_write_error_names_path(tmp_path):
    bad = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        write_csv(run_sweep(small()), bad)


# plot scripts


def test_plot_script_shape_rule():
    line = plot_script_text(run_sweep(small(gamma_range=(1.0, 1.0, 1))), "d.csv", "d.png")
    heat = plot_script_text(run_sweep(small()), "d.csv", "d.png")
    assert "ax.plot(" in line and "pcolormesh" not in line
    assert "pcolormesh" in heat and "N_GAMMA, N_LAMBDA = 3, 5" in heat
    assert "BETAS = [1.0, 10.0]" in line


def test_plot_script_deterministic_and_relative(tmp_path):
    result = run_sweep(small())
    (tmp_path / "data").mkdir()
    csv = tmp_path / "data" / "s.csv"
    write_csv(result, csv)
    emit_plot_script(result, tmp_path / "p1.py", csv)
    emit_plot_script(result, tmp_path / "p2.py", csv)
    text = (tmp_path / "p1.py").read_text()
    assert text.replace("p1.png", "X") == (tmp_path / "p2.py").read_text().replace("p2.png", "X")
    assert "'data/s.csv'" in text and str(tmp_path) not in text


@pytest.mark.skipif(importlib.util.find_spec("matplotlib") is None, reason="matplotlib not installed")
@pytest.mark.parametrize("gamma_range", [(1.0, 1.0, 1), (0.5, 1.0, 3)])
def test_plot_script_runs(tmp_path, monkeypatch, gamma_range):
    monkeypatch.setenv("MPLBACKEND", "Agg")
    result = run_sweep(small(gamma_range=gamma_range))
    write_csv(result, tmp_path / "s.csv")
    emit_plot_script(result, tmp_path / "s_plot.py", tmp_path / "s.csv")
    runpy.run_path(str(tmp_path / "s_plot.py"))
    assert (tmp_path / "s_plot.png").stat().st_size > 0
