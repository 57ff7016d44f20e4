"""Acceptance criteria. Each test prints one PASS/FAIL line with the measured
value and the pinned tolerance, then asserts."""

import math
import time

import numpy as np
import pytest

from thermofid import checks
from thermofid.fidelity import (
    fidelity_diagonal_fermions,
    ground_state_fidelity,
    log_mode_partition,
    thermal_fidelity,
)
from thermofid.loschmidt import EchoQuery, ground_state_echo, thermal_echo
from thermofid.model import ThermalStateSpec, XYParams, make_mode, model_from_pairs, xy_to_quasifree
from thermofid.sweep import Quantity, SweepConfig, argmin_lambda, dip_depth, run_sweep, write_csv

SEED = 20240601

ORACLE_TOL = 1e-10
ORACLE_SECONDS = 10.0
PARTITION_RTOL = 1e-12
ZERO_T_TOL = 1e-6
DIP_WINDOW = 0.05
DIP_SECONDS = 5.0
MULT_TOL = 1e-12
CLAMP_TOL = 1e-12
WASHOUT_BETAS = (100.0, 20.0, 10.0, 1.0)


@pytest.fixture
def report(capsys):
    def emit(criterion, passed, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if passed else 'FAIL'}] {criterion}: {detail}")
        return passed

    return emit


def cross_section(quantity, betas, time_=None):
    return SweepConfig(
        n_sites=200,
        gamma_range=(1.0, 1.0, 1),
        lambda_range=(0.0, 2.0, 201),
        delta_gamma=1e-2,
        delta_lambda=1e-2,
        beta_list=tuple(betas),
        quantity=quantity,
        echo_time=time_,
    )


def test_c01_oracle_fidelity(report):
    start = time.perf_counter()
    r = checks.fidelity_suite(SEED, draws=1000)
    elapsed = time.perf_counter() - start
    ok = r.max_deviation <= ORACLE_TOL and elapsed < ORACLE_SECONDS
    assert report("1 oracle equivalence (fidelity)", ok,
                  f"max dev {r.max_deviation:.2e} <= {ORACLE_TOL:.0e} over {r.draws} draws, {elapsed:.2f}s < {ORACLE_SECONDS:g}s")


def test_c02_oracle_echo(report):
    start = time.perf_counter()
    r = checks.echo_suite(SEED + 1, draws=500, t_max=20.0)
    elapsed = time.perf_counter() - start
    ok = r.max_deviation <= ORACLE_TOL and elapsed < ORACLE_SECONDS
    assert report("2 oracle equivalence (echo)", ok,
                  f"max dev {r.max_deviation:.2e} <= {ORACLE_TOL:.0e} over {r.draws} draws, {elapsed:.2f}s < {ORACLE_SECONDS:g}s")


def test_c03_partition_identity(report):
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for _ in range(100):
        mode = checks.draw_mode(rng)
        b0, b1 = checks.draw_beta(rng), checks.draw_beta(rng)
        model = model_from_pairs([(mode.epsilon, mode.delta)])
        got = thermal_fidelity(ThermalStateSpec(model, b0), ThermalStateSpec(model, b1)).total
        lam = mode.lambda_k
        want = math.exp(log_mode_partition(lam, (b0 + b1) / 2) - 0.5 * (log_mode_partition(lam, b0) + log_mode_partition(lam, b1)))
        worst = max(worst, abs(got - want) / want)
    assert report("3 partition-function identity", worst <= PARTITION_RTOL,
                  f"max rel dev {worst:.2e} <= {PARTITION_RTOL:.0e} over 100 models")


def test_c04_zero_temperature_limits(report):
    devs = []
    for lam in (0.5, 1.5):
        m0 = xy_to_quasifree(XYParams(1.0, lam, 20))
        m1 = xy_to_quasifree(XYParams(1.01, lam + 0.01, 20))
        fid = thermal_fidelity(ThermalStateSpec(m0, 1e3), ThermalStateSpec(m1, 1e3)).total
        devs.append(abs(fid - ground_state_fidelity(m0, m1).total))
        echo = thermal_echo(EchoQuery(m0, m1, 1e3, 1.0)).total
        devs.append(abs(echo - ground_state_echo(m0, m1, 1.0).total))
    worst = max(devs)
    assert report("4 zero-temperature limits", worst <= ZERO_T_TOL,
                  f"max |thermal - ground| {worst:.2e} <= {ZERO_T_TOL:.0e} (fidelity and echo, lambda 0.5 and 1.5)")


@pytest.mark.parametrize("quantity,time_", [(Quantity.FIDELITY, None), (Quantity.ECHO, 10.0)], ids=["fidelity", "echo"])
def test_c05_critical_dip_location(report, quantity, time_):
    start = time.perf_counter()
    result = run_sweep(cross_section(quantity, (100.0,), time_))
    elapsed = time.perf_counter() - start
    lam_star = argmin_lambda(result, 100.0)
    ok = abs(lam_star - 1.0) <= DIP_WINDOW and elapsed < DIP_SECONDS
    assert report(f"5 dip location ({quantity.value})", ok,
                  f"argmin lambda {lam_star:.3f}, |. - 1| <= {DIP_WINDOW}, {elapsed:.2f}s < {DIP_SECONDS:g}s")


@pytest.mark.parametrize("quantity,time_", [(Quantity.FIDELITY, None), (Quantity.ECHO, 10.0)], ids=["fidelity", "echo"])
def test_c06_thermal_washout(report, quantity, time_):
    result = run_sweep(cross_section(quantity, WASHOUT_BETAS, time_))
    depths = [dip_depth(result, b, reference_lambda=1.5) for b in WASHOUT_BETAS]
    ok = all(a > b for a, b in zip(depths, depths[1:]))
    detail = " > ".join(f"d({b:g})={d:.3e}" for b, d in zip(WASHOUT_BETAS, depths))
    assert report(f"6 thermal washout ({quantity.value})", ok, detail)


def test_c07_sign_change(report):
    # gamma = 0: Delta_k = 0 and epsilon_k = cos(phi_k) - lambda; N = 8 has phi = pi/4 between 0.6 and 0.8
    m0 = xy_to_quasifree(XYParams(0.0, 0.6, 8))
    m_flip = xy_to_quasifree(XYParams(0.0, 0.8, 8))
    m_same = xy_to_quasifree(XYParams(0.0, 0.65, 8))
    flips = int(np.sum(m0.epsilon * m_flip.epsilon < 0))
    f_flip = ground_state_fidelity(m0, m_flip).total
    f_same = ground_state_fidelity(m0, m_same).total
    d_flip = fidelity_diagonal_fermions(m0.epsilon, m_flip.epsilon, math.inf, math.inf)
    d_same = fidelity_diagonal_fermions(m0.epsilon, m_same.epsilon, math.inf, math.inf)
    ok = flips == 1 and f_flip == 0.0 and d_flip == 0.0 and f_same == 1.0 and d_same == 1.0
    assert report("7 sign-change criterion", ok,
                  f"one flip -> F={f_flip!r} (pairs), {d_flip!r} (fermions); no flip -> F={f_same!r}, {d_same!r}")


def test_c08_multiplicativity(report):
    r = checks.multiplicativity_suite(SEED + 3, draws=100)
    assert report("8 multiplicativity", r.max_deviation <= MULT_TOL,
                  f"max |F(a x b) - F(a) F(b)| {r.max_deviation:.2e} <= {MULT_TOL:.0e} over {r.draws} draws")


def test_c09_stability(report):
    surface = dict(n_sites=200, gamma_range=(0.0, 1.5, 151), lambda_range=(0.0, 2.0, 201), beta_list=(1.0, 10.0, 20.0, 100.0))
    results = [run_sweep(SweepConfig(**surface)), run_sweep(SweepConfig(**surface, quantity=Quantity.ECHO, echo_time=10.0))]
    rows = sum(len(r.rows) for r in results)
    errors = sum(len(r.errors) for r in results)
    non_finite = sum(int(np.sum(~np.isfinite(r.rows[:, 3:]))) for r in results)
    excursion = max(r.max_excursion for r in results)
    spot = []
    rng = np.random.default_rng(SEED + 4)
    for beta in (1e2, 1e3, 1e4):
        for _ in range(20):
            pairs0 = [(rng.uniform(-100, 100), rng.uniform(-100, 100)) for _ in range(4)]
            pairs1 = [(rng.uniform(-100, 100), rng.uniform(-100, 100)) for _ in range(4)]
            m0, m1 = model_from_pairs(pairs0), model_from_pairs(pairs1)
            fid = thermal_fidelity(ThermalStateSpec(m0, beta), ThermalStateSpec(m1, beta))
            echo = thermal_echo(EchoQuery(m0, m1, beta, float(rng.uniform(0, 20))))
            spot += [fid.total, fid.log_total, echo.total, echo.log_total]
    spot_ok = all(math.isfinite(v) for v in spot)
    ok = errors == 0 and non_finite == 0 and excursion <= CLAMP_TOL and spot_ok
    assert report("9 stability", ok,
                  f"{rows} rows (fidelity and echo surfaces), {errors} errors, {non_finite} non-finite, "
                  f"max clamp excursion {excursion:.1e} <= {CLAMP_TOL:.0e}, spot checks finite={spot_ok}")


def test_c10_determinism(report, tmp_path):
    configs = {
        "fidelity": cross_section(Quantity.FIDELITY, WASHOUT_BETAS),
        "echo": cross_section(Quantity.ECHO, WASHOUT_BETAS, 10.0),
        "surface": SweepConfig(gamma_range=(0.0, 1.5, 31), lambda_range=(0.0, 2.0, 41)),
    }
    same = []
    for name, cfg in configs.items():
        a, b = tmp_path / f"{name}_a.csv", tmp_path / f"{name}_b.csv"
        write_csv(run_sweep(cfg), a)
        write_csv(run_sweep(cfg), b)
        same.append(a.read_bytes() == b.read_bytes())
    assert report("10 determinism", all(same), f"byte-identical CSV for {', '.join(configs)}: {same}")
