import math

import numpy as np
import pytest

from hslimit.collision import (
    HardSphereKernel,
    SolverConfig,
    bimodal,
    l1k_norm,
    maxwellian,
)
from hslimit.solver import (
    InstabilityError,
    convergence_study,
    discretization_floor,
    moment_propagation_check,
    run_flow,
    run_pair,
    scaled_difference_norms,
    stable_dt,
    step,
)

CFG = SolverConfig(n_r=32, n_quad=(32, 16, 16, 8))


def test_zero_input_is_fixed_point():
    z = maxwellian(n_r=32).with_values(np.zeros(32))
    out = step(z, HardSphereKernel(), CFG, 0.1)
    assert np.array_equal(out.values, np.zeros(32))


def test_stable_dt_override_and_heuristic():
    f = bimodal(n_r=32)
    cfg_fixed = SolverConfig(n_r=32, n_quad=(32, 16, 16, 8), dt=0.01)
    assert stable_dt(f, cfg_fixed) == 0.01
    dt = stable_dt(f, CFG)
    assert 0.0 < dt < 0.1


def test_maxwellian_near_stationary():
    m = maxwellian(n_r=32)
    dt = stable_dt(m, CFG)
    series = run_flow(m, HardSphereKernel(), CFG, dt, 5 * dt)
    drift = l1k_norm(
        series.snapshots[-1].with_values(series.snapshots[-1].values - m.values), 0)
    assert drift / series.times[-1] < 2e-3


def test_mass_change_single_step():
    b = bimodal(n_r=32)
    dt = stable_dt(b, CFG)
    out = step(b, HardSphereKernel(), CFG, dt)
    m0, m1 = l1k_norm(b, 0), l1k_norm(out, 0)
    assert abs(m1 - m0) / m0 < 1e-4


def test_instability_guard():
    b = bimodal(n_r=32)
    with pytest.raises(InstabilityError):
        step(b, HardSphereKernel(), CFG, 1e6)


def test_run_pair_starts_at_zero_difference():
    b = bimodal(n_r=32)
    series_s, series_0, norms = run_pair(b, 0.1, 2 * stable_dt(b, CFG), CFG)
    assert norms[2.0][0] == 0.0
    assert series_s.times == series_0.times
    assert series_s.times[0] == 0.0


def test_run_pair_rejects_large_s():
    with pytest.raises(ValueError):
        run_pair(bimodal(n_r=32), 0.3, 0.1, CFG)


def test_entropy_nonincreasing_on_bimodal():
    b = bimodal(n_r=32)
    dt = stable_dt(b, CFG)
    series = run_flow(b, HardSphereKernel(), CFG, dt, 6 * dt)
    chk = moment_propagation_check(series, 2.0)
    assert chk.passed
    assert chk.extra["worst_entropy_increase"] <= 1e-5


def test_moment_propagation_requires_tracked_k():
    b = bimodal(n_r=32)
    series = run_flow(b, HardSphereKernel(), CFG, 0.05, 0.05)
    with pytest.raises(ValueError):
        moment_propagation_check(series, 7.0)


def test_single_s_study_matches_run_pair():
    b = bimodal(n_r=32)
    t_end = 3 * stable_dt(b, CFG)
    study = convergence_study(b, [0.1], t_end, [2.0], CFG)
    _, _, norms = run_pair(b, 0.1, t_end, CFG)
    assert study.sup_norms[2.0][0] == pytest.approx(max(norms[2.0]), rel=1e-12)
    assert study.ratio[2.0] == 1.0


def test_equilibrium_study_sits_at_floor():
    m = maxwellian(n_r=32)
    t_end = 3 * stable_dt(m, CFG)
    study = convergence_study(m, [0.05], t_end, [2.0], CFG)
    floor = discretization_floor(0.05, t_end, [2.0], CFG)
    assert study.sup_norms[2.0][0] == pytest.approx(floor[2.0], rel=1e-6)
    # equilibrium differences stay small in absolute terms
    assert floor[2.0] < 0.1


def test_scaled_difference_norms_scaling():
    b = bimodal(n_r=32)
    dt = stable_dt(b, CFG)
    series_s, series_0, _ = run_pair(b, 0.1, 2 * dt, CFG)
    norms_1 = scaled_difference_norms(series_s, series_0, 0.1, [2.0])
    norms_2 = scaled_difference_norms(series_s, series_0, 0.05, [2.0])
    assert norms_2[2.0][-1] == pytest.approx(2.0 * norms_1[2.0][-1], rel=1e-12)


def test_convergence_study_rejects_bad_s():
    with pytest.raises(ValueError):
        convergence_study(bimodal(n_r=32), [0.2], 0.1, [2.0], CFG)


def test_deterministic_reproducibility():
    b = bimodal(n_r=32)
    dt = stable_dt(b, CFG)
    s1 = run_flow(b, HardSphereKernel(), CFG, dt, 2 * dt)
    s2 = run_flow(b, HardSphereKernel(), CFG, dt, 2 * dt)
    assert s1.mass == s2.mass
    assert s1.entropy == s2.entropy
    assert np.array_equal(s1.snapshots[-1].values, s2.snapshots[-1].values)
