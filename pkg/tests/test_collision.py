import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hslimit.collision import (
    CollisionGeometry,
    HardSphereKernel,
    InversePowerKernel,
    RadialDistribution,
    SolverConfig,
    bimodal,
    compact_bump,
    cutoff_remainder,
    distribution_from_csv,
    distribution_to_csv,
    entropy,
    eval_Q,
    invariant_pairing,
    l1k_norm,
    llogl,
    loss_frequency,
    make_kernel,
    maxwellian,
    post_collision_speeds,
    povzner_sample_check,
    w11k_seminorm,
    weak_form_pairing,
)

# reduced resolution for operator tests; defaults are exercised in acceptance
CFG = SolverConfig(n_r=32, n_quad=(32, 16, 16, 8))


# -- post-collision geometry -------------------------------------------------


def test_collinear_equal_speeds():
    geom = CollisionGeometry(1.0, 1.0, 0.0, 0.7, 1.3)
    vp, vps = post_collision_speeds(geom)
    assert vp == pytest.approx(1.0, abs=1e-14)
    assert vps == pytest.approx(1.0, abs=1e-14)


def test_resting_partner():
    geom = CollisionGeometry(2.0, 0.0, 0.4, math.pi / 2.0, 0.2)
    vp, _ = post_collision_speeds(geom)
    assert vp * vp == pytest.approx(2.0, abs=1e-14)


def test_energy_identity_example():
    geom = CollisionGeometry(1.3, 0.7, 1.1, 0.9, 2.0)
    vp, vps = post_collision_speeds(geom)
    assert vp * vp + vps * vps == pytest.approx(2.18, abs=1e-13)


def test_energy_identity_bulk():
    # vectorized replica of the speed formulas over 10^6 random geometries
    rng = np.random.default_rng(3)
    n = 10 ** 6
    v, vs = rng.uniform(0, 10, n), rng.uniform(0, 10, n)
    beta = rng.uniform(0, math.pi, n)
    theta = rng.uniform(0, math.pi, n)
    phi = rng.uniform(0, 2 * math.pi, n)
    half = theta / 2.0
    vp2 = (np.cos(half) ** 2 * v * v + np.sin(half) ** 2 * vs * vs
           + np.sin(theta) * np.sin(beta) * np.cos(phi) * v * vs)
    vps2 = v * v + vs * vs - vp2
    assert np.all(vp2 >= -1e-12 * (1 + v * v + vs * vs))
    assert np.max(np.abs(vp2 + vps2 - v * v - vs * vs)) < 1e-12 * 200.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 10), st.floats(0, 10), st.floats(0, math.pi),
       st.floats(0, math.pi), st.floats(0, 2 * math.pi))
def test_energy_identity_property(v, vs, beta, theta, phi):
    vp, vps = post_collision_speeds(CollisionGeometry(v, vs, beta, theta, phi))
    assert vp * vp + vps * vps == pytest.approx(v * v + vs * vs, abs=1e-10)


def test_geometry_validation():
    with pytest.raises(ValueError):
        CollisionGeometry(-1.0, 1.0, 0.0, 0.5, 0.0)
    with pytest.raises(ValueError):
        CollisionGeometry(1.0, 1.0, 4.0, 0.5, 0.0)


# -- distributions and norms -------------------------------------------------


def test_maxwellian_norms():
    m = maxwellian(T=1.0)
    assert l1k_norm(m, 0) == pytest.approx(1.0, abs=2e-4)
    assert l1k_norm(m, 2) == pytest.approx(4.0, abs=1e-3)
    m_half = maxwellian(T=0.5)
    assert l1k_norm(m_half, 2) == pytest.approx(1.0 + 3.0 * 0.5, abs=1e-3)


def test_maxwellian_norms_against_quadrature_oracle():
    # independent fine trapezoid on the analytic profile
    T = 0.7
    r = np.linspace(0.0, 8.0, 20001)
    prof = (2 * math.pi * T) ** -1.5 * np.exp(-r * r / (2 * T))
    oracle = 4 * math.pi * np.trapezoid(prof * (1 + r * r) * r * r, r)
    assert l1k_norm(maxwellian(T=T), 2) == pytest.approx(oracle, rel=5e-4)


def test_bimodal_mixture_temperature_one():
    b = bimodal()
    assert l1k_norm(b, 0) == pytest.approx(1.0, abs=2e-4)
    assert l1k_norm(b, 2) == pytest.approx(4.0, abs=1e-3)


def test_zero_distribution():
    z = maxwellian().with_values(np.zeros(48))
    assert l1k_norm(z, 0) == 0.0
    assert w11k_seminorm(z, 2) == 0.0
    assert entropy(z) == 0.0
    assert llogl(z) == 0.0


def test_compact_bump_normalized():
    f = compact_bump(width=0.5)
    assert l1k_norm(f, 0) == pytest.approx(1.0, rel=1e-6)
    assert np.all(f.values >= 0.0)


def test_entropy_of_maxwellian():
    # H(M) = -3/2 (1 + log(2 pi T)) for unit mass
    T = 1.0
    exact = -1.5 * (1.0 + math.log(2 * math.pi * T))
    assert entropy(maxwellian(T=T)) == pytest.approx(exact, abs=2e-3)


def test_interp_evaluates_zero_outside():
    m = maxwellian()
    assert m.evaluate(9.0) == 0.0
    lin = RadialDistribution(m.r_nodes, m.values, m.V_max, "linear")
    assert lin.evaluate(9.0) == 0.0
    assert lin.evaluate(0.1) == pytest.approx(m.evaluate(0.1), rel=1e-2)


def test_distribution_validation():
    with pytest.raises(ValueError):
        RadialDistribution([0.0, 1.0], [1.0, np.inf], 2.0)
    with pytest.raises(ValueError):
        RadialDistribution([1.0, 0.5], [1.0, 1.0], 2.0)
    with pytest.raises(ValueError):
        RadialDistribution([0.0, 1.0], [1.0, 1.0], 2.0, "cubic")


def test_csv_round_trip(tmp_path):
    f = bimodal(n_r=16)
    path = tmp_path / "f.csv"
    distribution_to_csv(f, path)
    g = distribution_from_csv(path)
    assert np.array_equal(f.r_nodes, g.r_nodes)
    assert np.array_equal(f.values, g.values)
    assert g.V_max == f.V_max and g.interp == f.interp


# -- loss frequency ----------------------------------------------------------


def test_loss_frequency_gamma_zero_is_mass():
    m = maxwellian()
    nu = loss_frequency(m, 0.0)
    for r in (0.0, 1.0, 5.0):
        assert nu(r) == pytest.approx(l1k_norm(m, 0), rel=1e-6)


def test_loss_frequency_large_speed_asymptote():
    nu = loss_frequency(maxwellian(), 1.0)
    assert nu(7.5) / 7.5 == pytest.approx(1.0, rel=0.02)


def test_loss_frequency_at_origin():
    # nu(0) for gamma = 1 equals the mean speed sqrt(8 T / pi)
    nu = loss_frequency(maxwellian(), 1.0)
    assert nu(0.0) == pytest.approx(math.sqrt(8.0 / math.pi), rel=1e-3)


def test_loss_frequency_narrow_bump():
    f = compact_bump(center=1.0, width=0.1, n_r=256)
    nu = loss_frequency(f, 1.0)
    assert nu(0.0) == pytest.approx(1.0, rel=0.02)


def test_loss_frequency_against_2d_quadrature_oracle():
    # direct (r_*, beta) quadrature without the closed-form beta integral
    m = maxwellian()
    r = 2.0
    rs = np.linspace(1e-6, 8.0, 2001)
    beta = np.linspace(0.0, math.pi, 1001)
    RS, B = np.meshgrid(rs, beta, indexing="ij")
    rel = np.sqrt(r * r + RS * RS - 2 * r * RS * np.cos(B))
    prof = (2 * math.pi) ** -1.5 * np.exp(-RS * RS / 2.0)
    integrand = 2 * math.pi * RS * RS * np.sin(B) * prof * rel
    oracle = np.trapezoid(np.trapezoid(integrand, beta, axis=1), rs)
    assert loss_frequency(m, 1.0)(r) == pytest.approx(oracle, rel=1e-3)


def test_loss_frequency_linear_lower_bound():
    # hard-sphere collision frequency dominates a multiple of <r>
    nu = loss_frequency(maxwellian(), 1.0)
    r = np.linspace(0.0, 8.0, 50)
    ratios = nu(r) / np.sqrt(1.0 + r * r)
    assert np.min(ratios) > 0.5


# -- kernels and eval_Q ------------------------------------------------------


def test_make_kernel():
    assert make_kernel("hard-sphere").gamma == 1.0
    ip = make_kernel("inverse-power", 0.05)
    assert ip.gamma == pytest.approx(0.8)
    with pytest.raises(ValueError):
        make_kernel("inverse-power", 0.5)
    with pytest.raises(ValueError):
        make_kernel("grazing")


def test_hard_sphere_angular_factor():
    hs = HardSphereKernel()
    theta = np.array([0.3, 1.0, 2.0])
    assert np.array_equal(hs.angular_factor(theta), [0.5, 0.5, 0.0])


def test_inverse_power_angular_factor_near_half_for_tiny_s():
    ip = InversePowerKernel(1e-4)
    vals = ip.angular_factor(np.array([0.5, 1.0, 1.5]))
    assert np.allclose(vals, 0.5, atol=5e-3)


def test_eval_Q_annihilates_maxwellian():
    m = maxwellian(n_r=32)
    q = eval_Q(m, HardSphereKernel(), CFG)
    assert l1k_norm(q, 0) / l1k_norm(m, 2) < 1e-3


def test_eval_Q_sign_structure():
    # a bimodal state relaxes: Q adds mass at intermediate speeds
    b = bimodal(n_r=32)
    q = eval_Q(b, HardSphereKernel(), CFG)
    assert np.max(q.values) > 0 and np.min(q.values) < 0


def test_weak_form_pairings_vanish():
    b = bimodal(n_r=32)
    for kernel in (HardSphereKernel(), InversePowerKernel(0.05)):
        scale = l1k_norm(b, 2)
        assert abs(weak_form_pairing(b, kernel, CFG, "mass")) < 1e-12 * scale
        assert abs(weak_form_pairing(b, kernel, CFG, "energy")) < 1e-12 * scale
    with pytest.raises(ValueError):
        weak_form_pairing(b, HardSphereKernel(), CFG, "momentum")


def test_direct_pairings_at_discretization_floor():
    # pairing the Q output directly is limited by interpolation error
    b = bimodal(n_r=32)
    q = eval_Q(b, HardSphereKernel(), CFG)
    scale = l1k_norm(b, 2)
    assert abs(invariant_pairing(q, 0)) < 5e-3 * scale
    assert abs(invariant_pairing(q, 2) - invariant_pairing(q, 0)) < 2e-2 * scale


def test_cutoff_consistency():
    # halving theta_cut moves Q by less than 4x the reported remainder
    b = bimodal(n_r=32)
    kernel = InversePowerKernel(0.05)
    cfg_half = SolverConfig(n_r=32, n_quad=(32, 16, 16, 8), theta_cut=5e-4)
    q1 = eval_Q(b, kernel, CFG)
    q2 = eval_Q(b, kernel, cfg_half)
    diff = l1k_norm(q1.with_values(q1.values - q2.values), 0)
    assert diff < 4.0 * cutoff_remainder(kernel, CFG)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(theta_cut=0.5)
    with pytest.raises(ValueError):
        SolverConfig(n_quad=(4, 4, 4))
    with pytest.raises(ValueError):
        SolverConfig(dt=-0.1)


# -- povzner sampling --------------------------------------------------------


def test_povzner_identity_collision():
    # theta = 0 keeps v unchanged; the first inequality is slack
    geom_ratio = povzner_sample_check(2.0, 1000, seed=1)
    assert geom_ratio.passed


@pytest.mark.parametrize("k", [2.0, 3.0, 6.0])
def test_povzner_finite_and_seed_stable(k):
    a = povzner_sample_check(k, 200000, seed=0)
    b = povzner_sample_check(k, 200000, seed=1)
    assert a.passed and b.passed
    assert abs(a.extra["C_k"] - b.extra["C_k"]) <= 0.1 * max(a.extra["C_k"], b.extra["C_k"])


def test_povzner_resting_partner_reduction():
    # v_* = 0: |v'| = cos(theta/2)|v| and the first LHS is nonpositive for k = 2
    v, theta = 3.0, 1.2
    c, s_ = math.cos(theta / 2), math.sin(theta / 2)
    vp = c * v
    av, avp = math.sqrt(1 + v * v), math.sqrt(1 + vp * vp)
    lhs = avp ** 2 - c ** 2 * av ** 2 - s_ ** 2
    assert lhs <= 1e-12


def test_povzner_rejects_small_k():
    with pytest.raises(ValueError):
        povzner_sample_check(1.0, 100)
