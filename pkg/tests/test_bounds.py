import json
import math

import numpy as np
import pytest

from hslimit import bounds

# reduced grids keep the unit tests fast; the full default grids run in
# the acceptance suite
S_SMALL = (0.01, 0.1, 0.5, 0.9)
THETA_SMALL = tuple(np.geomspace(1e-4, math.pi, 50))


def _cache():
    return bounds._TableCache(n_nodes=96)


def test_lemma_2_1_passes():
    phi_chk, dphi_chk = bounds.check_lemma_2_1(S_SMALL, cache=_cache())
    assert phi_chk.passed and dphi_chk.passed
    assert phi_chk.worst_ratio <= 1.0


def test_lemma_2_2_passes():
    y_chk, yp_chk = bounds.check_lemma_2_2(S_SMALL, cache=_cache())
    assert y_chk.passed and yp_chk.passed


def test_lemma_2_3_and_2_4_pass():
    l23, l24 = bounds.check_lemma_2_3_and_2_4(S_SMALL, THETA_SMALL, cache=_cache())
    assert l23.passed and l24.passed
    # the large-theta branch of lemma 2.3 is sharp at theta = pi
    assert l23.worst_ratio <= 1.0 + l23.slack


def test_y_prime_bound_passes():
    chk = bounds.check_y_prime_bound(S_SMALL, cache=_cache())
    assert chk.passed


def test_H_s_checks_pass():
    main, sharp1, sharp4 = bounds.check_H_s(S_SMALL, cache=_cache())
    assert main.passed and sharp1.passed and sharp4.passed
    # H_s is identically 1 at s = 1/2, so the sharper branch is tight
    assert sharp1.worst_ratio <= 1.0 + sharp1.slack


def test_theorem_1_1_passes_with_margin():
    chk = bounds.check_theorem_1_1(S_SMALL, THETA_SMALL, cache=_cache())
    assert chk.passed
    # the certified constant has orders of magnitude of slack
    assert chk.extra["empirical_sup"] < 100.0


def test_theta_integral_uniform():
    chk = bounds.check_theta_integral((0.01, 0.05, 0.1), cache=_cache())
    assert chk.passed
    assert math.isfinite(chk.extra["empirical_C"])


def test_negative_slack_forces_failure():
    chk = bounds.check_y_prime_bound((0.5,), cache=_cache(), slack=-1.0)
    assert not chk.passed


def test_refinement_preserves_verdicts():
    coarse = bounds.check_theorem_1_1((0.05,), THETA_SMALL, cache=_cache())
    fine = bounds.check_theorem_1_1(
        (0.05,), tuple(np.geomspace(1e-4, math.pi, 100)), cache=_cache())
    assert coarse.passed == fine.passed
    assert fine.extra["empirical_sup"] == pytest.approx(
        coarse.extra["empirical_sup"], rel=0.05)


def test_check_serializes_to_json():
    chk = bounds.check_y_prime_bound((0.5,), cache=_cache())
    payload = json.dumps(chk.to_dict())
    round_trip = json.loads(payload)
    assert round_trip["name"] == "y_prime_le_1"
    assert isinstance(round_trip["passed"], bool)


def test_sphere_angular_integrals_hard_sphere_scale():
    # for small s the sin^2(theta/2) moment stays near the constant-kernel value
    table = bounds.build_map_table(0.01, 96)
    i2, i1 = bounds.sphere_angular_integrals(table)
    assert 0.0 < i2 < 10.0
    assert 0.0 < i1 < 20.0
