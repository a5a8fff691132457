import math

import numpy as np
import pytest

import clsel


def test_simulate_common_location_shape_and_determinism():
    x1 = clsel.simulate_common_location(d=6, d_star=4, rho=0.8, mu=0.0, n=40, seed=7)
    x2 = clsel.simulate_common_location(d=6, d_star=4, rho=0.8, mu=0.0, n=40, seed=7)
    x3 = clsel.simulate_common_location(d=6, d_star=4, rho=0.8, mu=0.0, n=40, seed=8)
    assert x1.shape == (40, 6)
    assert np.array_equal(x1, x2)
    assert not np.array_equal(x1, x3)


def test_simulate_rejects_bad_rho():
    with pytest.raises(ValueError):
        clsel.simulate_common_location(d=6, d_star=4, rho=1.2, mu=0.0, n=40, seed=1)


def test_select_cls1_report():
    x = clsel.simulate_common_location(d=5, d_star=4, rho=0.9, mu=0.0, n=60, seed=3)
    report = clsel.select(x, model="common-location", algorithm="cls1", seed=5)
    assert report["schema_version"] == 1
    assert report["config"]["tau"] == 5.0  # tau defaults to d
    assert len(report["frequencies"]) == 5
    rules = {r["rule"]: r for r in report["rules"]}
    assert set(rules) == {"min", "threshold"}
    assert len(rules["min"]["mask"]) == 5
    assert rules["min"]["estimated"]
    assert math.isfinite(rules["min"]["theta"][0])


def test_select_cls2_stability_fields():
    x = clsel.simulate_common_location(d=5, d_star=4, rho=0.9, mu=0.0, n=60, seed=4)
    report = clsel.select(x, model="common-location", algorithm="cls2", seed=6)
    rules = {r["rule"]: r for r in report["rules"]}
    assert "stability" in rules
    stab = rules["stability"]
    assert 0.5 <= stab["xi_hat"]
    assert stab["eta_hat"] >= 0.0


def test_ordinal_roundtrip():
    gamma = np.array([[-0.5, 0.5]] * 4)
    y, group = clsel.simulate_ordinal(
        d=4, theta=0.3, gamma=gamma, case_fraction=0.5, latent_rho=0.2, n=80, seed=9
    )
    assert y.shape == (80, 4)
    assert set(np.unique(y)).issubset({0.0, 1.0, 2.0})
    assert group.sum() == 40
    report = clsel.select(
        y, group=group.astype(np.int32), model="ordinal", algorithm="cls1",
        gamma=gamma, seed=2,
    )
    assert len(report["frequencies"]) == 4


def test_oracles():
    assert clsel.pcer_threshold(4.0, 10, 0.1) == pytest.approx(0.7, abs=1e-12)
    assert clsel.g0_common_location("0100000000", 0.5, 8) == pytest.approx(0.0)
    assert clsel.g0_optimal_structure(10, 8, 0.9) == (2, 1)
    assert clsel.hamming_distance("101", "001") == 1
    assert clsel.conditional_probability(math.log(3.0), 0.0, 1.0) == pytest.approx(0.75)


def test_exchangeable_simulator():
    x = clsel.simulate_exchangeable(d=3, rho=0.5, n=50, seed=11)
    assert x.shape == (50, 3)
