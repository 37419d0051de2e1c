import math

import pytest

import mlsde


def test_closed_forms():
    assert mlsde.znv_second_moment(1, 1.0, 1.0) == pytest.approx(0.4853515625, abs=1e-15)
    assert mlsde.znv_second_moment_exact(1, 1.0, 1.0) == pytest.approx(131 / 256, abs=1e-15)
    assert mlsde.cc_exact_usq_mean(1.0, 1.0) == pytest.approx(5 / 6)


def test_ml2r_weights():
    w, W = mlsde.ml2r_weights(1, 1.0)
    assert w == pytest.approx([-1.0, 2.0])
    assert W[0] == pytest.approx(1.0)


def test_plan_helpers():
    assert mlsde.mlmc_last_level(2.0**-10, 1.0, 1.0) == 11
    assert mlsde.lambda_table("gs-nv", 3) == [1.0, 2.5, 2.5, 4.5]
    assert mlsde.mlmc_sample_sizes(1.0, [1.0], [1.0]) == [2]


def test_heston_xi():
    assert mlsde.HestonParams().xi == pytest.approx(0.89875, abs=1e-15)


def test_strong_order_small():
    cfg = mlsde.ModelConfig("clark-cameron", "cos-u")
    r = mlsde.strong_order(cfg, [2, 3, 4], samples=5000)
    assert r["nv_slope"] == pytest.approx(-1.0, abs=0.3)
    zero = mlsde.strong_order(cfg, [2, 3], samples=10, zero_noise=True)
    assert math.isnan(zero["nv_slope"])


def test_run_deterministic():
    cfg = mlsde.ModelConfig("clark-cameron", "u-squared")
    a = mlsde.run(cfg, "gs-nv", "mlmc", [2.0**-4], pilot_samples=2000, seed=3)
    b = mlsde.run(cfg, "gs-nv", "mlmc", [2.0**-4], pilot_samples=2000, seed=3, workers=2)
    assert a[0]["estimate"] == b[0]["estimate"]
    assert abs(a[0]["estimate"] - 5 / 6) < 0.3


def test_config_errors():
    with pytest.raises(ValueError):
        mlsde.ModelConfig("black-scholes")
    with pytest.raises(ValueError):
        mlsde.lambda_table("euler", 2)
