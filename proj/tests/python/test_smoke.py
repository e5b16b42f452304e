import math

import numpy as np
import pytest

import dbcorr


def test_fa_exponent_value():
    assert dbcorr.g_fa(3.0) == pytest.approx(0.5945348918918356, rel=1e-12)


def test_detection_anchor():
    rho2 = dbcorr.invert_for_rho2("detection achievable", 100, 1000, 0.1)
    assert rho2 == pytest.approx(0.0240385162, rel=1e-4)


def test_sampler_shapes_and_statistic():
    x, y = dbcorr.sample_alt(4, 6, 0.5, [1, 0, 3, 2], 7)
    assert x.shape == (4, 6) and y.shape == (4, 6)
    t = dbcorr.sip_statistic(x, y, 1)
    assert t == pytest.approx(float(x.sum(axis=0) @ y.sum(axis=0)))


def test_decoder_finds_strong_planting():
    perm = [2, 0, 1, 4, 3]
    x, y = dbcorr.sample_alt(5, 200, 0.9, perm, 3)
    decoded, score = dbcorr.ml_decode(x, y, 0.9)
    assert list(decoded) == perm
    assert math.isfinite(score)


def test_second_moment_trivial_case():
    assert dbcorr.exact_second_moment(1, 2.0, 0.25) == pytest.approx(
        (1 - 0.25) ** -2)


def test_bad_rho_raises():
    with pytest.raises(ValueError):
        dbcorr.sample_alt(3, 3, 1.5, [0, 1, 2], 1)


def test_run_config_curve_json():
    body, code, _ = dbcorr.run_config(
        "curve", format="json", n=100, d=1000, grid="1000:1000:1",
        epsilon_d=0.0)
    assert code == 0
    assert body["schema"] == 1
    (point,) = body["results"]["points"]
    assert point["rho2_det_ach"] == pytest.approx(0.0240385162, rel=1e-4)


def test_numpy_roundtrip_rejects_shape_mismatch():
    with pytest.raises(ValueError):
        dbcorr.sip_statistic(np.zeros((2, 3)), np.zeros((3, 3)))
