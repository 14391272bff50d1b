import math

import numpy as np
import pytest

from hadamard_dse.analog import (
    ARRAY_PRESETS,
    CapacitorArraySpec,
    DriverSpec,
    MismatchRealization,
    analog_transform,
    array_preset,
    insertion_loss_compensation_db,
    mismatch_sample,
    mismatch_sigma_from_cap,
    nyquist_rate,
)
from hadamard_dse.transform import TransformSpec, fht_real


def lossless(sigma=0.0):
    return CapacitorArraySpec(1.0, 1.0, 0.1, 1e9, sigma, insertion_loss_db=0.0)


def test_presets_match_published_rows():
    rows = {
        "0.68fF": (0.68, 2.25, 0.078, 4.65e9, 0.06),
        "1.5fF": (1.5, 4.41, 0.153, 2.55e9, 0.024),
        "2.0fF": (2.0, 5.76, 0.200, 2.03e9, 0.016),
        "4.0fF": (4.0, 10.24, 0.356, 1.1e9, 0.01),
    }
    for name, row in rows.items():
        p = ARRAY_PRESETS[name]
        assert (p.c_unit, p.unit_area, p.array_area, p.f3db, p.sigma_ratio) == row
        assert p.insertion_loss_db == 11.3


def test_array_preset_lookup():
    assert array_preset("0.68fF") is ARRAY_PRESETS["0.68fF"]
    assert array_preset(4) is ARRAY_PRESETS["4.0fF"]
    assert array_preset("1.5") is ARRAY_PRESETS["1.5fF"]
    with pytest.raises(KeyError):
        array_preset("3fF")


def test_spec_validation():
    with pytest.raises(ValueError):
        CapacitorArraySpec(1.0, 1.0, 0.1, 1e9, 0.5)
    with pytest.raises(ValueError):
        CapacitorArraySpec(-1.0, 1.0, 0.1, 1e9, 0.01)
    with pytest.raises(ValueError):
        DriverSpec(0.0)
    assert DriverSpec().conductance == 14.4e-6


def test_zero_sigma_gives_zero_mismatch():
    r = mismatch_sample(lossless(0.0), 16, 3)
    assert not np.any(r.epsilon)


def test_mismatch_std_4ff_preset():
    r = mismatch_sample(ARRAY_PRESETS["4.0fF"], 128, 11)
    assert abs(r.epsilon.std() / 0.01 - 1) < 0.05
    assert abs(r.epsilon.mean()) < 0.01 * 4 / 128  # 4 standard errors


def test_mismatch_seed_determinism():
    spec = ARRAY_PRESETS["0.68fF"]
    a = mismatch_sample(spec, 32, 5).epsilon
    b = mismatch_sample(spec, 32, 5).epsilon
    c = mismatch_sample(spec, 32, 6).epsilon
    assert a.tobytes() == b.tobytes()
    assert not np.array_equal(a, c)
    d = mismatch_sample(spec, 32, [0, 1, 5]).epsilon
    assert d.tobytes() == mismatch_sample(spec, 32, [0, 1, 5]).epsilon.tobytes()


def test_mismatch_calibration_over_400_realizations():
    spec = ARRAY_PRESETS["0.68fF"]
    eps = np.stack([mismatch_sample(spec, 128, [7, t]).epsilon for t in range(400)])
    per_element = eps.std(axis=0, ddof=1)
    assert 0.055 <= per_element.mean() <= 0.065
    # a single element's sample std over n=400 has a 99% band of about
    # sigma * [0.904, 1.087]; nearly all elements should fall inside it
    inside = (per_element > 0.06 * 0.904) & (per_element < 0.06 * 1.087)
    assert inside.mean() > 0.97
    per_realization = eps.reshape(400, -1).std(axis=1)
    assert np.all((per_realization > 0.055) & (per_realization < 0.065))


@pytest.mark.parametrize(
    "c_unit, expected", [(4.0, 0.01), (1.0, 0.02), (0.68, 0.02 / math.sqrt(0.68))]
)
def test_area_law_sigma(c_unit, expected):
    assert mismatch_sigma_from_cap(0.02, c_unit) == pytest.approx(expected, rel=1e-12)


def test_area_law_disagrees_with_table_for_small_caps():
    assert mismatch_sigma_from_cap(0.02, 0.68) == pytest.approx(0.0243, abs=5e-5)
    assert ARRAY_PRESETS["0.68fF"].sigma_ratio == 0.06


@pytest.mark.parametrize("m", range(1, 8))
def test_ideal_array_reduces_to_fht(m):
    spec = TransformSpec(m)
    x = np.random.default_rng(m).standard_normal((4, spec.M))
    r = mismatch_sample(lossless(), spec.M, 0)
    assert np.max(np.abs(analog_transform(x, lossless(), r) - fht_real(x, spec))) < 1e-10


def test_insertion_loss_on_impulse():
    spec = ARRAY_PRESETS["0.68fF"]
    x = np.zeros(128)
    x[0] = 1
    r = MismatchRealization(np.zeros((128, 128)), 0)
    y = analog_transform(x, spec, r)
    np.testing.assert_allclose(y, np.full(128, 10 ** (-11.3 / 20) / math.sqrt(128)), rtol=1e-12)


def test_matches_double_loop_oracle():
    rng = np.random.default_rng(2)
    spec = CapacitorArraySpec(1.0, 1.0, 0.1, 1e9, 0.05, insertion_loss_db=3.0)
    r = mismatch_sample(spec, 4, 9)
    x = rng.standard_normal(4)
    h = [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]]
    a = 10 ** (-3.0 / 20)
    oracle = [
        a / 2 * sum(h[k][j] * (1 + r.epsilon[k, j]) * x[j] for j in range(4)) for k in range(4)
    ]
    np.testing.assert_allclose(analog_transform(x, spec, r), oracle, atol=1e-12)


def test_linearity(rng):
    spec = ARRAY_PRESETS["1.5fF"]
    r = mismatch_sample(spec, 64, 1)
    x, z = rng.standard_normal(64), rng.standard_normal(64)
    lhs = analog_transform(2.5 * x - 0.75 * z, spec, r)
    rhs = 2.5 * analog_transform(x, spec, r) - 0.75 * analog_transform(z, spec, r)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_error_is_linear_in_mismatch_scale(rng):
    spec = lossless()
    base = mismatch_sample(CapacitorArraySpec(1.0, 1.0, 0.1, 1e9, 0.03), 32, 4).epsilon
    x = rng.standard_normal(32)
    y0 = analog_transform(x, spec, MismatchRealization(np.zeros((32, 32)), 0))
    dev = [np.linalg.norm(analog_transform(x, spec, MismatchRealization(t * base, 0)) - y0)
           for t in (0.5, 1.0, 2.0)]
    np.testing.assert_allclose(np.array(dev) / dev[1], [0.5, 1.0, 2.0], rtol=1e-9)


def test_dimension_mismatch():
    r = mismatch_sample(lossless(), 8, 0)
    with pytest.raises(ValueError):
        analog_transform(np.ones(4), lossless(), r)


def test_nyquist_rate():
    assert nyquist_rate(ARRAY_PRESETS["0.68fF"]) == pytest.approx(9.3e9)
    assert nyquist_rate(ARRAY_PRESETS["0.68fF"]) > 8e9
    assert nyquist_rate(ARRAY_PRESETS["4.0fF"]) == pytest.approx(2.2e9)
    assert nyquist_rate(CapacitorArraySpec(1.0, 1.0, 0.1, 1e-300, 0.0)) == pytest.approx(0.0)


def test_compensation_rounds_up():
    assert insertion_loss_compensation_db(11.3) == 12.0
    assert insertion_loss_compensation_db(0.0) == 0.0
    assert insertion_loss_compensation_db(12.0) == 12.0
