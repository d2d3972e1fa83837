import numpy as np
import pytest
from scipy import stats as sps

from threshaug.target_transform import (
    LAMBDA_GRID,
    DegenerateTargetError,
    NonInvertibleError,
    TargetTransform,
    boxcox_llf,
    fit_boxcox_lambda,
    fit_target_transform,
    transform_target,
)


def test_constant_target_is_degenerate():
    with pytest.raises(DegenerateTargetError, match="degenerate target"):
        fit_target_transform([0.0, 0.0, 0.0])


def test_lambda_inside_grid():
    y = np.random.default_rng(0).normal(size=500)
    t = fit_target_transform(y)
    assert -2.0 <= t.lam <= 2.0
    assert t.std > 0
    assert t.shift == pytest.approx(1.0 - ((y - y.mean()) / y.std()).min())


def test_lognormal_lambda_near_zero():
    w = np.exp(np.random.default_rng(1).normal(size=10_000))
    lam = fit_boxcox_lambda(w)
    assert abs(lam) < 0.2
    # independent oracle: scipy's log-likelihood evaluated over the same grid
    scores = [sps.boxcox_llf(g, w) for g in LAMBDA_GRID]
    assert lam == pytest.approx(LAMBDA_GRID[int(np.argmax(scores))])


def test_llf_matches_scipy_up_to_constant():
    w = np.random.default_rng(2).gamma(2.0, size=300) + 0.1
    ours = np.array([boxcox_llf(w, g) for g in (-1.0, 0.0, 0.5, 1.7)])
    ref = np.array([sps.boxcox_llf(g, w) for g in (-1.0, 0.0, 0.5, 1.7)])
    np.testing.assert_allclose(ours - ours[0], ref - ref[0], rtol=1e-9, atol=1e-6)


def test_forward_log_case():
    t = TargetTransform(mean=0.0, std=1.0, shift=0.0, lam=0.0)
    np.testing.assert_allclose(transform_target(t, [1.0, np.e]), [0.0, 1.0], atol=1e-15)


def test_forward_hand_evaluation():
    t = TargetTransform(mean=0.0, std=1.0, shift=2.0, lam=1.0)
    np.testing.assert_allclose(transform_target(t, [3.0]), [4.0])


def test_round_trip_on_training_values():
    y = np.random.default_rng(3).gamma(1.5, 4.0, size=400)
    t = fit_target_transform(y)
    back = transform_target(t, transform_target(t, y), "inverse")
    np.testing.assert_allclose(back, y, rtol=1e-9)


def test_round_trip_below_training_range():
    y = np.random.default_rng(4).normal(size=200)
    t = fit_target_transform(y)
    far = np.array([y.min() - 5 * y.std(), y.min() - 0.3, y.max() + 4])
    np.testing.assert_allclose(transform_target(t, transform_target(t, far), "inverse"), far, rtol=1e-9)


def test_forward_is_strictly_increasing():
    rng = np.random.default_rng(5)
    y = rng.lognormal(size=300)
    t = fit_target_transform(y)
    grid = np.linspace(y.min() - 3 * y.std(), y.max() + 3 * y.std(), 2000)
    assert np.all(np.diff(transform_target(t, grid)) > 0)


def test_transformed_training_target_is_standardised():
    y = np.random.default_rng(6).gamma(2.0, size=1000)
    t = fit_target_transform(y)
    v = transform_target(t, y)
    assert v.mean() == pytest.approx(0.0, abs=1e-9)
    assert v.std() == pytest.approx(1.0, rel=1e-9)


def test_inverse_outside_image():
    t = TargetTransform(mean=0.0, std=1.0, shift=1.0, lam=-0.5)
    # image of Box-Cox with lambda < 0 is bounded above by -1/lambda = 2
    with pytest.raises(NonInvertibleError, match="non-invertible"):
        transform_target(t, [2.5], "inverse")


def test_fit_ignores_values_outside_training_set():
    rng = np.random.default_rng(7)
    y = rng.normal(size=100)
    a = fit_target_transform(y[:80])
    y2 = y.copy()
    y2[80:] = rng.normal(size=20) * 1000
    assert fit_target_transform(y2[:80]) == a


def test_bad_direction():
    t = TargetTransform(0.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        transform_target(t, [1.0], "sideways")
