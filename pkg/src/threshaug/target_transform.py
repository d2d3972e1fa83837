"""Centering-reduction followed by a Box-Cox power transform of the target.

All statistics are estimated on training targets only. Standardised values are
shifted so that the training minimum maps to 1 before Box-Cox, and the Box-Cox
output is standardised again so the transformed training target has zero mean
and unit variance (RMSEs are then comparable across datasets). Test values
can fall below the training range; under ``LINEAR_FLOOR`` (in shifted units)
the Box-Cox curve is continued by its tangent line so the map stays finite,
strictly increasing and invertible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LAMBDA_GRID = np.round(np.arange(-200, 201) * 0.01, 2)
LINEAR_FLOOR = 0.5


class DegenerateTargetError(ValueError):
    pass


class NonInvertibleError(ValueError):
    pass


@dataclass(frozen=True)
class TargetTransform:
    mean: float
    std: float
    shift: float
    lam: float
    post_mean: float = 0.0
    post_std: float = 1.0


def boxcox(w, lam: float) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if lam == 0:
        return np.log(w)
    return np.expm1(lam * np.log(w)) / lam


def inv_boxcox(v, lam: float) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if lam == 0:
        return np.exp(v)
    base = lam * v + 1.0
    if np.any(base <= 0):
        raise NonInvertibleError("non-invertible value: lambda * v + 1 <= 0")
    return np.exp(np.log1p(lam * v) / lam)


def boxcox_llf(w, lam: float) -> float:
    """Profile log-likelihood of the Box-Cox model at ``lam`` (up to a constant)."""
    w = np.asarray(w, dtype=np.float64)
    z = boxcox(w, lam)
    var = np.mean((z - z.mean()) ** 2)
    if var <= 0:
        return -np.inf
    return (lam - 1.0) * np.sum(np.log(w)) - 0.5 * len(w) * np.log(var)


def fit_boxcox_lambda(w, grid=LAMBDA_GRID) -> float:
    """Grid maximiser of ``boxcox_llf``; the first maximum wins on ties."""
    w = np.asarray(w, dtype=np.float64)
    if np.any(w <= 0):
        raise ValueError("Box-Cox requires strictly positive values")
    scores = np.array([boxcox_llf(w, lam) for lam in grid])
    return float(grid[int(np.argmax(scores))])


def fit_target_transform(y_train) -> TargetTransform:
    y = np.asarray(y_train, dtype=np.float64).ravel()
    if len(y) < 2:
        raise DegenerateTargetError("degenerate target: need at least 2 values")
    mean = float(y.mean())
    std = float(y.std())
    if not std > 0:
        raise DegenerateTargetError("degenerate target: zero variance")
    z = (y - mean) / std
    shift = float(1.0 - z.min())
    lam = fit_boxcox_lambda(z + shift)
    v = boxcox(z + shift, lam)
    post_std = float(v.std())
    if not post_std > 0:
        raise DegenerateTargetError("degenerate target: zero variance after Box-Cox")
    return TargetTransform(mean=mean, std=std, shift=shift, lam=lam,
                           post_mean=float(v.mean()), post_std=post_std)


def _boxcox_extended(w, lam):
    w = np.asarray(w, dtype=np.float64)
    out = np.empty_like(w)
    low = w < LINEAR_FLOOR
    out[~low] = boxcox(w[~low], lam)
    if np.any(low):
        slope = LINEAR_FLOOR ** (lam - 1.0)
        out[low] = boxcox(LINEAR_FLOOR, lam) + slope * (w[low] - LINEAR_FLOOR)
    return out


def _inv_boxcox_extended(v, lam):
    v = np.asarray(v, dtype=np.float64)
    out = np.empty_like(v)
    v_floor = float(boxcox(LINEAR_FLOOR, lam))
    low = v < v_floor
    out[~low] = inv_boxcox(v[~low], lam)
    if np.any(low):
        slope = LINEAR_FLOOR ** (lam - 1.0)
        out[low] = LINEAR_FLOOR + (v[low] - v_floor) / slope
    return out


def transform_target(t: TargetTransform, y, direction: str = "forward") -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if direction == "forward":
        if not np.all(np.isfinite(y)):
            raise ValueError("target values must be finite")
        v = _boxcox_extended((y - t.mean) / t.std + t.shift, t.lam)
        return (v - t.post_mean) / t.post_std
    if direction == "inverse":
        v = y * t.post_std + t.post_mean
        return (_inv_boxcox_extended(v, t.lam) - t.shift) * t.std + t.mean
    raise ValueError(f"direction must be 'forward' or 'inverse', got {direction!r}")
