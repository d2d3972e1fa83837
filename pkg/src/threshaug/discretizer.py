"""Equal-frequency thresholds on the target and the matching binary classes."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdSet:
    thresholds: np.ndarray
    requested_s: int
    warning: str | None = None

    @property
    def effective_s(self) -> int:
        return len(self.thresholds)


def bin_ends(n: int, s: int) -> np.ndarray:
    """Exclusive end offsets of the first ``s`` of ``s + 1`` equal-frequency bins.

    The first ``n % (s + 1)`` bins hold one extra element.
    """
    base, extra = divmod(n, s + 1)
    sizes = np.full(s + 1, base)
    sizes[:extra] += 1
    return np.cumsum(sizes)[:-1]


def compute_thresholds(y_train, s: int) -> ThresholdSet:
    """Place ``s`` thresholds at the midpoints between equal-frequency bins.

    Thresholds that coincide because of tied target values are merged, so the
    returned set may hold fewer than ``s`` values.
    """
    if s < 1:
        raise ValueError(f"number of thresholds must be >= 1, got {s}")
    y = np.sort(np.asarray(y_train, dtype=np.float64).ravel())
    if len(y) < s + 1:
        raise ValueError(f"need at least {s + 1} training values for {s} thresholds, got {len(y)}")
    ends = bin_ends(len(y), s)
    mids = 0.5 * (y[ends - 1] + y[ends])
    thresholds = np.unique(mids)
    warning = None
    if len(thresholds) < s:
        warning = (
            f"tied target values merged {s - len(thresholds)} duplicate thresholds; "
            f"effective S = {len(thresholds)} (requested {s})"
        )
        log.warning(warning)
    return ThresholdSet(thresholds=thresholds, requested_s=s, warning=warning)


def encode_classes(y, t: ThresholdSet) -> np.ndarray:
    """0/1 matrix whose column ``i`` is ``y <= thresholds[i]``."""
    y = np.asarray(y, dtype=np.float64).reshape(-1, 1)
    return (y <= t.thresholds.reshape(1, -1)).astype(np.int8)
