"""RMSE, paired t-test, win/tie/loss counts, Friedman ranks and the Nemenyi CD.

The Student-t and chi-square tails are evaluated through the regularized
incomplete beta and gamma functions implemented here (Lentz continued
fractions), so p-values do not depend on an external statistics package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Two-tailed Nemenyi critical values q_alpha (studentized range / sqrt 2), k = 2..10.
NEMENYI_Q = {
    0.05: (1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164),
    0.10: (1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920),
}

_EPS = 1e-16
_TINY = 1e-300


def rmse(y, y_hat) -> float:
    y = np.asarray(y, dtype=np.float64).ravel()
    y_hat = np.asarray(y_hat, dtype=np.float64).ravel()
    if y.shape != y_hat.shape:
        raise ValueError(f"length mismatch: {y.shape[0]} vs {y_hat.shape[0]}")
    if y.size == 0:
        raise ValueError("rmse of empty vectors")
    return float(np.sqrt(np.mean((y - y_hat) ** 2)))


def _betacf(a, b, x):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, 1000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    lbeta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
    front = math.exp(lbeta + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def gammaincc(a: float, x: float) -> float:
    """Regularized upper incomplete gamma function Q(a, x)."""
    if x < 0 or a <= 0:
        raise ValueError("need a > 0 and x >= 0")
    if x == 0:
        return 1.0
    log_front = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        term = 1.0 / a
        total = term
        ap = a
        for _ in range(10000):
            ap += 1.0
            term *= x / ap
            total += term
            if abs(term) < abs(total) * _EPS:
                return 1.0 - total * math.exp(log_front)
        raise ArithmeticError("incomplete gamma series did not converge")
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, 10000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(log_front) * h
    raise ArithmeticError("incomplete gamma continued fraction did not converge")


def student_t_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return betainc(0.5 * df, 0.5, df / (df + t * t))


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float


def paired_t_test(a, b) -> TTestResult:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError("paired samples must have equal length")
    n = a.size
    if n < 2:
        raise ValueError("paired t-test needs at least 2 pairs")
    d = a - b
    mean = float(d.mean())
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if mean == 0.0:
            return TTestResult(0.0, 1.0)
        return TTestResult(math.copysign(math.inf, mean), 0.0)
    t = mean / (sd / math.sqrt(n))
    return TTestResult(t, student_t_two_sided(t, n - 1))


@dataclass(frozen=True)
class ComparisonCell:
    native_rmse_mean: float
    aug_rmse_mean: float
    p_value: float
    alpha: float = 0.05

    @property
    def outcome(self) -> str:
        if self.p_value >= self.alpha:
            return "tie"
        return "win" if self.aug_rmse_mean < self.native_rmse_mean else "loss"

    @property
    def significant(self) -> bool:
        return self.outcome != "tie"


def compare(native, augmented, alpha: float = 0.05) -> ComparisonCell:
    """Comparison cell from paired per-fold RMSEs."""
    native = np.asarray(native, dtype=np.float64)
    augmented = np.asarray(augmented, dtype=np.float64)
    res = paired_t_test(augmented, native)
    return ComparisonCell(float(native.mean()), float(augmented.mean()), res.p, alpha)


@dataclass(frozen=True)
class WinTieLoss:
    wins: int
    ties: int
    losses: int

    def __str__(self) -> str:
        return f"{self.losses} / {self.ties} / {self.wins}"


def win_tie_loss(cells) -> WinTieLoss:
    outcomes = [c.outcome for c in cells]
    return WinTieLoss(outcomes.count("win"), outcomes.count("tie"), outcomes.count("loss"))


def rank_rows(table) -> np.ndarray:
    """Average ranks within each row; rank 1 is the smallest value."""
    table = np.asarray(table, dtype=np.float64)
    ranks = np.empty_like(table)
    for r, row in enumerate(table):
        order = np.argsort(row, kind="mergesort")
        sorted_row = row[order]
        i = 0
        while i < len(row):
            j = i
            while j + 1 < len(row) and sorted_row[j + 1] == sorted_row[i]:
                j += 1
            ranks[r, order[i:j + 1]] = 0.5 * (i + j) + 1.0
            i = j + 1
    return ranks


@dataclass(frozen=True)
class RankSummary:
    variants: tuple[str, ...]
    mean_ranks: np.ndarray
    n_datasets: int
    cd: float
    chi2: float
    chi2_p: float
    iman_davenport_f: float
    iman_davenport_p: float
    alpha: float = 0.05


def friedman_mean_ranks(rmse_table, variants=None, alpha: float = 0.05) -> RankSummary:
    """Friedman ranking of a datasets x variants RMSE table (lower RMSE is better)."""
    table = np.asarray(rmse_table, dtype=np.float64)
    if table.ndim != 2:
        raise ValueError("rmse table must be 2-d (datasets x variants)")
    n, k = table.shape
    if k < 2 or n < 2:
        raise ValueError(f"need >= 2 datasets and >= 2 variants, got {n} x {k}")
    if variants is None:
        variants = tuple(f"v{j}" for j in range(k))
    if len(variants) != k:
        raise ValueError("one variant name per column required")
    mean_ranks = rank_rows(table).mean(axis=0)
    chi2 = 12.0 * n / (k * (k + 1)) * (np.sum(mean_ranks ** 2) - k * (k + 1) ** 2 / 4.0)
    chi2 = max(float(chi2), 0.0)
    chi2_p = gammaincc(0.5 * (k - 1), 0.5 * chi2)
    denom = n * (k - 1) - chi2
    if denom > 0:
        f = (n - 1) * chi2 / denom
        df1, df2 = k - 1, (k - 1) * (n - 1)
        f_p = betainc(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * f))
    else:
        f, f_p = math.inf, 0.0
    cd = nemenyi_cd(k, n, alpha) if k <= 10 else math.nan
    return RankSummary(tuple(variants), mean_ranks, n, cd, chi2, chi2_p, float(f), float(f_p), alpha)


def nemenyi_cd(k: int, n_datasets: int, alpha: float = 0.05) -> float:
    """Critical difference of mean ranks for ``k`` methods over ``n_datasets``."""
    if alpha not in NEMENYI_Q:
        raise ValueError(f"alpha must be one of {sorted(NEMENYI_Q)}")
    if not 2 <= k <= 10:
        raise ValueError(f"Nemenyi q is tabulated for 2 <= k <= 10, got k={k}")
    if n_datasets < 2:
        raise ValueError("need at least 2 datasets")
    q = NEMENYI_Q[alpha][k - 2]
    return q * math.sqrt(k * (k + 1) / (6.0 * n_datasets))
