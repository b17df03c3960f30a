"""Accuracy metrics, the weekly-persistence benchmark, and the
Diebold-Mariano test of equal forecast accuracy.

All functions operate on aligned (n_days, 24) grids.  The relative MAE
divides a model's MAE by that of the persistence benchmark: yesterday's
prices on Tuesday through Friday, last week's prices on Saturday, Sunday
and Monday.  The DM test compares daily aggregate errors (the 24-hour
sums), one-sided with the alternative "A is more accurate than B".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from .errors import DataError


@dataclass(frozen=True)
class MetricReport:
    """Summary accuracy of one forecast track (EUR/MWh except rmae)."""

    rmse: float
    mae: float
    rmae: float
    hourly_rmse: np.ndarray
    n_days: int


@dataclass(frozen=True)
class DMResult:
    """One-sided Diebold-Mariano outcome for 'A better than B'."""

    statistic: float
    p_value: float
    n_days: int
    direction: str = "A_better_than_B"
    degenerate: bool = False


def _aligned(forecasts, realized):
    f = np.asarray(forecasts, dtype=float)
    r = np.asarray(realized, dtype=float)
    if f.ndim != 2 or f.shape[1] != 24:
        raise DataError(f"forecast grid must be (n_days, 24), got {f.shape}")
    if f.shape != r.shape:
        raise DataError(f"forecast shape {f.shape} != realized shape {r.shape}")
    if f.shape[0] == 0:
        raise DataError("empty forecast grid")
    return f, r


def hourly_rmse(forecasts, realized) -> np.ndarray:
    """Per-hour root mean squared error over all days."""
    f, r = _aligned(forecasts, realized)
    return np.sqrt(((f - r) ** 2).mean(axis=0))


def metrics(forecasts, realized, naive_forecasts=None) -> MetricReport:
    """RMSE, MAE, per-hour RMSE, and (when the benchmark is supplied)
    the MAE relative to the persistence benchmark."""
    f, r = _aligned(forecasts, realized)
    err = f - r
    rmse = float(np.sqrt((err**2).mean()))
    mae = float(np.abs(err).mean())
    rmae = float("nan")
    if naive_forecasts is not None:
        nf, _ = _aligned(naive_forecasts, realized)
        naive_mae = float(np.abs(nf - r).mean())
        if naive_mae == 0.0:
            raise DataError("benchmark MAE is zero; relative MAE undefined")
        rmae = mae / naive_mae
    return MetricReport(
        rmse=rmse,
        mae=mae,
        rmae=rmae,
        hourly_rmse=hourly_rmse(f, r),
        n_days=f.shape[0],
    )


def naive_forecast(prices, weekdays, day_index: int) -> np.ndarray:
    """Persistence benchmark for one day.

    Yesterday's prices if the day is Tuesday..Friday (weekday 1..4),
    otherwise the prices from seven days earlier.
    """
    prices = np.asarray(prices, dtype=float)
    lag = 1 if weekdays[day_index] in (1, 2, 3, 4) else 7
    if day_index - lag < 0:
        raise DataError(f"day {day_index}: lag {lag} not available")
    return prices[day_index - lag].copy()


def naive_forecasts(prices, weekdays, day_indices) -> np.ndarray:
    """Stacked persistence benchmark over several days."""
    return np.stack([naive_forecast(prices, weekdays, int(i)) for i in day_indices])


def dm_test(forecasts_a, forecasts_b, realized) -> DMResult:
    """One-sided DM test on daily aggregate absolute errors.

    The loss differential is |sum_h error_A| - |sum_h error_B| per day;
    the statistic is its mean over the sample standard error, referred to
    the standard normal lower tail.  A zero-variance differential is
    flagged degenerate: p = 0.5 for a perfect tie, 0 or 1 by sign
    otherwise.
    """
    fa, r = _aligned(forecasts_a, realized)
    fb, _ = _aligned(forecasts_b, realized)
    if fa.shape != fb.shape:
        raise DataError("forecast grids differ in shape")
    n = fa.shape[0]
    if n < 2:
        raise DataError("DM test needs at least 2 days")
    err_a = fa.sum(axis=1) - r.sum(axis=1)
    err_b = fb.sum(axis=1) - r.sum(axis=1)
    d = np.abs(err_a) - np.abs(err_b)
    mean = float(d.mean())
    var = float(d.var(ddof=1))
    if var == 0.0:
        if mean == 0.0:
            return DMResult(statistic=0.0, p_value=0.5, n_days=n, degenerate=True)
        p = 0.0 if mean < 0 else 1.0
        stat = float(np.sign(mean) * np.inf)
        return DMResult(statistic=stat, p_value=p, n_days=n, degenerate=True)
    stat = mean / np.sqrt(var / n)
    return DMResult(statistic=float(stat), p_value=float(norm.cdf(stat)), n_days=n)


def pairwise_dm_matrix(forecast_tracks: dict, realized) -> tuple:
    """All-pairs DM p-values; returns (names, matrix).

    ``matrix[i, j]`` is the p-value of "model i more accurate than
    model j"; the diagonal is the degenerate tie value 0.5.
    """
    names = list(forecast_tracks)
    k = len(names)
    out = np.full((k, k), 0.5)
    for i, a in enumerate(names):
        for j, b in enumerate(names):
            if i != j:
                out[i, j] = dm_test(forecast_tracks[a], forecast_tracks[b], realized).p_value
    return names, out
