"""Partial online learning: one large initial fit, then small warm-started
update windows, rolling one day at a time through the forecast period.

Iteration 1 trains on the ``d_init`` days before the first forecast day.
Every later iteration starts from the previous iteration's weights and
trains only on the ``d_up`` most recent days (the newly observed day
included), with fewer epochs and its own learning rate.  Adam moments are
reset at each iteration; only the parameters carry over.  The scaler is
fitted once on the initial window and kept fixed so the carried-over
weights always see the same input scale.  A classic full-refit rolling
baseline (cold start, initial epochs every day) is provided for runtime
and accuracy comparisons.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

import numpy as np
import pandas as pd

from .errors import DataError
from .evaluation import MetricReport, metrics, naive_forecasts
from .features import DesignSet, fit_scaler
from .model import ModelSpec, forward, init_ols, init_random
from .training import AdamState, TrainConfig, train_window


@dataclass(frozen=True)
class OnlineSchedule:
    """Window sizes, epochs and learning rates of the online procedure."""

    d_init: int
    d_up: int
    lr_init: float
    lr_up: float
    epochs_init: int = 60
    epochs_up: int = 10

    def __post_init__(self):
        if not (self.d_init >= self.d_up >= 1):
            raise ValueError("need d_init >= d_up >= 1")
        if not (self.epochs_init >= self.epochs_up >= 1):
            raise ValueError("need epochs_init >= epochs_up >= 1")
        if self.lr_init <= 0 or self.lr_up <= 0:
            raise ValueError("learning rates must be > 0")


@dataclass(frozen=True)
class IterationInfo:
    """Audit record of one backtest iteration."""

    date: object
    train_lo: int
    train_hi: int
    epochs: int
    seconds: float
    final_loss: float


@dataclass
class BacktestResult:
    """Out-of-sample forecasts plus timing and accuracy summaries."""

    dates: np.ndarray
    forecasts: np.ndarray
    realized: np.ndarray
    iteration_seconds: np.ndarray
    total_seconds: float
    metrics: MetricReport
    iterations: list
    param_history: list | None = None

    @property
    def n_days(self) -> int:
        return len(self.dates)


def _prepare(designs: DesignSet, schedule_window: int, forecast_start, forecast_end):
    t0 = designs.index_of(forecast_start)
    t1 = designs.index_of(forecast_end)
    if t1 < t0:
        raise DataError("forecast_end precedes forecast_start")
    lo = t0 - schedule_window
    if lo < 0 or not designs.valid[lo:t0].all():
        raise DataError(
            f"insufficient history: need {schedule_window} valid days before "
            f"{forecast_start}"
        )
    scaler = fit_scaler(designs, rows=np.arange(lo, t0))
    X = scaler.transform(designs.X[lo : t1 + 1])
    Y = designs.Y[lo : t1 + 1]
    return t0, t1, lo, X, Y, scaler


def _initial_params(spec: ModelSpec, X_init, Y_init, layout):
    if spec.uses_ols:
        return init_ols(spec, X_init, Y_init, layout)
    return init_random(spec, layout)


def _result(designs, t0, t1, forecasts, iteration_seconds, total, infos, history):
    realized = designs.Y[t0 : t1 + 1]
    naive = naive_forecasts(designs.Y, designs.weekday, range(t0, t1 + 1))
    report = metrics(forecasts, realized, naive)
    return BacktestResult(
        dates=designs.dates[t0 : t1 + 1].copy(),
        forecasts=forecasts,
        realized=realized.copy(),
        iteration_seconds=np.asarray(iteration_seconds),
        total_seconds=total,
        metrics=report,
        iterations=infos,
        param_history=history,
    )


def run_backtest(spec: ModelSpec, schedule: OnlineSchedule, designs: DesignSet,
                 forecast_start, forecast_end,
                 keep_param_history: bool = False) -> BacktestResult:
    """Roll the partial online procedure over [forecast_start, forecast_end].

    Every forecast is strictly out of sample: the model that predicts day
    t has seen data up to day t-1 only.
    """
    t0, t1, lo, X, Y, _ = _prepare(designs, schedule.d_init, forecast_start, forecast_end)
    layout = designs.layout
    cfg_init = TrainConfig(schedule.epochs_init, schedule.lr_init)
    cfg_up = TrainConfig(schedule.epochs_up, schedule.lr_up)

    params = _initial_params(spec, X[: schedule.d_init], Y[: schedule.d_init], layout)
    forecasts = np.empty((t1 - t0 + 1, 24))
    seconds, infos = [], []
    history = [] if keep_param_history else None
    started = time.perf_counter()

    for k, t in enumerate(range(t0, t1 + 1)):
        tick = time.perf_counter()
        if k == 0:
            win_lo, win_hi, cfg = lo, t0, cfg_init
        else:
            win_lo, win_hi, cfg = t - schedule.d_up, t, cfg_up
        if history is not None:
            history.append(params.copy())
        state = AdamState.for_params(params)  # fresh moments, warm parameters
        params, state, trace = train_window(
            spec, params, state, X[win_lo - lo : win_hi - lo], Y[win_lo - lo : win_hi - lo],
            layout, cfg,
        )
        forecasts[k] = forward(spec, params, X[t - lo], layout)
        elapsed = time.perf_counter() - tick
        seconds.append(elapsed)
        infos.append(
            IterationInfo(
                date=designs.dates[t],
                train_lo=win_lo,
                train_hi=win_hi,
                epochs=cfg.epochs,
                seconds=elapsed,
                final_loss=trace[-1],
            )
        )
    if history is not None:
        history.append(params.copy())

    total = time.perf_counter() - started
    return _result(designs, t0, t1, forecasts, seconds, total, infos, history)


def run_full_refit_baseline(spec: ModelSpec, schedule: OnlineSchedule,
                            designs: DesignSet, forecast_start, forecast_end,
                            window: int | None = None) -> BacktestResult:
    """Classic rolling-window backtest: cold start and full training
    (``epochs_init`` at ``lr_init``) on the last ``window`` days, every day."""
    window = window or schedule.d_init
    t0, t1, lo, X, Y, _ = _prepare(designs, window, forecast_start, forecast_end)
    layout = designs.layout
    cfg = TrainConfig(schedule.epochs_init, schedule.lr_init)

    forecasts = np.empty((t1 - t0 + 1, 24))
    seconds, infos = [], []
    started = time.perf_counter()
    for k, t in enumerate(range(t0, t1 + 1)):
        tick = time.perf_counter()
        win_lo, win_hi = t - window, t
        params = _initial_params(
            spec, X[win_lo - lo : win_hi - lo], Y[win_lo - lo : win_hi - lo], layout
        )
        state = AdamState.for_params(params)
        params, state, trace = train_window(
            spec, params, state, X[win_lo - lo : win_hi - lo], Y[win_lo - lo : win_hi - lo],
            layout, cfg,
        )
        forecasts[k] = forward(spec, params, X[t - lo], layout)
        elapsed = time.perf_counter() - tick
        seconds.append(elapsed)
        infos.append(
            IterationInfo(
                date=designs.dates[t],
                train_lo=win_lo,
                train_hi=win_hi,
                epochs=cfg.epochs,
                seconds=elapsed,
                final_loss=trace[-1],
            )
        )
    total = time.perf_counter() - started
    return _result(designs, t0, t1, forecasts, seconds, total, infos, None)


def write_forecasts_csv(result: BacktestResult, path) -> None:
    """Persist per-day forecasts as date, h00..h23 (deterministic bytes)."""
    frame = pd.DataFrame(
        result.forecasts, columns=[f"h{h:02d}" for h in range(24)]
    )
    frame.insert(0, "date", [d.isoformat() for d in result.dates])
    frame.to_csv(path, index=False)


def write_metrics_json(report: MetricReport, path) -> None:
    payload = {
        "rmse": report.rmse,
        "mae": report.mae,
        "rmae": report.rmae,
        "hourly_rmse": [float(v) for v in report.hourly_rmse],
        "n_days": report.n_days,
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_timing_json(result: BacktestResult, path) -> None:
    """Runtime artifact, kept separate: its bytes vary run to run."""
    payload = {
        "total_seconds": result.total_seconds,
        "n_iterations": int(result.n_days),
        "mean_iteration_seconds": float(result.iteration_seconds.mean()),
        "max_iteration_seconds": float(result.iteration_seconds.max()),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
