"""Forecast combination: equal weights and fully adaptive Bernstein
Online Aggregation, plus greedy forward selection of ensemble members.

Each of the 24 hours runs its own aggregation track.  Per expert k and
hour, the state keeps a cumulative corrected regret R, an adaptive
learning rate eta, the running sum of squared regrets V and the running
regret range E.  After each day's realized prices arrive:

* instantaneous regret r = (expert absolute error) - (ensemble absolute
  error), so poorly performing experts accumulate positive regret;
* R grows by r + eta * r^2 (second-order correction, previous eta);
* eta becomes min(1 / (2 E), sqrt(ln K / V));
* weights are recomputed as eta * exp(-eta * R), normalized per hour,
  with a max-subtraction in the exponent for numerical safety.

Before the first update all weights are uniform.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

HOURS = 24

#: stands in for an unbounded learning rate when an expert has never
#: deviated from the ensemble (zero regret range and variance)
_ETA_CAP = 1e12


@dataclass
class BOAState:
    """Per-expert, per-hour aggregation state; arrays are (K, 24)."""

    weights: np.ndarray
    regret: np.ndarray
    eta: np.ndarray
    sq_regret: np.ndarray
    range_est: np.ndarray
    rounds: int = 0

    @property
    def n_experts(self) -> int:
        return self.weights.shape[0]


def init_boa(n_experts: int) -> BOAState:
    """Uniform weights, zero regrets."""
    if n_experts < 1:
        raise ValueError("need at least one expert")
    shape = (n_experts, HOURS)
    return BOAState(
        weights=np.full(shape, 1.0 / n_experts),
        regret=np.zeros(shape),
        eta=np.zeros(shape),
        sq_regret=np.zeros(shape),
        range_est=np.zeros(shape),
    )


def _check_forecasts(weights, expert_forecasts):
    f = np.asarray(expert_forecasts, dtype=float)
    if f.shape != weights.shape:
        raise ValueError(
            f"expert forecasts shape {f.shape} does not match weights {weights.shape}"
        )
    return f


def ensemble_predict(weights, expert_forecasts) -> np.ndarray:
    """Per-hour convex combination of K expert forecasts, each (K, 24)."""
    weights = np.asarray(weights, dtype=float)
    f = _check_forecasts(weights, expert_forecasts)
    sums = weights.sum(axis=0)
    if (weights < -1e-12).any() or np.abs(sums - 1.0).max() > 1e-9:
        raise ValueError("weights must lie on the simplex for every hour")
    return (weights * f).sum(axis=0)


def boa_update(state: BOAState, expert_forecasts, realized) -> BOAState:
    """Advance the aggregation by one observed day."""
    f = _check_forecasts(state.weights, expert_forecasts)
    realized = np.asarray(realized, dtype=float)
    if realized.shape != (HOURS,):
        raise ValueError(f"realized prices must be (24,), got {realized.shape}")
    if not (np.isfinite(f).all() and np.isfinite(realized).all()):
        raise NumericalError("non-finite forecasts or prices in aggregation update")

    k = state.n_experts
    if k == 1:
        return BOAState(
            weights=state.weights.copy(),
            regret=state.regret.copy(),
            eta=state.eta.copy(),
            sq_regret=state.sq_regret.copy(),
            range_est=state.range_est.copy(),
            rounds=state.rounds + 1,
        )

    combined = (state.weights * f).sum(axis=0)
    expert_loss = np.abs(f - realized)
    combined_loss = np.abs(combined - realized)
    r = expert_loss - combined_loss

    regret = state.regret + r + state.eta * r**2
    sq_regret = state.sq_regret + r**2
    range_est = np.maximum(state.range_est, np.abs(r))
    with np.errstate(divide="ignore"):
        eta = np.minimum(1.0 / (2.0 * range_est), np.sqrt(np.log(k) / sq_regret))
    eta = np.where(np.isfinite(eta), eta, _ETA_CAP)

    log_w = np.log(eta) - eta * regret
    log_w -= log_w.max(axis=0)
    weights = np.exp(log_w)
    weights /= weights.sum(axis=0)

    return BOAState(
        weights=weights,
        regret=regret,
        eta=eta,
        sq_regret=sq_regret,
        range_est=range_est,
        rounds=state.rounds + 1,
    )


def aggregate_online(expert_forecasts, realized, return_weights: bool = False):
    """Run the day-by-day aggregation over a whole period.

    ``expert_forecasts`` is (K, n_days, 24), ``realized`` (n_days, 24).
    Each day is forecast with the weights learned from days before it.
    Returns the (n_days, 24) combined forecasts, the final state, and
    optionally the (n_days, K, 24) weight trajectory.
    """
    f = np.asarray(expert_forecasts, dtype=float)
    realized = np.asarray(realized, dtype=float)
    if f.ndim != 3 or f.shape[2] != HOURS:
        raise ValueError(f"expert forecasts must be (K, n_days, 24), got {f.shape}")
    if realized.shape != f.shape[1:]:
        raise ValueError("realized prices do not align with expert forecasts")
    k, n_days, _ = f.shape
    state = init_boa(k)
    combined = np.empty((n_days, HOURS))
    trajectory = np.empty((n_days, k, HOURS)) if return_weights else None
    for d in range(n_days):
        if return_weights:
            trajectory[d] = state.weights
        combined[d] = ensemble_predict(state.weights, f[:, d])
        state = boa_update(state, f[:, d], realized[d])
    if return_weights:
        return combined, state, trajectory
    return combined, state


def forward_select(candidate_forecasts, realized, size: int = 10) -> tuple:
    """Greedy forward selection of aggregation members.

    Starts from the single candidate with the lowest MAE, then repeatedly
    adds the candidate whose aggregation with the current members yields
    the lowest validation MAE, breaking ties by candidate index.  Returns
    ``(order, mae_trace)``.  A pool smaller than ``size`` is selected
    whole, with a warning.
    """
    tracks = [np.asarray(c, dtype=float) for c in candidate_forecasts]
    if not tracks:
        raise ValueError("empty candidate pool")
    realized = np.asarray(realized, dtype=float)
    for c in tracks:
        if c.shape != realized.shape:
            raise ValueError("candidates must share the validation period grid")
    if len(tracks) < size:
        warnings.warn(
            f"candidate pool ({len(tracks)}) smaller than requested ensemble "
            f"size ({size}); selecting all",
            stacklevel=2,
        )
    target = min(size, len(tracks))

    single_mae = [float(np.abs(c - realized).mean()) for c in tracks]
    order = [int(np.argmin(single_mae))]
    trace = [single_mae[order[0]]]
    while len(order) < target:
        best_j, best_mae = -1, np.inf
        for j in range(len(tracks)):
            if j in order:
                continue
            stacked = np.stack([tracks[i] for i in order] + [tracks[j]])
            combined, _ = aggregate_online(stacked, realized)
            mae = float(np.abs(combined - realized).mean())
            if mae < best_mae:
                best_j, best_mae = j, mae
        order.append(best_j)
        trace.append(best_mae)
    return order, trace


def write_weights_csv(dates, trajectory, path, expert_names=None) -> None:
    """Dump a weight trajectory as (date, hour, expert, weight) rows."""
    trajectory = np.asarray(trajectory, dtype=float)
    n_days, k, _ = trajectory.shape
    names = expert_names or [f"expert_{i}" for i in range(k)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["date", "hour", "expert", "weight"])
        for d in range(n_days):
            for e in range(k):
                for h in range(HOURS):
                    writer.writerow([dates[d], h, names[e], repr(trajectory[d, e, h])])
