"""Tree-structured Parzen Estimator search over the hyperparameter space.

Until ``n_startup`` trials have completed, assignments are drawn
uniformly (log-uniformly where declared).  Afterwards the history is
split at the ``gamma`` MAE quantile into good and bad sets, and each
dimension gets a Parzen mixture for both sets: one Gaussian kernel per
observation plus one uniform pseudo-kernel over the range, which keeps
every region reachable.  Kernel widths follow the distance to the
nearest sorted neighbour (bounds included), clipped from below by an
annealed floor that decays geometrically in the history size, from 25%
of the range down to 0.01%: wide kernels early let the search drift out
of mediocre clusters, tight kernels late give endgame precision.
``n_candidates`` joint candidates are drawn from the good densities and
the candidate maximizing the good/bad log-density ratio wins.  Integer
dimensions are searched in continuous (optionally log) space and rounded
on the way out, so every suggestion respects its bounds and integrality.
Random search uses the same startup sampler and serves as the fallback
whenever densities degenerate.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError, GridcastError
from .model import ModelSpec
from .online import OnlineSchedule, run_backtest
from .seeding import child_seed


@dataclass(frozen=True)
class ParamRange:
    """One tunable dimension: bounds plus scale/type declarations."""

    name: str
    low: float
    high: float
    log: bool = False
    integer: bool = False

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high)):
            raise ValueError(f"{self.name}: bounds must be finite")
        if not self.low < self.high:
            raise ValueError(f"{self.name}: need low < high")
        if self.log and self.low <= 0:
            raise ValueError(f"{self.name}: log scale needs low > 0")

    def to_internal(self, value: float) -> float:
        return math.log(value) if self.log else float(value)

    def from_internal(self, u: float):
        value = math.exp(u) if self.log else float(u)
        value = min(max(value, self.low), self.high)
        if self.integer:
            return int(min(max(round(value), self.low), self.high))
        return value

    def internal_bounds(self) -> tuple:
        return self.to_internal(self.low), self.to_internal(self.high)

    def sample_uniform(self, rng) -> object:
        lo, hi = self.internal_bounds()
        return self.from_internal(rng.uniform(lo, hi))


@dataclass(frozen=True)
class SearchSpace:
    """An ordered collection of tunable dimensions."""

    params: tuple

    def __post_init__(self):
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError("duplicate parameter names in search space")

    def sample_uniform(self, rng) -> dict:
        return {p.name: p.sample_uniform(rng) for p in self.params}


@dataclass
class TrialRecord:
    """Outcome of one tuning trial."""

    trial_id: int
    params: dict
    mae: float
    runtime: float
    failed: bool = False
    forecasts: np.ndarray | None = None


def split_trials(history, gamma: float) -> tuple:
    """Split completed trials at the gamma MAE quantile into (good, bad)."""
    done = sorted(
        (t for t in history if not t.failed and math.isfinite(t.mae)),
        key=lambda t: (t.mae, t.trial_id),
    )
    n = len(done)
    if n < 2:
        return done, []
    n_good = max(1, min(int(math.ceil(gamma * n)), n - 1))
    return done[:n_good], done[n_good:]


def _width_floor(internal_range: float, n_history: int) -> float:
    """Annealed lower clip for kernel widths (see module docstring)."""
    return internal_range * max(0.25 * 2.0 ** (-n_history / 10.0), 1e-4)


def _kernel_widths(values: np.ndarray, lo: float, hi: float, floor: float) -> np.ndarray:
    """Per-kernel width: largest distance to an adjacent sorted neighbour,
    with the bounds acting as neighbours at the edges."""
    order = np.argsort(values)
    ordered = values[order]
    fenced = np.concatenate([[lo], ordered, [hi]])
    gap = np.maximum(ordered - fenced[:-2], fenced[2:] - ordered)
    widths = np.empty_like(gap)
    widths[order] = gap
    return np.clip(widths, max(floor, 1e-12), hi - lo)


def _mixture_logpdf(points, centers, widths, lo, hi) -> np.ndarray:
    """Log density of the Parzen mixture: one Gaussian kernel per
    observation plus one uniform pseudo-kernel over the whole range,
    all equally weighted.  The uniform component keeps every region of
    the space reachable and makes sparsely sampled regions optimistic."""
    z = (points[:, None] - centers[None, :]) / widths[None, :]
    log_kernels = -0.5 * z**2 - np.log(widths)[None, :] - 0.5 * math.log(2 * math.pi)
    log_prior = np.full((points.size, 1), -math.log(hi - lo))
    stacked = np.concatenate([log_kernels, log_prior], axis=1)
    return logsumexp(stacked, axis=1) - math.log(len(centers) + 1)


def _mixture_sample(rng, n, centers, widths, lo, hi) -> np.ndarray:
    component = rng.integers(0, len(centers) + 1, size=n)
    uniform = rng.uniform(lo, hi, size=n)
    safe = np.minimum(component, len(centers) - 1)
    jitter = rng.normal(0.0, 1.0, size=n) * widths[safe]
    return np.where(component == len(centers), uniform,
                    np.clip(centers[safe] + jitter, lo, hi))


def tpe_suggest(history, space: SearchSpace, *, gamma: float = 0.25,
                n_candidates: int = 24, n_startup: int = 10, seed: int = 0) -> dict:
    """Propose one hyperparameter assignment."""
    rng = np.random.default_rng(seed)
    good, bad = split_trials(history, gamma)
    n_history = len(good) + len(bad)
    if n_history < n_startup or not good or not bad:
        return space.sample_uniform(rng)

    assignment = {}
    scores = np.zeros(n_candidates)
    draws = {}
    for p in space.params:
        lo, hi = p.internal_bounds()
        floor = _width_floor(hi - lo, n_history)
        g_vals = np.array([p.to_internal(t.params[p.name]) for t in good])
        b_vals = np.array([p.to_internal(t.params[p.name]) for t in bad])
        w_g = _kernel_widths(g_vals, lo, hi, floor)
        w_b = _kernel_widths(b_vals, lo, hi, floor)
        cand = _mixture_sample(rng, n_candidates, g_vals, w_g, lo, hi)
        dim_score = (
            _mixture_logpdf(cand, g_vals, w_g, lo, hi)
            - _mixture_logpdf(cand, b_vals, w_b, lo, hi)
        )
        if not np.isfinite(dim_score).all():
            # degenerate densities: this dimension falls back to uniform
            draws[p.name] = p.sample_uniform(rng)
            continue
        scores += dim_score
        draws[p.name] = cand
    best = int(np.argmax(scores))
    for p in space.params:
        value = draws[p.name]
        if isinstance(value, np.ndarray):
            assignment[p.name] = p.from_internal(float(value[best]))
        else:
            assignment[p.name] = value
    return assignment


def default_search_space(architecture: str, d_init_max: int = 1092) -> SearchSpace:
    """Default tuning ranges for one architecture."""
    from .model import ARCHITECTURES

    if architecture not in ARCHITECTURES:
        raise ValueError(f"unknown architecture {architecture!r}")
    _, has_hidden, uses_ols = ARCHITECTURES[architecture]
    params = [
        ParamRange("d_init", 56, d_init_max, integer=True),
        ParamRange("d_up", 1, 56, integer=True),
        ParamRange("lr_init", 1e-4, 1e-1, log=True),
        ParamRange("lr_up", 1e-4, 1e-1, log=True),
        ParamRange("lambda1", 1e-6, 1e1, log=True),
        ParamRange("lambda2", 1e-6, 1e1, log=True),
    ]
    if has_hidden:
        params.append(ParamRange("hidden_n", 8, 256, log=True, integer=True))
    if uses_ols:
        params.append(ParamRange("ols_share_alpha", 0.0, 2.0))
    return SearchSpace(params=tuple(params))


_SCHEDULE_KEYS = ("d_init", "d_up", "lr_init", "lr_up", "epochs_init", "epochs_up")
_SPEC_KEYS = ("hidden_n", "lambda1", "lambda2", "ols_share_alpha", "leak_alpha")


def apply_assignment(spec: ModelSpec, schedule: OnlineSchedule,
                     assignment: dict, seed: int | None = None) -> tuple:
    """Fold a sampled assignment into (ModelSpec, OnlineSchedule)."""
    spec_kw, sched_kw = {}, {}
    for name, value in assignment.items():
        if name in _SCHEDULE_KEYS:
            sched_kw[name] = value
        elif name in _SPEC_KEYS:
            spec_kw[name] = value
        else:
            raise ConfigError(f"assignment has unknown hyperparameter {name!r}")
    if seed is not None:
        spec_kw["seed"] = seed
    return replace(spec, **spec_kw), replace(schedule, **sched_kw)


def run_study(spec_template: ModelSpec, schedule_template: OnlineSchedule,
              space: SearchSpace, designs, validation_start, validation_end, *,
              n_trials: int, seed: int = 0, gamma: float = 0.25,
              n_candidates: int = 24, n_startup: int = 10,
              n_jobs: int = 1) -> list:
    """Run a tuning study over the validation period; returns records
    ranked by MAE (failed trials last, at +inf).

    Trials run in deterministic batches of ``n_jobs``: every batch's
    assignments are suggested from the history available when the batch
    starts, so results do not depend on worker scheduling.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be >= 1")
    history: list = []
    n_jobs = max(1, int(n_jobs))
    trial_id = 0
    while trial_id < n_trials:
        batch = []
        for _ in range(min(n_jobs, n_trials - trial_id)):
            assignment = tpe_suggest(
                history, space, gamma=gamma, n_candidates=n_candidates,
                n_startup=n_startup, seed=child_seed(seed, "suggest", trial_id),
            )
            batch.append((trial_id, assignment))
            trial_id += 1
        if n_jobs == 1 or len(batch) == 1:
            outcomes = [
                _evaluate_trial(spec_template, schedule_template, designs,
                                validation_start, validation_end, tid, assignment,
                                child_seed(seed, "trial", tid))
                for tid, assignment in batch
            ]
        else:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=n_jobs) as pool:
                futures = [
                    pool.submit(_evaluate_trial, spec_template, schedule_template,
                                designs, validation_start, validation_end, tid,
                                assignment, child_seed(seed, "trial", tid))
                    for tid, assignment in batch
                ]
                outcomes = [f.result() for f in futures]
        history.extend(outcomes)
    return sorted(history, key=lambda t: (t.mae, t.trial_id))


def _evaluate_trial(spec_template, schedule_template, designs, start, end,
                    trial_id, assignment, model_seed) -> TrialRecord:
    tick = time.perf_counter()
    try:
        spec, schedule = apply_assignment(spec_template, schedule_template,
                                          assignment, seed=model_seed)
        result = run_backtest(spec, schedule, designs, start, end)
        return TrialRecord(
            trial_id=trial_id,
            params=dict(assignment),
            mae=result.metrics.mae,
            runtime=time.perf_counter() - tick,
            forecasts=result.forecasts,
        )
    except (GridcastError, ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        warnings.warn(f"trial {trial_id} failed: {exc}", stacklevel=2)
        return TrialRecord(
            trial_id=trial_id,
            params=dict(assignment),
            mae=float("inf"),
            runtime=time.perf_counter() - tick,
            failed=True,
        )


def assignment_digest(params: dict) -> str:
    """Content address of one assignment (stable across runs)."""
    blob = json.dumps(params, sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_study_csv(records, path) -> None:
    """Persist ranked trial records as CSV."""
    names = sorted({name for r in records for name in r.params})
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["trial_id", *names, "mae", "runtime_seconds", "failed"])
        for r in records:
            row = [r.trial_id]
            row += [repr(r.params[n]) if n in r.params else "" for n in names]
            row += [repr(r.mae), repr(r.runtime), int(r.failed)]
            writer.writerow(row)


def save_trial_forecasts(directory, record: TrialRecord) -> str:
    """Store a trial's validation forecasts under a content address."""
    from pathlib import Path

    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    digest = assignment_digest(record.params)
    path = directory / f"{digest}.npz"
    np.savez(
        path,
        forecasts=record.forecasts,
        mae=record.mae,
        trial_id=record.trial_id,
        params=np.frombuffer(json.dumps(record.params, sort_keys=True).encode(),
                             dtype=np.uint8),
    )
    return str(path)


def load_trial_forecasts(path) -> TrialRecord:
    with np.load(path) as blob:
        params = json.loads(bytes(blob["params"]).decode())
        return TrialRecord(
            trial_id=int(blob["trial_id"]),
            params=params,
            mae=float(blob["mae"]),
            runtime=0.0,
            forecasts=blob["forecasts"],
        )
