"""Regularized loss, exact subgradients, Adam updates, and window training.

The objective is the mean absolute error over every (day, hour) cell of
the window, plus ``lambda1`` times the squared L2 norm of all trainable
parameters and ``lambda2`` times the L1 norm of the output-side weights
(the skip matrix ``B`` and the hidden-to-output matrix ``W2``).  Training
runs full-window batch gradients: the windows are at most a few years of
days, and determinism matters more than stochastic shuffling here.  A
squared-error mode exists purely so tests can compare against
closed-form least-squares solutions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .features import FeatureLayout
from .model import PARAM_FIELDS, ModelSpec, ParamSet, leaky_relu

_LOSS_MODES = ("l1", "l2")


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings for one training window."""

    epochs: int
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    loss_mode: str = "l1"

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if self.loss_mode not in _LOSS_MODES:
            raise ValueError(f"loss_mode must be one of {_LOSS_MODES}")


@dataclass
class AdamState:
    """First/second moment accumulators and the step counter."""

    m: dict
    v: dict
    t: int = 0

    @classmethod
    def for_params(cls, params: ParamSet) -> "AdamState":
        return cls(
            m={name: np.zeros_like(a) for name, a in params.arrays()},
            v={name: np.zeros_like(a) for name, a in params.arrays()},
            t=0,
        )


def _predictions(spec, params, X, layout):
    """Forward pass keeping the hidden pre-activations for backprop."""
    mask = layout.skip_mask(spec.skip_kind)
    pred = params.b0 + X @ (params.B * mask).T
    z1 = hidden = None
    if spec.has_hidden:
        z1 = X @ params.W1.T + params.b1
        hidden = leaky_relu(z1, spec.leak_alpha)
        pred = pred + hidden @ params.W2.T + params.b2
    return pred, z1, hidden


def _check_window(X, Y):
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training window is empty")
    if Y.shape != (X.shape[0], 24):
        raise ValueError(f"target shape {Y.shape} does not match window {X.shape}")
    return X, Y


def loss(spec: ModelSpec, params: ParamSet, X, Y, layout: FeatureLayout,
         loss_mode: str = "l1") -> float:
    """Regularized training objective over a window."""
    X, Y = _check_window(X, Y)
    pred, _, _ = _predictions(spec, params, X, layout)
    resid = pred - Y
    if loss_mode == "l1":
        data = float(np.abs(resid).mean())
    else:
        data = float((resid**2).mean())
    ridge = sum(float((a**2).sum()) for _, a in params.arrays())
    lasso = float(np.abs(params.B).sum()) + float(np.abs(params.W2).sum())
    return data + spec.lambda1 * ridge + spec.lambda2 * lasso


def gradient(spec: ModelSpec, params: ParamSet, X, Y, layout: FeatureLayout,
             loss_mode: str = "l1") -> dict:
    """Exact subgradient of :func:`loss`, shaped like the ParamSet.

    Subgradients at the |.| kinks are taken as 0.  Frozen parameters (the
    plain MLP's skip path, off-mask entries of ``B``) get zero gradient.
    """
    X, Y = _check_window(X, Y)
    pred, z1, hidden = _predictions(spec, params, X, layout)
    resid = pred - Y
    cells = resid.size
    if loss_mode == "l1":
        g_out = np.sign(resid) / cells
    else:
        g_out = 2.0 * resid / cells

    grads = {name: np.zeros_like(a) for name, a in params.arrays()}
    if spec.has_skip:
        mask = layout.skip_mask(spec.skip_kind)
        grads["b0"] = g_out.sum(axis=0)
        grads["B"] = (g_out.T @ X) * mask
    if spec.has_hidden:
        grads["W2"] = g_out.T @ hidden
        grads["b2"] = g_out.sum(axis=0)
        g_hidden = g_out @ params.W2
        g_z1 = g_hidden * np.where(z1 >= 0, 1.0, spec.leak_alpha)
        grads["W1"] = g_z1.T @ X
        grads["b1"] = g_z1.sum(axis=0)

    if spec.lambda1 > 0:
        for name, a in params.arrays():
            if grads[name].size:
                grads[name] += 2.0 * spec.lambda1 * a
    if spec.lambda2 > 0:
        grads["B"] += spec.lambda2 * np.sign(params.B)
        grads["W2"] += spec.lambda2 * np.sign(params.W2)
    return grads


def adam_step(params: ParamSet, grads: dict, state: AdamState, lr: float,
              beta1: float = 0.9, beta2: float = 0.999,
              epsilon: float = 1e-8) -> tuple:
    """One bias-corrected Adam update; returns new (params, state)."""
    for name in PARAM_FIELDS:
        if not np.isfinite(grads[name]).all():
            raise NumericalError(f"non-finite gradient in {name}")
    t = state.t + 1
    new_params, new_m, new_v = {}, {}, {}
    for name, a in params.arrays():
        g = grads[name]
        m = beta1 * state.m[name] + (1 - beta1) * g
        v = beta2 * state.v[name] + (1 - beta2) * g**2
        m_hat = m / (1 - beta1**t)
        v_hat = v / (1 - beta2**t)
        new_params[name] = a - lr * m_hat / (np.sqrt(v_hat) + epsilon)
        new_m[name], new_v[name] = m, v
    return ParamSet(**new_params), AdamState(m=new_m, v=new_v, t=t)


def train_window(spec: ModelSpec, params: ParamSet, state: AdamState, X, Y,
                 layout: FeatureLayout, config: TrainConfig) -> tuple:
    """Run ``config.epochs`` full-window updates.

    Returns ``(params, state, trace)`` where ``trace`` holds the loss
    after each epoch.  Aborts on a non-finite loss.
    """
    X, Y = _check_window(X, Y)
    trace = []
    for epoch in range(config.epochs):
        grads = gradient(spec, params, X, Y, layout, config.loss_mode)
        params, state = adam_step(
            params, grads, state, config.learning_rate,
            config.beta1, config.beta2, config.epsilon,
        )
        value = loss(spec, params, X, Y, layout, config.loss_mode)
        if not np.isfinite(value):
            raise NumericalError(
                f"non-finite loss at epoch {epoch}: lr={config.learning_rate}, "
                f"window={X.shape[0]} days"
            )
        trace.append(value)
    return params, state, trace


def export_loss_trace(trace, path) -> None:
    """Write an (epoch, loss) CSV for diagnostics."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["epoch", "loss"])
        for i, value in enumerate(trace):
            writer.writerow([i, repr(float(value))])
