"""The network family: per-hour linear skip paths, an optional
leaky-ReLU hidden layer, and both random and least-squares initialization.

Every architecture maps one day's full regressor vector to 24 hourly
prices.  The linear part is stored as a (24, n_features) weight matrix
``B`` plus intercepts ``b0``; a 0/1 skip mask (from the feature layout)
restricts each output hour to its active regressors, so the reduced
variants simply use a sparser mask than the full ones.  The hidden part
is ``W2 @ leaky_relu(W1 @ x + b1) + b2`` and always consumes the full
vector.  Off-mask entries of ``B`` are structural zeros: they are never
drawn, never receive gradient, and are masked again on every forward
pass.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DataError, NumericalError
from .features import FeatureLayout
from .marketdata import HOURS_PER_DAY

#: architecture name -> (skip kind, has hidden layer, least-squares init)
ARCHITECTURES = {
    "reduced_linear": ("reduced", False, False),
    "full_linear": ("full", False, False),
    "mlp": (None, True, False),
    "mlp_reduced_linear": ("reduced", True, False),
    "mlp_full_linear": ("full", True, False),
    "reduced_linear_ols": ("reduced", False, True),
    "mlp_reduced_linear_ols": ("reduced", True, True),
}

PARAM_FIELDS = ("b0", "B", "W1", "b1", "W2", "b2")

#: diagonal jitter added to a singular normal-equation system
_OLS_JITTER = 1e-8


@dataclass(frozen=True)
class ModelSpec:
    """Architecture choice plus the hyperparameters that shape the loss."""

    architecture: str
    hidden_n: int = 0
    leak_alpha: float = 0.01
    lambda1: float = 0.0
    lambda2: float = 0.0
    ols_share_alpha: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}")
        if self.has_hidden != (self.hidden_n > 0):
            raise ValueError(
                f"{self.architecture} requires hidden_n > 0 iff it has an MLP part "
                f"(got hidden_n={self.hidden_n})"
            )
        if self.uses_ols != (self.ols_share_alpha is not None):
            raise ValueError(
                f"ols_share_alpha must be set exactly for the OLS variants "
                f"(architecture={self.architecture})"
            )
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("penalty weights must be >= 0")

    @property
    def skip_kind(self):
        return ARCHITECTURES[self.architecture][0]

    @property
    def has_skip(self) -> bool:
        return self.skip_kind is not None

    @property
    def has_hidden(self) -> bool:
        return ARCHITECTURES[self.architecture][1]

    @property
    def uses_ols(self) -> bool:
        return ARCHITECTURES[self.architecture][2]


@dataclass
class ParamSet:
    """All trainable weights of one model instance.

    ``b0``/``B`` are the skip intercepts and weights (zero and frozen for
    the plain MLP), ``W1``/``b1`` the hidden layer, ``W2``/``b2`` the
    hidden-to-output map (empty for the pure linear models).
    """

    b0: np.ndarray
    B: np.ndarray
    W1: np.ndarray
    b1: np.ndarray
    W2: np.ndarray
    b2: np.ndarray

    def copy(self) -> "ParamSet":
        return ParamSet(**{name: getattr(self, name).copy() for name in PARAM_FIELDS})

    def arrays(self):
        return [(name, getattr(self, name)) for name in PARAM_FIELDS]

    def all_finite(self) -> bool:
        return all(np.isfinite(a).all() for _, a in self.arrays())

    def l2_norm(self) -> float:
        return float(np.sqrt(sum(float((a**2).sum()) for _, a in self.arrays())))


def leaky_relu(z, alpha: float = 0.01):
    """Identity for z >= 0, ``alpha * z`` below."""
    z = np.asarray(z)
    return np.where(z >= 0, z, alpha * z)


def _empty_hidden(n_features: int):
    return (
        np.zeros((0, n_features)),
        np.zeros(0),
        np.zeros((HOURS_PER_DAY, 0)),
        np.zeros(HOURS_PER_DAY),
    )


def init_random(spec: ModelSpec, layout: FeatureLayout) -> ParamSet:
    """Scaled-uniform initialization, deterministic for a given seed.

    Weights are drawn from U(-1/sqrt(fan_in), 1/sqrt(fan_in)) with the
    fan-in of the receiving unit (active skip inputs per output hour for
    ``B``); biases start at zero.  Draw order: B, W1, W2.
    """
    rng = np.random.default_rng(spec.seed)
    nf = layout.n_features
    b0 = np.zeros(HOURS_PER_DAY)
    B = np.zeros((HOURS_PER_DAY, nf))
    if spec.has_skip:
        mask = layout.skip_mask(spec.skip_kind)
        fan = mask.sum(axis=1)
        B = rng.uniform(-1.0, 1.0, (HOURS_PER_DAY, nf)) * mask / np.sqrt(fan)[:, None]
    W1, b1, W2, b2 = _empty_hidden(nf)
    if spec.has_hidden:
        bound = 1.0 / np.sqrt(nf)
        W1 = rng.uniform(-bound, bound, (spec.hidden_n, nf))
        b1 = np.zeros(spec.hidden_n)
        bound = 1.0 / np.sqrt(spec.hidden_n)
        W2 = rng.uniform(-bound, bound, (HOURS_PER_DAY, spec.hidden_n))
        b2 = np.zeros(HOURS_PER_DAY)
    return ParamSet(b0=b0, B=B, W1=W1, b1=b1, W2=W2, b2=b2)


def init_ols(spec: ModelSpec, X: np.ndarray, Y: np.ndarray, layout: FeatureLayout) -> ParamSet:
    """Initialize the skip path from per-hour least-squares coefficients.

    Fits each hour's reduced regressors (standardized) to its prices via
    the normal equations and scales the solution, intercept included, by
    ``ols_share_alpha``.  The hidden part, if any, stays random.
    """
    if not spec.uses_ols:
        raise ValueError(f"{spec.architecture} does not use least-squares init")
    n = X.shape[0]
    width = layout.reduced_indices(0).size
    if n <= width + 1:
        raise DataError(
            f"least-squares init needs more than {width + 1} days, got {n}"
        )
    params = init_random(spec, layout)
    alpha = spec.ols_share_alpha
    for h in range(HOURS_PER_DAY):
        idx = layout.reduced_indices(h)
        A = np.column_stack([np.ones(n), X[:, idx]])
        gram = A.T @ A
        rhs = A.T @ Y[:, h]
        beta = None
        try:
            beta = np.linalg.solve(gram, rhs)
        except np.linalg.LinAlgError:
            pass
        if beta is None or not np.isfinite(beta).all():
            gram = gram + _OLS_JITTER * np.eye(gram.shape[0])
            try:
                beta = np.linalg.solve(gram, rhs)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"normal equations singular at hour {h}") from exc
            if not np.isfinite(beta).all():
                raise NumericalError(f"normal equations singular at hour {h}")
        params.b0[h] = alpha * beta[0]
        params.B[h, :] = 0.0
        params.B[h, idx] = alpha * beta[1:]
    return params


def forward(spec: ModelSpec, params: ParamSet, X, layout: FeatureLayout) -> np.ndarray:
    """Predict 24 hourly prices for each design row.

    Accepts a single vector or a (n_days, n_features) matrix and returns
    a matching (24,) or (n_days, 24) array.
    """
    X = np.asarray(X, dtype=float)
    single = X.ndim == 1
    X2 = X[None, :] if single else X
    if X2.ndim != 2 or X2.shape[1] != layout.n_features:
        raise ValueError(
            f"design width {X2.shape[-1]} does not match layout ({layout.n_features})"
        )
    mask = layout.skip_mask(spec.skip_kind)
    out = params.b0 + X2 @ (params.B * mask).T
    if spec.has_hidden:
        hidden = leaky_relu(X2 @ params.W1.T + params.b1, spec.leak_alpha)
        out = out + hidden @ params.W2.T + params.b2
    return out[0] if single else out


def save_params(path, spec: ModelSpec, params: ParamSet, layout: FeatureLayout) -> None:
    """Persist weights with a layout header for warm starts across runs."""
    header = json.dumps(
        {
            "architecture": spec.architecture,
            "hidden_n": spec.hidden_n,
            "leak_alpha": spec.leak_alpha,
            "lambda1": spec.lambda1,
            "lambda2": spec.lambda2,
            "ols_share_alpha": spec.ols_share_alpha,
            "seed": spec.seed,
            "has_wind_offshore": layout.has_wind_offshore,
        },
        sort_keys=True,
    )
    arrays = {name: getattr(params, name) for name in PARAM_FIELDS}
    np.savez(path, header=np.frombuffer(header.encode(), dtype=np.uint8), **arrays)


def load_params(path) -> tuple:
    """Inverse of :func:`save_params`; returns (spec, params, layout)."""
    with np.load(path) as blob:
        header = json.loads(bytes(blob["header"]).decode())
        arrays = {name: blob[name] for name in PARAM_FIELDS}
    layout = FeatureLayout(header.pop("has_wind_offshore"))
    spec = ModelSpec(**header)
    params = ParamSet(**arrays)
    expected = layout.n_features
    if params.B.shape != (HOURS_PER_DAY, expected):
        raise DataError("stored weights do not match the declared layout")
    return spec, params, layout
