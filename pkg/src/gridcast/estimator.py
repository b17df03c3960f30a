"""scikit-learn style front end for the network family.

``PriceNetwork`` wraps one architecture behind the usual ``fit`` /
``partial_fit`` / ``predict`` surface so it composes with pipelines,
``clone`` and ``get_params``.  ``X`` is the (n_days, n_features)
standardized design matrix (pair it with :class:`~gridcast.features.
DesignScaler` in a Pipeline), ``y`` the (n_days, 24) hourly prices.
``fit`` performs the large initial fit; ``partial_fit`` runs one
warm-started update window with fresh optimizer moments, mirroring the
online learning procedure.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .features import FeatureLayout
from .model import ModelSpec, forward, init_ols, init_random
from .training import AdamState, TrainConfig, train_window


def check_design_matrix(X, n_features=None):
    """Validate a 2-D finite design matrix; returns it as float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"design matrix must be 2-D, got shape {X.shape}")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got {X.shape[1]}")
    if not np.isfinite(X).all():
        raise ValueError("design matrix contains non-finite values")
    return X


def check_targets(y, n_rows):
    y = np.asarray(y, dtype=float)
    if y.shape != (n_rows, 24):
        raise ValueError(f"targets must be ({n_rows}, 24), got {y.shape}")
    if not np.isfinite(y).all():
        raise ValueError("targets contain non-finite values")
    return y


class PriceNetwork(BaseEstimator, RegressorMixin):
    """Hourly day-ahead price regressor with optional linear skip paths.

    Parameters
    ----------
    architecture : one of the seven family members, e.g. "reduced_linear",
        "mlp_reduced_linear", "mlp_full_linear", "mlp",
        "reduced_linear_ols", ...
    hidden_n : hidden layer width (0 for the pure linear members).
    lambda1, lambda2 : L2 penalty on all weights / L1 penalty on the
        output-side weights.
    ols_share_alpha : scale on the least-squares initialization (OLS
        variants only).
    epochs, learning_rate : initial fit settings.
    update_epochs, update_learning_rate : ``partial_fit`` settings
        (learning rate defaults to the initial one).
    """

    def __init__(self, architecture="mlp_reduced_linear", hidden_n=32,
                 leak_alpha=0.01, lambda1=0.0, lambda2=0.0, ols_share_alpha=None,
                 epochs=60, learning_rate=1e-3, update_epochs=10,
                 update_learning_rate=None, loss_mode="l1",
                 has_wind_offshore=True, seed=0):
        self.architecture = architecture
        self.hidden_n = hidden_n
        self.leak_alpha = leak_alpha
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.ols_share_alpha = ols_share_alpha
        self.epochs = epochs
        self.learning_rate = learning_rate
        self.update_epochs = update_epochs
        self.update_learning_rate = update_learning_rate
        self.loss_mode = loss_mode
        self.has_wind_offshore = has_wind_offshore
        self.seed = seed

    def _spec(self) -> ModelSpec:
        return ModelSpec(
            architecture=self.architecture,
            hidden_n=self.hidden_n,
            leak_alpha=self.leak_alpha,
            lambda1=self.lambda1,
            lambda2=self.lambda2,
            ols_share_alpha=self.ols_share_alpha,
            seed=self.seed,
        )

    def fit(self, X, y):
        """Initial fit on a standardized window."""
        layout = FeatureLayout(self.has_wind_offshore)
        X = check_design_matrix(X, layout.n_features)
        y = check_targets(y, X.shape[0])
        spec = self._spec()
        if spec.uses_ols:
            params = init_ols(spec, X, y, layout)
        else:
            params = init_random(spec, layout)
        config = TrainConfig(self.epochs, self.learning_rate, loss_mode=self.loss_mode)
        params, state, trace = train_window(
            spec, params, AdamState.for_params(params), X, y, layout, config
        )
        self.layout_ = layout
        self.spec_ = spec
        self.params_ = params
        self.adam_state_ = state
        self.loss_trace_ = list(trace)
        self.n_features_in_ = layout.n_features
        return self

    def partial_fit(self, X, y):
        """One warm-started update window (fresh optimizer moments)."""
        self._require_fitted()
        X = check_design_matrix(X, self.n_features_in_)
        y = check_targets(y, X.shape[0])
        lr = self.update_learning_rate
        if lr is None:
            lr = self.learning_rate
        config = TrainConfig(self.update_epochs, lr, loss_mode=self.loss_mode)
        params, state, trace = train_window(
            self.spec_, self.params_, AdamState.for_params(self.params_),
            X, y, self.layout_, config,
        )
        self.params_ = params
        self.adam_state_ = state
        self.loss_trace_.extend(trace)
        return self

    def predict(self, X):
        self._require_fitted()
        X = check_design_matrix(np.atleast_2d(np.asarray(X, dtype=float)),
                                self.n_features_in_)
        return forward(self.spec_, self.params_, X, self.layout_)

    def _require_fitted(self):
        if not hasattr(self, "params_"):
            raise NotFittedError("PriceNetwork is not fitted yet; call fit first")
