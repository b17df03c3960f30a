"""Day-ahead electricity price forecasting: hybrid linear/MLP networks,
partial online learning, adaptive forecast combination, and TPE tuning."""

from .ensemble import (
    BOAState,
    aggregate_online,
    boa_update,
    ensemble_predict,
    forward_select,
    init_boa,
)
from .errors import (
    ConfigError,
    DataError,
    GridcastError,
    NumericalError,
    SchemaError,
)
from .estimator import PriceNetwork
from .evaluation import (
    DMResult,
    MetricReport,
    dm_test,
    hourly_rmse,
    metrics,
    naive_forecast,
    naive_forecasts,
    pairwise_dm_matrix,
)
from .features import (
    DayDesign,
    DesignScaler,
    DesignSet,
    FeatureLayout,
    build_designs,
    fit_scaler,
    standardize_designs,
    transform_design,
)
from .marketdata import (
    CleaningLog,
    MarketSeries,
    SyntheticCoefficients,
    SyntheticSpec,
    ZoneConfig,
    calendar_dummies,
    clean,
    generate_synthetic,
    impute_locf,
    impute_regression,
    load_csv,
    normalize_dst,
    write_csv,
)
from .model import (
    ARCHITECTURES,
    ModelSpec,
    ParamSet,
    forward,
    init_ols,
    init_random,
    leaky_relu,
    load_params,
    save_params,
)
from .online import (
    BacktestResult,
    OnlineSchedule,
    run_backtest,
    run_full_refit_baseline,
)
from .training import (
    AdamState,
    TrainConfig,
    adam_step,
    gradient,
    loss,
    train_window,
)
from .tuner import (
    ParamRange,
    SearchSpace,
    TrialRecord,
    default_search_space,
    run_study,
    tpe_suggest,
)

__version__ = "0.1.0"

__all__ = [
    "ARCHITECTURES",
    "AdamState",
    "BOAState",
    "BacktestResult",
    "CleaningLog",
    "ConfigError",
    "DMResult",
    "DataError",
    "DayDesign",
    "DesignScaler",
    "DesignSet",
    "FeatureLayout",
    "GridcastError",
    "MarketSeries",
    "MetricReport",
    "ModelSpec",
    "NumericalError",
    "OnlineSchedule",
    "ParamRange",
    "ParamSet",
    "PriceNetwork",
    "SchemaError",
    "SearchSpace",
    "SyntheticCoefficients",
    "SyntheticSpec",
    "TrainConfig",
    "TrialRecord",
    "ZoneConfig",
    "adam_step",
    "aggregate_online",
    "boa_update",
    "build_designs",
    "calendar_dummies",
    "clean",
    "default_search_space",
    "dm_test",
    "ensemble_predict",
    "fit_scaler",
    "forward",
    "forward_select",
    "generate_synthetic",
    "gradient",
    "hourly_rmse",
    "impute_locf",
    "impute_regression",
    "init_boa",
    "init_ols",
    "init_random",
    "leaky_relu",
    "load_csv",
    "load_params",
    "loss",
    "metrics",
    "naive_forecast",
    "naive_forecasts",
    "normalize_dst",
    "pairwise_dm_matrix",
    "run_backtest",
    "run_full_refit_baseline",
    "run_study",
    "save_params",
    "standardize_designs",
    "tpe_suggest",
    "train_window",
    "transform_design",
    "write_csv",
]
