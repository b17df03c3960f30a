"""Per-day design vectors for the reduced and full regressor sets.

The full vector concatenates, in this fixed order:

* 24 price lags from one day back (hours 0..23),
* 24 price lags from two days back,
* 24 price lags from seven days back,
* 24 solar, 24 onshore-wind, (24 offshore-wind,) 24 load day-ahead values,
* 4 commodity prices lagged two days (oil, coal, eua, ngas),
* 3 calendar dummies (mon, sat, sun),

giving 175 columns with offshore wind and 151 without.  The per-hour
reduced vector is a slice of the full one: the three price lags at the
target hour, the last hour of yesterday, the four fundamentals at the
target hour, the commodities and the dummies (15 entries, or 14 at hour
23 where the last-hour-of-yesterday slot coincides with the hour's own
lag).  ``FeatureLayout.write_feature_map`` dumps the index -> name table
for audit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import DataError, SchemaError
from .marketdata import HOURS_PER_DAY, MarketSeries, ZoneConfig

#: number of days of price history a design row needs
WARMUP_DAYS = 7
#: commodity prices enter with a two-day reporting lag
COMMODITY_LAG = 2

_SKIP_KINDS = (None, "reduced", "full")


class FeatureLayout:
    """Index bookkeeping for one zone's design vector."""

    def __init__(self, has_wind_offshore: bool):
        self.has_wind_offshore = bool(has_wind_offshore)
        blocks = ["price_d1", "price_d2", "price_d7", "solar", "wind_on"]
        if self.has_wind_offshore:
            blocks.append("wind_off")
        blocks.append("load")
        self.block_start = {}
        names = []
        for block in blocks:
            self.block_start[block] = len(names)
            names += [f"{block}_h{h:02d}" for h in range(HOURS_PER_DAY)]
        self.commodity_cols = np.arange(len(names), len(names) + 4)
        names += ["oil_d2", "coal_d2", "eua_d2", "ngas_d2"]
        self.calendar_cols = np.arange(len(names), len(names) + 3)
        names += ["mon", "sat", "sun"]
        self.names = tuple(names)
        self.n_features = len(names)
        self._reduced = tuple(self._build_reduced(h) for h in range(HOURS_PER_DAY))
        self._masks = {}

    def __eq__(self, other):
        return (
            isinstance(other, FeatureLayout)
            and other.has_wind_offshore == self.has_wind_offshore
        )

    def __repr__(self):
        return f"FeatureLayout(has_wind_offshore={self.has_wind_offshore})"

    def _build_reduced(self, hour: int) -> np.ndarray:
        idx = [
            self.block_start["price_d1"] + hour,
            self.block_start["price_d2"] + hour,
            self.block_start["price_d7"] + hour,
        ]
        if hour != 23:  # at hour 23 this slot would duplicate the hour's own lag
            idx.append(self.block_start["price_d1"] + 23)
        idx.append(self.block_start["solar"] + hour)
        idx.append(self.block_start["wind_on"] + hour)
        if self.has_wind_offshore:
            idx.append(self.block_start["wind_off"] + hour)
        idx.append(self.block_start["load"] + hour)
        idx.extend(self.commodity_cols)
        idx.extend(self.calendar_cols)
        return np.array(idx, dtype=int)

    def reduced_indices(self, hour: int) -> np.ndarray:
        """Full-vector column indices of hour ``hour``'s reduced regressors."""
        return self._reduced[hour]

    def reduced_names(self, hour: int) -> tuple:
        return tuple(self.names[i] for i in self.reduced_indices(hour))

    @property
    def dummy_columns(self) -> np.ndarray:
        return self.calendar_cols

    def skip_mask(self, kind) -> np.ndarray:
        """(24, n_features) 0/1 matrix of active skip weights per hour.

        ``kind`` is ``"reduced"``, ``"full"`` or ``None`` (no skip path).
        """
        if kind not in _SKIP_KINDS:
            raise ValueError(f"unknown skip kind {kind!r}")
        if kind not in self._masks:
            mask = np.zeros((HOURS_PER_DAY, self.n_features))
            if kind == "full":
                mask[:] = 1.0
            elif kind == "reduced":
                for h in range(HOURS_PER_DAY):
                    mask[h, self.reduced_indices(h)] = 1.0
            mask.setflags(write=False)
            self._masks[kind] = mask
        return self._masks[kind]

    def write_feature_map(self, path) -> None:
        with open(path, "w") as fh:
            for i, name in enumerate(self.names):
                fh.write(f"{i}\t{name}\n")


@dataclass(frozen=True)
class DayDesign:
    """One day's regressors and 24 target prices."""

    date: object
    full_x: np.ndarray
    targets: np.ndarray
    valid: bool
    layout: FeatureLayout

    def reduced_x(self, hour: int) -> np.ndarray:
        return self.full_x[self.layout.reduced_indices(hour)]


@dataclass
class DesignSet:
    """Stacked day designs: ``X`` is (n_days, n_features), ``Y`` (n_days, 24).

    Rows keep the source series' day indexing; the first seven days are
    flagged invalid (their lag slots are NaN) so windows never straddle
    missing history.
    """

    layout: FeatureLayout
    dates: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    valid: np.ndarray
    weekday: np.ndarray

    def __len__(self):
        return len(self.dates)

    def day(self, i: int) -> DayDesign:
        return DayDesign(
            date=self.dates[i],
            full_x=self.X[i],
            targets=self.Y[i],
            valid=bool(self.valid[i]),
            layout=self.layout,
        )

    def reduced_x(self, i: int, hour: int) -> np.ndarray:
        return self.X[i, self.layout.reduced_indices(hour)]

    def index_of(self, date) -> int:
        hits = np.nonzero(self.dates == date)[0]
        if hits.size == 0:
            raise DataError(f"date {date} not covered by the design set")
        return int(hits[0])


def build_designs(series: MarketSeries, config: ZoneConfig | None = None) -> DesignSet:
    """Build one design row per day of a cleaned series."""
    has_off = series.wind_off is not None
    if config is not None and config.has_wind_offshore != has_off:
        raise SchemaError("zone config and series disagree on offshore wind")
    if series.n_days < WARMUP_DAYS + 1:
        raise DataError(f"need at least {WARMUP_DAYS + 1} days to build lagged designs")
    if series.missing_count():
        raise DataError("series must be cleaned before building designs")

    layout = FeatureLayout(has_off)
    n = series.n_days
    X = np.full((n, layout.n_features), np.nan)
    start = layout.block_start

    def block(name):
        return slice(start[name], start[name] + HOURS_PER_DAY)

    X[1:, block("price_d1")] = series.price[:-1]
    X[2:, block("price_d2")] = series.price[:-2]
    X[7:, block("price_d7")] = series.price[:-7]
    X[:, block("solar")] = series.solar
    X[:, block("wind_on")] = series.wind_on
    if has_off:
        X[:, block("wind_off")] = series.wind_off
    X[:, block("load")] = series.load
    commodities = np.column_stack([series.oil, series.coal, series.eua, series.ngas])
    X[COMMODITY_LAG:, layout.commodity_cols] = commodities[:-COMMODITY_LAG]
    X[:, layout.calendar_cols[0]] = (series.weekday == 0).astype(float)
    X[:, layout.calendar_cols[1]] = (series.weekday == 5).astype(float)
    X[:, layout.calendar_cols[2]] = (series.weekday == 6).astype(float)

    valid = np.zeros(n, dtype=bool)
    valid[WARMUP_DAYS:] = True
    if np.isnan(X[valid]).any():
        raise DataError("valid design rows contain missing values")

    return DesignSet(
        layout=layout,
        dates=series.days.copy(),
        X=X,
        Y=series.price.copy(),
        valid=valid,
        weekday=series.weekday.copy(),
    )


class DesignScaler(BaseEstimator, TransformerMixin):
    """Column-wise standardizer using population moments.

    Columns listed in ``unit_std_columns`` (the calendar dummies) and any
    zero-variance column keep a scale of exactly 1 so the transform stays
    invertible; their means are still subtracted.
    """

    def __init__(self, unit_std_columns=()):
        self.unit_std_columns = unit_std_columns

    def fit(self, X, y=None):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("fit needs a non-empty 2-D window")
        if np.isnan(X).any():
            raise ValueError("fit window contains missing values")
        self.n_features_in_ = X.shape[1]
        self.mean_ = X.mean(axis=0)
        std = X.std(axis=0)
        forced = list(self.unit_std_columns)
        if forced:
            std[forced] = 1.0
        std[std <= 1e-12] = 1.0
        self.std_ = std
        return self

    def _check(self, X):
        if not hasattr(self, "mean_"):
            raise ValueError("scaler is not fitted")
        X = np.asarray(X, dtype=float)
        width = X.shape[-1] if X.ndim else -1
        if X.ndim not in (1, 2) or width != self.n_features_in_:
            raise ValueError(
                f"feature layout mismatch: got width {width}, "
                f"scaler was fitted on {self.n_features_in_}"
            )
        return X

    def transform(self, X):
        X = self._check(X)
        return (X - self.mean_) / self.std_

    def inverse_transform(self, X):
        X = self._check(X)
        return X * self.std_ + self.mean_


def fit_scaler(designs: DesignSet, rows=None) -> DesignScaler:
    """Fit a scaler on a window of design rows (all valid rows by default)."""
    if rows is None:
        rows = np.nonzero(designs.valid)[0]
    X = designs.X[rows]
    if X.shape[0] == 0:
        raise ValueError("scaler window is empty")
    scaler = DesignScaler(unit_std_columns=tuple(designs.layout.dummy_columns))
    return scaler.fit(X)


def standardize_designs(designs: DesignSet, scaler: DesignScaler) -> DesignSet:
    """Return a copy of the design set with standardized regressors.

    Targets are left in EUR/MWh.  Invalid rows keep their NaN lag slots.
    """
    return replace(designs, X=scaler.transform(designs.X), Y=designs.Y.copy())


def transform_design(design: DayDesign, scaler: DesignScaler) -> DayDesign:
    """Standardize a single day's regressors; targets untouched."""
    return DayDesign(
        date=design.date,
        full_x=scaler.transform(design.full_x),
        targets=design.targets,
        valid=design.valid,
        layout=design.layout,
    )
