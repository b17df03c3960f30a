"""Hourly market data: CSV ingestion, cleaning, and synthetic generation.

A :class:`MarketSeries` holds one bidding zone's hourly day-ahead prices and
fundamentals (day-ahead forecasts of solar, onshore/offshore wind and load)
on a strict (day, hour) grid, plus four daily commodity closing prices.
Cleaning fills every gap with one of three rules:

* clock-change days: the missing spring hour is the mean of its two
  neighbours, the duplicated autumn hour is the average of both readings;
* commodity gaps: last observation carried forward;
* remaining hourly gaps: fitted values from a univariate regression of the
  day-ahead variable on its declared "actual" counterpart, with a
  carry-forward fallback where the counterpart is missing too.
"""

from __future__ import annotations

import calendar
import datetime as dt
import json
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd

from .errors import DataError, SchemaError

HOURS_PER_DAY = 24

#: hourly variables in a MarketSeries; wind_off is optional per zone
HOURLY_ROLES = ("price", "solar", "wind_on", "wind_off", "load")
#: daily commodity closing prices
DAILY_ROLES = ("ngas", "oil", "coal", "eua")

#: local hour affected by both EU clock changes
DST_HOUR = 2

# warm-up level used for price lags before the series has any history
_SYNTH_PRICE_FILL = 60.0


@dataclass(frozen=True)
class ZoneConfig:
    """Declarative description of one bidding zone's data feed.

    ``columns`` maps a role name (``timestamp``, ``price``, ``solar``,
    ``wind_on``, ``wind_off``, ``load``, ``ngas``, ``oil``, ``coal``,
    ``eua``) to the CSV column that carries it.  ``actual_pairs`` maps an
    hourly role to the CSV column holding its realized ("actual") values,
    used only for regression imputation.  ``dst_rule`` is ``"eu"`` (clock
    changes on the last Sundays of March and October at local hour 2) or
    ``"none"``.
    """

    zone_id: str
    has_wind_offshore: bool
    columns: dict
    actual_pairs: dict = field(default_factory=dict)
    dst_rule: str = "eu"

    def __post_init__(self):
        required = ("timestamp", "price", "solar", "wind_on", "load") + DAILY_ROLES
        missing = [r for r in required if r not in self.columns]
        if missing:
            raise SchemaError(f"zone '{self.zone_id}': unmapped roles {missing}")
        if self.has_wind_offshore != ("wind_off" in self.columns):
            raise SchemaError(
                f"zone '{self.zone_id}': wind_off column must be mapped "
                "exactly when has_wind_offshore is true"
            )
        cols = list(self.columns.values())
        if len(set(cols)) != len(cols):
            dupes = sorted({c for c in cols if cols.count(c) > 1})
            raise SchemaError(f"zone '{self.zone_id}': columns used twice: {dupes}")
        if self.dst_rule not in ("eu", "none"):
            raise SchemaError(f"unknown dst_rule {self.dst_rule!r}")
        unknown = [r for r in self.actual_pairs if r not in HOURLY_ROLES]
        if unknown:
            raise SchemaError(f"actual_pairs declared for non-hourly roles {unknown}")

    @property
    def hourly_roles(self) -> tuple:
        roles = ["price", "solar", "wind_on"]
        if self.has_wind_offshore:
            roles.append("wind_off")
        roles.append("load")
        return tuple(roles)

    @classmethod
    def from_json(cls, path) -> "ZoneConfig":
        with open(path) as fh:
            raw = json.load(fh)
        try:
            return cls(
                zone_id=raw["zone_id"],
                has_wind_offshore=bool(raw["has_wind_offshore"]),
                columns=dict(raw["columns"]),
                actual_pairs=dict(raw.get("actual_pairs", {})),
                dst_rule=raw.get("dst_rule", "eu"),
            )
        except KeyError as exc:
            raise SchemaError(f"zone config {path}: missing key {exc}") from exc

    def to_json(self, path) -> None:
        payload = {
            "zone_id": self.zone_id,
            "has_wind_offshore": self.has_wind_offshore,
            "columns": dict(self.columns),
            "actual_pairs": dict(self.actual_pairs),
            "dst_rule": self.dst_rule,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass
class MarketSeries:
    """Aligned hourly market data for one zone.

    Hourly grids have shape ``(n_days, 24)``; commodity series have shape
    ``(n_days,)``.  ``wind_off`` is ``None`` for zones without offshore
    wind.  ``dst_duplicates`` keeps both readings of a duplicated
    autumn-clock-change hour, keyed ``(day_index, hour, role)``, until
    :func:`normalize_dst` merges them.  ``actuals`` carries realized
    counterpart series used only for regression imputation.
    """

    zone_id: str
    days: np.ndarray
    price: np.ndarray
    solar: np.ndarray
    wind_on: np.ndarray
    wind_off: np.ndarray | None
    load: np.ndarray
    ngas: np.ndarray
    oil: np.ndarray
    coal: np.ndarray
    eua: np.ndarray
    weekday: np.ndarray | None = None
    actuals: dict = field(default_factory=dict)
    dst_duplicates: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.weekday is None:
            self.weekday = np.array([d.weekday() for d in self.days], dtype=int)

    @property
    def n_days(self) -> int:
        return len(self.days)

    def hourly_items(self):
        """Yield ``(role, grid)`` for every hourly variable present."""
        for role in HOURLY_ROLES:
            grid = getattr(self, role)
            if grid is not None:
                yield role, grid

    def daily_items(self):
        for role in DAILY_ROLES:
            yield role, getattr(self, role)

    def missing_count(self) -> int:
        total = sum(int(np.isnan(g).sum()) for _, g in self.hourly_items())
        total += sum(int(np.isnan(v).sum()) for _, v in self.daily_items())
        return total

    def validate(self) -> None:
        n = self.n_days
        for i in range(1, n):
            if (self.days[i] - self.days[i - 1]).days != 1:
                raise DataError(f"days not consecutive at index {i}")
        for role, grid in self.hourly_items():
            if grid.shape != (n, HOURS_PER_DAY):
                raise DataError(f"{role} grid has shape {grid.shape}, expected ({n}, 24)")
        for role, vec in self.daily_items():
            if vec.shape != (n,):
                raise DataError(f"{role} series has shape {vec.shape}, expected ({n},)")


def calendar_dummies(day: dt.date) -> tuple:
    """Return ``(mon, sat, sun)`` 0/1 indicators for the date."""
    w = day.weekday()
    return int(w == 0), int(w == 5), int(w == 6)


def _last_sunday(year: int, month: int) -> dt.date:
    last = dt.date(year, month, calendar.monthrange(year, month)[1])
    return last - dt.timedelta(days=(last.weekday() - 6) % 7)


def dst_transition_dates(year: int) -> tuple:
    """EU clock-change dates of a year: (spring forward, fall back)."""
    return _last_sunday(year, 3), _last_sunday(year, 10)


def impute_locf(values) -> np.ndarray:
    """Carry the last observed value forward over missing entries."""
    v = np.asarray(values, dtype=float).copy()
    if v.size and np.isnan(v[0]):
        raise DataError("leading value is missing; nothing to carry forward")
    return pd.Series(v).ffill().to_numpy()


def impute_regression(target, predictor) -> np.ndarray:
    """Fill gaps in ``target`` with fitted values from a univariate
    least-squares regression of target on predictor.

    The fit uses every complete (predictor, target) pair.  A constant
    predictor degenerates to slope 0 and intercept equal to the target
    mean.  Cells where the predictor is missing too fall back to
    carry-forward, with a warning.
    """
    t = np.asarray(target, dtype=float)
    p = np.asarray(predictor, dtype=float)
    if t.shape != p.shape:
        raise DataError(f"target shape {t.shape} != predictor shape {p.shape}")
    flat_t = t.ravel().copy()
    flat_p = p.ravel()
    gaps = np.isnan(flat_t)
    if not gaps.any():
        return flat_t.reshape(t.shape)
    pairs = ~gaps & ~np.isnan(flat_p)
    if pairs.sum() < 2:
        raise DataError("regression imputation needs at least 2 complete pairs")
    x, y = flat_p[pairs], flat_t[pairs]
    sxx = float(((x - x.mean()) ** 2).sum())
    if sxx == 0.0:
        slope, intercept = 0.0, float(y.mean())
    else:
        slope = float(((x - x.mean()) * (y - y.mean())).sum()) / sxx
        intercept = float(y.mean()) - slope * float(x.mean())
    fillable = gaps & ~np.isnan(flat_p)
    flat_t[fillable] = intercept + slope * flat_p[fillable]
    rest = gaps & np.isnan(flat_p)
    if rest.any():
        warnings.warn(
            f"predictor missing at {int(rest.sum())} gap(s); "
            "falling back to carry-forward for those cells",
            stacklevel=2,
        )
        if np.isnan(flat_t[0]):
            raise DataError("leading value is missing; nothing to carry forward")
        flat_t = pd.Series(flat_t).ffill().to_numpy()
    return flat_t.reshape(t.shape)


def normalize_dst(series: MarketSeries, config: ZoneConfig) -> MarketSeries:
    """Resolve the two clock-change artifacts so every day has 24 values.

    Spring: the skipped hour is imputed as the mean of the adjacent hours.
    Autumn: the duplicated hour becomes the average of both readings.
    Non-DST days pass through unchanged.
    """
    if config.dst_rule == "none":
        if series.dst_duplicates:
            raise DataError("duplicate readings recorded but zone has no DST rule")
        return series

    grids = {role: grid.copy() for role, grid in series.hourly_items()}
    day_index = {d: i for i, d in enumerate(series.days)}
    years = range(series.days[0].year, series.days[-1].year + 1)

    for year in years:
        spring, _ = dst_transition_dates(year)
        i = day_index.get(spring)
        if i is None:
            continue
        for role, grid in grids.items():
            if not np.isnan(grid[i, DST_HOUR]):
                continue
            before, after = grid[i, DST_HOUR - 1], grid[i, DST_HOUR + 1]
            if np.isnan(before) or np.isnan(after):
                raise DataError(
                    f"{role}: adjacent hour also missing on spring "
                    f"clock-change date {spring}"
                )
            grid[i, DST_HOUR] = (before + after) / 2.0

    for (i, hour, role), (first, second) in series.dst_duplicates.items():
        grids[role][i, hour] = (first + second) / 2.0

    return replace(series, dst_duplicates={}, **grids)


def load_csv(path, config: ZoneConfig) -> MarketSeries:
    """Parse a wide hourly CSV into a raw (possibly gappy) MarketSeries.

    One row per hour, timestamps in ISO-8601 local time.  Unparseable
    numeric cells are marked missing.  A duplicated timestamp is accepted
    only on an autumn clock-change date at the affected hour (both
    readings are kept for :func:`normalize_dst`); anywhere else it is a
    data error.
    """
    df = pd.read_csv(path)
    mapped = list(config.columns.values()) + list(config.actual_pairs.values())
    missing_cols = [c for c in mapped if c not in df.columns]
    if missing_cols:
        raise SchemaError(f"{path}: missing mapped column(s) {missing_cols}")
    if len(df) == 0:
        raise DataError(f"{path}: no data rows")

    try:
        stamps = pd.to_datetime(df[config.columns["timestamp"]], errors="raise")
    except (ValueError, TypeError) as exc:
        raise DataError(f"{path}: unparseable timestamp: {exc}") from exc

    dates = stamps.dt.date.to_numpy()
    hours = stamps.dt.hour.to_numpy()
    first, last = dates.min(), dates.max()
    n_days = (last - first).days + 1
    days = np.array([first + dt.timedelta(days=i) for i in range(n_days)])
    day_of = {d: i for i, d in enumerate(days)}
    row_day = np.array([day_of[d] for d in dates])

    fall_dates = set()
    if config.dst_rule == "eu":
        for year in range(first.year, last.year + 1):
            fall_dates.add(dst_transition_dates(year)[1])

    # duplicate detection is a property of the timestamp, shared by all roles
    counts = {}
    for di, h in zip(row_day, hours):
        counts[(di, h)] = counts.get((di, h), 0) + 1
    dup_cells = {}
    for (di, h), c in counts.items():
        if c == 1:
            continue
        if c == 2 and days[di] in fall_dates and h == DST_HOUR:
            dup_cells[(di, h)] = []
            continue
        raise DataError(
            f"{path}: timestamp {days[di]} hour {h} appears {c} times "
            "outside a fall clock-change"
        )

    def hourly_grid(col):
        vals = pd.to_numeric(df[col], errors="coerce").to_numpy(dtype=float)
        grid = np.full((n_days, HOURS_PER_DAY), np.nan)
        dups = {}
        for di, h, v in zip(row_day, hours, vals):
            if (di, h) in dup_cells:
                dups.setdefault((di, h), []).append(v)
            else:
                grid[di, h] = v
        return grid, dups

    grids, duplicates = {}, {}
    for role in config.hourly_roles:
        grid, dups = hourly_grid(config.columns[role])
        grids[role] = grid
        for (di, h), pair in dups.items():
            duplicates[(di, h, role)] = (float(pair[0]), float(pair[1]))
    if not config.has_wind_offshore:
        grids["wind_off"] = None

    daily = {}
    for role in DAILY_ROLES:
        vals = pd.to_numeric(df[config.columns[role]], errors="coerce").to_numpy(dtype=float)
        vec = np.full(n_days, np.nan)
        for di in range(n_days):
            day_vals = vals[row_day == di]
            day_vals = day_vals[~np.isnan(day_vals)]
            if day_vals.size == 0:
                continue
            if np.unique(day_vals).size > 1:
                raise DataError(
                    f"{path}: conflicting daily values for {role} on {days[di]}"
                )
            vec[di] = day_vals[0]
        daily[role] = vec

    actuals = {}
    for role, col in config.actual_pairs.items():
        actuals[role], _ = hourly_grid(col)

    series = MarketSeries(
        zone_id=config.zone_id,
        days=days,
        actuals=actuals,
        dst_duplicates=duplicates,
        **grids,
        **daily,
    )
    series.validate()
    return series


@dataclass
class CleaningLog:
    """Counts of imputed cells, one field per cleaning rule."""

    dst_spring_fills: int = 0
    dst_fall_merges: int = 0
    locf_fills: int = 0
    regression_fills: int = 0
    locf_fallback_fills: int = 0

    def total(self) -> int:
        return (
            self.dst_spring_fills
            + self.dst_fall_merges
            + self.locf_fills
            + self.regression_fills
            + self.locf_fallback_fills
        )

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.__dict__ | {"total": self.total()}, fh, indent=2, sort_keys=True)
            fh.write("\n")


def clean(series: MarketSeries, config: ZoneConfig) -> tuple:
    """Run the full cleaning pipeline; returns ``(series, CleaningLog)``.

    Clock-change cells are resolved first so the DST rules own them, then
    commodity gaps are carried forward, then remaining hourly gaps are
    regression-imputed against their declared actual series (cells without
    a usable predictor fall back to carry-forward with a warning).
    """
    log = CleaningLog()
    log.dst_fall_merges = len(series.dst_duplicates)
    before = series.missing_count()
    series = normalize_dst(series, config)
    log.dst_spring_fills = before - series.missing_count() - log.dst_fall_merges

    daily = {}
    for role, vec in series.daily_items():
        log.locf_fills += int(np.isnan(vec).sum())
        daily[role] = impute_locf(vec)
    series = replace(series, **daily)

    hourly = {}
    for role, grid in series.hourly_items():
        gaps = np.isnan(grid)
        if not gaps.any():
            continue
        predictor = series.actuals.get(role)
        if predictor is None:
            warnings.warn(
                f"{role}: {int(gaps.sum())} gap(s) but no actual series declared; "
                "using carry-forward",
                stacklevel=2,
            )
            flat = grid.ravel()
            if np.isnan(flat[0]):
                raise DataError(f"{role}: leading value missing; cannot carry forward")
            hourly[role] = pd.Series(flat).ffill().to_numpy().reshape(grid.shape)
            log.locf_fallback_fills += int(gaps.sum())
        else:
            usable = gaps & ~np.isnan(predictor)
            hourly[role] = impute_regression(grid, predictor)
            log.regression_fills += int(usable.sum())
            log.locf_fallback_fills += int((gaps & np.isnan(predictor)).sum())
    if hourly:
        series = replace(series, **hourly)

    if series.missing_count():
        raise DataError("cleaning left missing cells behind")
    series.validate()
    return series, log


# ---------------------------------------------------------------------------
# synthetic market generator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Structure controls for the synthetic market generator.

    ``nonlinear_weight`` scales a planted multiplicative interaction
    between load and solar deviations, the simplest structure a purely
    linear per-hour model cannot represent.  ``noise_scale`` is the
    standard deviation (EUR/MWh) of the additive price noise.
    """

    noise_scale: float = 3.0
    nonlinear_weight: float = 0.0
    has_wind_offshore: bool = True
    start_day: dt.date = dt.date(2020, 1, 6)
    zone_id: str = "SYNTH"


@dataclass(frozen=True)
class SyntheticCoefficients:
    """Generating coefficients of the synthetic price equation.

    Prices follow a per-hour linear map of the lagged prices,
    fundamentals, two-day-lagged commodities and calendar dummies, plus
    ``nonlinear_weight * load_dev * solar_dev`` and Gaussian noise, where
    the deviations use the fixed centers/scales recorded here.
    """

    intercept: np.ndarray
    price_d1: float
    price_d2: float
    price_d7: float
    price_d1_h23: float
    solar: float
    wind_on: float
    wind_off: float
    load: float
    oil: float
    coal: float
    eua: float
    ngas: float
    mon: float
    sat: float
    sun: float
    nonlinear_weight: float
    noise_scale: float
    load_center: float
    load_scale: float
    solar_center: float
    solar_scale: float

    def linear_prediction(self, series: MarketSeries, d: int) -> np.ndarray:
        """Evaluate the linear part of the generating equation for day d.

        Valid for d >= 7 (all lags inside the series).
        """
        if d < 7:
            raise ValueError("generating equation needs 7 days of history")
        mon, sat, sun = calendar_dummies(series.days[d])
        out = self.intercept.copy()
        out += self.price_d1 * series.price[d - 1]
        out += self.price_d2 * series.price[d - 2]
        out += self.price_d7 * series.price[d - 7]
        out += self.price_d1_h23 * series.price[d - 1, 23]
        out += self.solar * series.solar[d]
        out += self.wind_on * series.wind_on[d]
        if series.wind_off is not None:
            out += self.wind_off * series.wind_off[d]
        out += self.load * series.load[d]
        out += self.oil * series.oil[d - 2]
        out += self.coal * series.coal[d - 2]
        out += self.eua * series.eua[d - 2]
        out += self.ngas * series.ngas[d - 2]
        out += self.mon * mon + self.sat * sat + self.sun * sun
        return out

    def nonlinear_term(self, series: MarketSeries, d: int) -> np.ndarray:
        load_dev = (series.load[d] - self.load_center) / self.load_scale
        solar_dev = (series.solar[d] - self.solar_center) / self.solar_scale
        return self.nonlinear_weight * load_dev * solar_dev


def _ar1(rng, n, phi, sigma):
    out = np.empty(n)
    out[0] = rng.normal(0.0, sigma / np.sqrt(1 - phi**2))
    for i in range(1, n):
        out[i] = phi * out[i - 1] + rng.normal(0.0, sigma)
    return out


def generate_synthetic(n_days: int, seed: int, spec: SyntheticSpec | None = None) -> tuple:
    """Generate a synthetic MarketSeries with known planted structure.

    Returns ``(series, coefficients)``; the coefficients allow oracle
    tests to reproduce the noise-free prices exactly.  Deterministic for
    a given seed.
    """
    spec = spec or SyntheticSpec()
    if n_days < 30:
        raise DataError("synthetic series needs n_days >= 30")
    rng = np.random.default_rng(seed)

    days = np.array([spec.start_day + dt.timedelta(days=i) for i in range(n_days)])
    weekday = np.array([d.weekday() for d in days], dtype=int)
    doy = np.array([d.timetuple().tm_yday for d in days], dtype=float)
    hours = np.arange(HOURS_PER_DAY, dtype=float)

    load = (
        40_000.0
        + 5_000.0 * np.cos(2 * np.pi * (doy - 15.0) / 365.0)[:, None]
        - 4_000.0 * np.cos(2 * np.pi * (hours - 13.0) / 24.0)[None, :]
        - 3_000.0 * np.isin(weekday, (5, 6)).astype(float)[:, None]
        + _ar1(rng, n_days, 0.7, 2_000.0)[:, None]
        + rng.normal(0.0, 300.0, (n_days, HOURS_PER_DAY))
    )

    bell = np.clip(np.sin(np.pi * (hours - 5.5) / 13.0), 0.0, None)
    amp = 4_000.0 + 3_000.0 * np.cos(2 * np.pi * (doy - 172.0) / 365.0)
    weather = np.clip(rng.normal(0.8, 0.35, n_days), 0.05, 1.5)
    solar = np.clip(
        amp[:, None] * bell[None, :] * weather[:, None]
        + rng.normal(0.0, 50.0, (n_days, HOURS_PER_DAY)),
        0.0,
        None,
    )

    wind_on = np.clip(
        8_000.0
        + _ar1(rng, n_days, 0.75, 2_000.0)[:, None]
        + rng.normal(0.0, 400.0, (n_days, HOURS_PER_DAY)),
        0.0,
        None,
    )
    wind_off = None
    if spec.has_wind_offshore:
        wind_off = np.clip(
            2_500.0
            + _ar1(rng, n_days, 0.75, 800.0)[:, None]
            + rng.normal(0.0, 150.0, (n_days, HOURS_PER_DAY)),
            0.0,
            None,
        )

    # slow mean-reverting log-price dynamics, like calm commodity regimes
    ngas = 25.0 * np.exp(_ar1(rng, n_days, 0.995, 0.012))
    oil = 80.0 * np.exp(_ar1(rng, n_days, 0.995, 0.010))
    coal = 90.0 * np.exp(_ar1(rng, n_days, 0.995, 0.010))
    eua = 85.0 * np.exp(_ar1(rng, n_days, 0.995, 0.012))

    coeffs = SyntheticCoefficients(
        intercept=-12.0 + 4.0 * np.sin(2 * np.pi * (hours - 9.0) / 24.0),
        price_d1=0.45,
        price_d2=0.10,
        price_d7=0.25,
        price_d1_h23=0.02,
        solar=-4e-4,
        wind_on=-3e-4,
        wind_off=-3e-4 if spec.has_wind_offshore else 0.0,
        load=4e-4,
        oil=0.02,
        coal=0.02,
        eua=0.03,
        ngas=0.30,
        mon=1.0,
        sat=-2.0,
        sun=-3.0,
        nonlinear_weight=spec.nonlinear_weight,
        noise_scale=spec.noise_scale,
        load_center=40_000.0,
        load_scale=5_000.0,
        solar_center=2_000.0,
        solar_scale=2_500.0,
    )

    noise = spec.noise_scale * rng.standard_normal((n_days, HOURS_PER_DAY))
    price = np.empty((n_days, HOURS_PER_DAY))
    for d in range(n_days):
        mon, sat, sun = calendar_dummies(days[d])

        def lag(k):
            return price[d - k] if d - k >= 0 else np.full(HOURS_PER_DAY, _SYNTH_PRICE_FILL)

        row = coeffs.intercept.copy()
        row += coeffs.price_d1 * lag(1)
        row += coeffs.price_d2 * lag(2)
        row += coeffs.price_d7 * lag(7)
        row += coeffs.price_d1_h23 * lag(1)[23]
        row += coeffs.solar * solar[d]
        row += coeffs.wind_on * wind_on[d]
        if wind_off is not None:
            row += coeffs.wind_off * wind_off[d]
        row += coeffs.load * load[d]
        back = max(d - 2, 0)  # commodities enter with their 2-day reporting lag
        row += coeffs.oil * oil[back]
        row += coeffs.coal * coal[back]
        row += coeffs.eua * eua[back]
        row += coeffs.ngas * ngas[back]
        row += coeffs.mon * mon + coeffs.sat * sat + coeffs.sun * sun
        load_dev = (load[d] - coeffs.load_center) / coeffs.load_scale
        solar_dev = (solar[d] - coeffs.solar_center) / coeffs.solar_scale
        row += coeffs.nonlinear_weight * load_dev * solar_dev
        price[d] = row + noise[d]

    series = MarketSeries(
        zone_id=spec.zone_id,
        days=days,
        price=price,
        solar=solar,
        wind_on=wind_on,
        wind_off=wind_off,
        load=load,
        ngas=ngas,
        oil=oil,
        coal=coal,
        eua=eua,
    )
    series.validate()
    return series, coeffs


def canonical_zone_config(zone_id: str, has_wind_offshore: bool, dst_rule: str = "none") -> ZoneConfig:
    """ZoneConfig matching the column names written by :func:`write_csv`."""
    columns = {
        "timestamp": "timestamp",
        "price": "price",
        "solar": "solar",
        "wind_on": "wind_on",
        "load": "load",
        "ngas": "ngas",
        "oil": "oil",
        "coal": "coal",
        "eua": "eua",
    }
    if has_wind_offshore:
        columns["wind_off"] = "wind_off"
    return ZoneConfig(
        zone_id=zone_id,
        has_wind_offshore=has_wind_offshore,
        columns=columns,
        dst_rule=dst_rule,
    )


def write_csv(series: MarketSeries, path) -> None:
    """Write a series as a wide hourly CSV (canonical column names).

    Daily commodity values are repeated on each of the day's 24 rows.
    """
    n = series.n_days
    stamps = [
        f"{day.isoformat()}T{h:02d}:00:00"
        for day in series.days
        for h in range(HOURS_PER_DAY)
    ]
    data = {"timestamp": stamps}
    for role, grid in series.hourly_items():
        data[role] = grid.ravel()
    for role, vec in series.daily_items():
        data[role] = np.repeat(vec, HOURS_PER_DAY)
    pd.DataFrame(data).to_csv(path, index=False)
