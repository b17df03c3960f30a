"""Command line pipeline: ingest/synthesize data, tune, backtest, select
ensembles, evaluate, and emit report tables.

All artifacts are plain CSV or JSON.  Outputs are bit-identical across
runs with the same config and seed, except the explicitly runtime-bearing
artifacts (``timing.json`` and the runtime column of ``pareto.csv``).
Exit codes: 0 success, 1 usage/config error, 2 data or schema error,
3 numerical failure.

The experiment config is one JSON file; see the README for the schema.
A single global seed fans out deterministically to every component via
:func:`gridcast.seeding.child_seed`.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd

from . import evaluation, marketdata, tuner
from .ensemble import forward_select
from .errors import ConfigError, DataError, GridcastError, NumericalError, SchemaError
from .features import build_designs
from .model import ARCHITECTURES, ModelSpec
from .online import (
    OnlineSchedule,
    run_backtest,
    write_forecasts_csv,
    write_metrics_json,
    write_timing_json,
)
from .seeding import child_seed

USAGE_ERROR, DATA_ERROR, NUMERICAL_ERROR = 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); we map usage to 1
        raise ConfigError(message)


class ExperimentConfig:
    """Typed view over the experiment JSON file."""

    def __init__(self, raw: dict, base_dir: Path):
        self.raw = raw
        self.base_dir = base_dir

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        path = Path(path)
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        cfg = cls(raw, path.parent)
        cfg.validate_periods()
        return cfg

    def _resolve(self, value) -> Path:
        p = Path(value)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def seed(self) -> int:
        return int(self.raw.get("seed", 0))

    @property
    def out_dir(self) -> Path:
        return self._resolve(self.raw.get("out_dir", "out"))

    def zone(self) -> marketdata.ZoneConfig:
        if "zone_path" in self.raw:
            return marketdata.ZoneConfig.from_json(self._resolve(self.raw["zone_path"]))
        if "zone" in self.raw:
            z = self.raw["zone"]
            return marketdata.ZoneConfig(
                zone_id=z["zone_id"],
                has_wind_offshore=bool(z["has_wind_offshore"]),
                columns=dict(z["columns"]),
                actual_pairs=dict(z.get("actual_pairs", {})),
                dst_rule=z.get("dst_rule", "eu"),
            )
        raise ConfigError("config needs either 'zone' or 'zone_path'")

    def data_csv(self) -> Path:
        if "data_csv" not in self.raw:
            raise ConfigError("config needs 'data_csv'")
        return self._resolve(self.raw["data_csv"])

    def synthetic_spec(self) -> tuple:
        if "synthetic" not in self.raw:
            raise ConfigError("config needs a 'synthetic' section for synth")
        s = self.raw["synthetic"]
        spec = marketdata.SyntheticSpec(
            noise_scale=float(s.get("noise_scale", 3.0)),
            nonlinear_weight=float(s.get("nonlinear_weight", 0.0)),
            has_wind_offshore=bool(s.get("has_wind_offshore", True)),
            start_day=dt.date.fromisoformat(s.get("start_day", "2020-01-06")),
            zone_id=s.get("zone_id", "SYNTH"),
        )
        return int(s["n_days"]), spec

    def model_spec(self, seed: int) -> ModelSpec:
        m = dict(self.raw.get("model", {}))
        if "architecture" not in m:
            raise ConfigError("config needs model.architecture")
        if m["architecture"] not in ARCHITECTURES:
            raise ConfigError(f"unknown architecture {m['architecture']!r}")
        try:
            return ModelSpec(
                architecture=m["architecture"],
                hidden_n=int(m.get("hidden_n", 0)),
                leak_alpha=float(m.get("leak_alpha", 0.01)),
                lambda1=float(m.get("lambda1", 0.0)),
                lambda2=float(m.get("lambda2", 0.0)),
                ols_share_alpha=(None if m.get("ols_share_alpha") is None
                                 else float(m["ols_share_alpha"])),
                seed=seed,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def schedule(self) -> OnlineSchedule:
        s = dict(self.raw.get("schedule", {}))
        try:
            return OnlineSchedule(
                d_init=int(s["d_init"]),
                d_up=int(s["d_up"]),
                lr_init=float(s["lr_init"]),
                lr_up=float(s["lr_up"]),
                epochs_init=int(s.get("epochs_init", 60)),
                epochs_up=int(s.get("epochs_up", 10)),
            )
        except KeyError as exc:
            raise ConfigError(f"schedule section missing {exc}") from exc
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def period(self, which: str) -> tuple:
        p = self.raw.get("periods", {})
        try:
            return (
                dt.date.fromisoformat(p[f"{which}_start"]),
                dt.date.fromisoformat(p[f"{which}_end"]),
            )
        except KeyError as exc:
            raise ConfigError(f"periods section missing {exc}") from exc

    def validate_periods(self) -> None:
        p = self.raw.get("periods", {})
        dates = {}
        for key, value in p.items():
            try:
                dates[key] = dt.date.fromisoformat(value)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"periods.{key}: bad date {value!r}") from exc
        for which in ("validation", "test"):
            a, b = dates.get(f"{which}_start"), dates.get(f"{which}_end")
            if a and b and b < a:
                raise ConfigError(f"{which} period ends before it starts")
        if dates.get("validation_end") and dates.get("test_start"):
            if dates["test_start"] <= dates["validation_end"]:
                raise ConfigError("test period must start after the validation period")


def _load_cleaned_series(config: ExperimentConfig):
    zone = config.zone()
    series = marketdata.load_csv(config.data_csv(), zone)
    series, log = marketdata.clean(series, zone)
    return series, log


def cmd_synth(config: ExperimentConfig, out: Path, seed: int) -> int:
    n_days, spec = config.synthetic_spec()
    series, coeffs = marketdata.generate_synthetic(n_days, child_seed(seed, "synth"), spec)
    out.mkdir(parents=True, exist_ok=True)
    marketdata.write_csv(series, out / "data.csv")
    zone = marketdata.canonical_zone_config(spec.zone_id, spec.has_wind_offshore)
    zone.to_json(out / "zone.json")
    payload = {
        name: (list(value) if isinstance(value, np.ndarray) else value)
        for name, value in vars(coeffs).items()
    }
    with open(out / "generating_coefficients.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"synth: wrote {n_days} days to {out / 'data.csv'}")
    return 0


def cmd_ingest(config: ExperimentConfig, out: Path, seed: int) -> int:
    series, log = _load_cleaned_series(config)
    out.mkdir(parents=True, exist_ok=True)
    marketdata.write_csv(series, out / "cleaned.csv")
    log.to_json(out / "cleaning_log.json")
    print(
        f"ingest: {series.n_days} days cleaned; imputations: "
        f"dst_spring={log.dst_spring_fills} dst_fall={log.dst_fall_merges} "
        f"locf={log.locf_fills} regression={log.regression_fills} "
        f"fallback={log.locf_fallback_fills}"
    )
    return 0


def _best_study_assignment(config: ExperimentConfig, study_csv: Path) -> dict:
    frame = pd.read_csv(study_csv)
    frame = frame[frame["failed"] == 0]
    if len(frame) == 0:
        raise DataError(f"{study_csv}: no successful trials")
    row = frame.sort_values(["mae", "trial_id"]).iloc[0]
    skip = {"trial_id", "mae", "runtime_seconds", "failed"}
    out = {}
    for key, value in row.items():
        if key in skip or pd.isna(value):
            continue
        out[key] = value
    return out


def cmd_backtest(config: ExperimentConfig, out: Path, seed: int) -> int:
    series, _ = _load_cleaned_series(config)
    designs = build_designs(series)
    spec = config.model_spec(child_seed(seed, "model"))
    schedule = config.schedule()
    if "from_study" in config.raw.get("model", {}):
        assignment = _best_study_assignment(
            config, config._resolve(config.raw["model"]["from_study"])
        )
        spec, schedule = tuner.apply_assignment(
            spec, schedule, assignment, seed=child_seed(seed, "model")
        )
    start, end = config.period("test")
    result = run_backtest(spec, schedule, designs, start, end)
    run_dir = out / config.raw.get("model", {}).get("name", spec.architecture)
    run_dir.mkdir(parents=True, exist_ok=True)
    write_forecasts_csv(result, run_dir / "forecasts.csv")
    write_metrics_json(result.metrics, run_dir / "metrics.json")
    write_timing_json(result, run_dir / "timing.json")
    print(
        f"backtest[{run_dir.name}]: {result.n_days} days, mae={result.metrics.mae:.4f} "
        f"rmae={result.metrics.rmae:.4f} ({result.total_seconds:.1f}s)"
    )
    return 0


def cmd_tune(config: ExperimentConfig, out: Path, seed: int, n_jobs: int) -> int:
    series, _ = _load_cleaned_series(config)
    designs = build_designs(series)
    t = dict(config.raw.get("tuner", {}))
    architectures = t.get("architectures")
    if not architectures:
        architectures = [config.raw.get("model", {}).get("architecture")]
    if not architectures or architectures[0] is None:
        raise ConfigError("tuner needs 'tuner.architectures' or model.architecture")
    n_trials = int(t.get("n_trials", 500))
    start, end = config.period("validation")
    schedule = config.schedule()
    for arch in architectures:
        space = _space_for(arch, t)
        spec = ModelSpec(
            architecture=arch,
            hidden_n=8 if ARCHITECTURES[arch][1] else 0,
            ols_share_alpha=1.0 if ARCHITECTURES[arch][2] else None,
        )
        records = tuner.run_study(
            spec, schedule, space, designs, start, end,
            n_trials=n_trials, seed=child_seed(seed, "study", arch),
            gamma=float(t.get("gamma", 0.25)),
            n_candidates=int(t.get("n_candidates", 24)),
            n_startup=int(t.get("n_startup", 10)),
            n_jobs=n_jobs,
        )
        study_dir = out / f"tune_{arch}"
        study_dir.mkdir(parents=True, exist_ok=True)
        tuner.write_study_csv(records, study_dir / "trials.csv")
        store = study_dir / "forecasts"
        for record in records:
            if not record.failed:
                tuner.save_trial_forecasts(store, record)
        ok = sum(1 for r in records if not r.failed)
        print(f"tune[{arch}]: {ok}/{len(records)} trials ok, "
              f"best mae={records[0].mae:.4f}")
    return 0


def _space_for(arch: str, tuner_cfg: dict) -> tuner.SearchSpace:
    overrides = tuner_cfg.get("space", {})
    if not overrides:
        return tuner.default_search_space(arch)
    params = []
    for p in tuner.default_search_space(arch).params:
        o = overrides.get(p.name)
        if o is None:
            params.append(p)
        else:
            params.append(
                tuner.ParamRange(
                    name=p.name,
                    low=float(o.get("low", p.low)),
                    high=float(o.get("high", p.high)),
                    log=bool(o.get("log", p.log)),
                    integer=bool(o.get("integer", p.integer)),
                )
            )
    return tuner.SearchSpace(params=tuple(params))


def _validation_realized(config: ExperimentConfig):
    series, _ = _load_cleaned_series(config)
    start, end = config.period("validation")
    day_index = {d: i for i, d in enumerate(series.days)}
    if start not in day_index or end not in day_index:
        raise DataError("validation period not covered by the data")
    return series.price[day_index[start] : day_index[end] + 1]


def cmd_select(config: ExperimentConfig, out: Path, seed: int) -> int:
    size = int(config.raw.get("select", {}).get("size", 10))
    pool_cap = int(config.raw.get("select", {}).get("pool", 500))
    realized = _validation_realized(config)
    study_dirs = sorted(out.glob("tune_*"))
    if not study_dirs:
        raise DataError(f"no tuning studies found under {out} (run tune first)")
    selections = {}
    pooled = []
    for study_dir in study_dirs:
        arch = study_dir.name.removeprefix("tune_")
        records = [
            tuner.load_trial_forecasts(p)
            for p in sorted(study_dir.glob("forecasts/*.npz"))
        ]
        records = [r for r in records if r.forecasts is not None]
        records.sort(key=lambda r: (r.mae, r.trial_id))
        if not records:
            raise DataError(f"{study_dir}: no stored trial forecasts")
        for r in records:
            pooled.append((arch, r))
        order, trace = forward_select([r.forecasts for r in records], realized, size)
        selections[f"{arch} (BOA)"] = {
            "members": [int(records[i].trial_id) for i in order],
            "member_params": [records[i].params for i in order],
            "validation_mae_trace": trace,
        }
    pooled.sort(key=lambda ar: (ar[1].mae, ar[0], ar[1].trial_id))
    pooled = pooled[:pool_cap]
    order, trace = forward_select([r.forecasts for _, r in pooled], realized, size)
    selections["BOA all"] = {
        "members": [f"{pooled[i][0]}/{pooled[i][1].trial_id}" for i in order],
        "validation_mae_trace": trace,
    }
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "ensembles.json", "w") as fh:
        json.dump(selections, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"select: built {len(selections)} ensembles -> {out / 'ensembles.json'}")
    return 0


def _realized_for_dates(series, dates):
    day_index = {d: i for i, d in enumerate(series.days)}
    rows = []
    for d in dates:
        if d not in day_index:
            raise DataError(f"forecast date {d} not present in the data")
        rows.append(day_index[d])
    return np.array(rows, dtype=int)


def _read_forecasts_csv(path):
    frame = pd.read_csv(path)
    dates = [dt.date.fromisoformat(s) for s in frame["date"]]
    values = frame[[f"h{h:02d}" for h in range(24)]].to_numpy(dtype=float)
    return dates, values


def cmd_evaluate(config: ExperimentConfig, out: Path, seed: int,
                 forecasts_path: Path | None) -> int:
    series, _ = _load_cleaned_series(config)
    path = forecasts_path
    if path is None:
        candidates = sorted(out.glob("*/forecasts.csv"))
        if len(candidates) != 1:
            raise DataError(
                f"found {len(candidates)} forecast artifacts under {out}; "
                "pass --forecasts to pick one"
            )
        path = candidates[0]
    if not Path(path).exists():
        raise DataError(f"missing forecasts artifact: {path}")
    dates, forecasts = _read_forecasts_csv(path)
    rows = _realized_for_dates(series, dates)
    realized = series.price[rows]
    naive = evaluation.naive_forecasts(series.price, series.weekday, rows)
    report = evaluation.metrics(forecasts, realized, naive)
    out.mkdir(parents=True, exist_ok=True)
    write_metrics_json(report, out / "evaluation.json")
    frame = pd.DataFrame(
        {
            "metric": ["rmse", "mae", "rmae"],
            "value": [report.rmse, report.mae, report.rmae],
        }
    )
    frame.to_csv(out / "evaluation.csv", index=False)
    print(f"evaluate: rmse={report.rmse:.4f} mae={report.mae:.4f} rmae={report.rmae:.4f}")
    return 0


def cmd_report(config: ExperimentConfig, out: Path, seed: int) -> int:
    series, _ = _load_cleaned_series(config)
    runs = sorted(p.parent for p in out.glob("*/forecasts.csv"))
    if not runs:
        raise DataError(f"no run directories with forecasts.csv under {out}")
    tracks, timings = {}, {}
    realized = None
    for run_dir in runs:
        name = run_dir.name
        dates, forecasts = _read_forecasts_csv(run_dir / "forecasts.csv")
        rows = _realized_for_dates(series, dates)
        tracks[name] = forecasts
        if realized is None:
            realized = series.price[rows]
            naive = evaluation.naive_forecasts(series.price, series.weekday, rows)
            ref_dates = dates
        elif dates != ref_dates:
            raise DataError(f"{name}: forecast period differs from the other runs")
        timing_file = run_dir / "timing.json"
        if timing_file.exists():
            with open(timing_file) as fh:
                timings[name] = float(json.load(fh)["total_seconds"])
        else:
            timings[name] = float("nan")

    report_dir = out / "report"
    report_dir.mkdir(parents=True, exist_ok=True)
    names = list(tracks)

    hourly = pd.DataFrame(
        {name: evaluation.hourly_rmse(tracks[name], realized) for name in names}
    ).T
    hourly.columns = [f"h{h:02d}" for h in range(24)]
    hourly.insert(0, "model", names)
    hourly.to_csv(report_dir / "hourly_rmse.csv", index=False)

    rows = []
    for name in names:
        rep = evaluation.metrics(tracks[name], realized, naive)
        rows.append({"model": name, "rmse": rep.rmse, "mae": rep.mae, "rmae": rep.rmae})
    table = pd.DataFrame(rows)
    table.to_csv(report_dir / "metrics_table.csv", index=False)

    dm_names, matrix = evaluation.pairwise_dm_matrix(tracks, realized)
    dm = pd.DataFrame(matrix, columns=dm_names)
    dm.insert(0, "model", dm_names)
    dm.to_csv(report_dir / "dm_matrix.csv", index=False)

    pareto_rows = []
    maes = {name: float(np.abs(tracks[name] - realized).mean()) for name in names}
    for name in names:
        dominated = any(
            other != name
            and timings[other] <= timings[name]
            and maes[other] <= maes[name]
            and (timings[other] < timings[name] or maes[other] < maes[name])
            for other in names
        )
        pareto_rows.append(
            {
                "model": name,
                "runtime_seconds": timings[name],
                "mae": maes[name],
                "pareto_optimal": not dominated,
            }
        )
    pd.DataFrame(pareto_rows).to_csv(report_dir / "pareto.csv", index=False)
    print(f"report: {len(names)} model(s) -> {report_dir}")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="gridcast", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="experiment config JSON")
    common.add_argument("--seed", type=int, default=None, help="override config seed")
    common.add_argument("--out", default=None, help="override config out_dir")
    common.add_argument("--jobs", type=int, default=1, help="parallel trial workers")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("ingest", "synth", "tune", "backtest", "select", "evaluate", "report"):
        p = sub.add_parser(name, parents=[common])
        if name == "evaluate":
            p.add_argument("--forecasts", default=None, help="forecasts.csv to score")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        config = ExperimentConfig.load(args.config)
        seed = config.seed if args.seed is None else args.seed
        out = Path(args.out) if args.out else config.out_dir
        if args.command == "synth":
            return cmd_synth(config, out, seed)
        if args.command == "ingest":
            return cmd_ingest(config, out, seed)
        if args.command == "backtest":
            return cmd_backtest(config, out, seed)
        if args.command == "tune":
            return cmd_tune(config, out, seed, args.jobs)
        if args.command == "select":
            return cmd_select(config, out, seed)
        if args.command == "evaluate":
            forecasts = Path(args.forecasts) if args.forecasts else None
            return cmd_evaluate(config, out, seed, forecasts)
        if args.command == "report":
            return cmd_report(config, out, seed)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (SchemaError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_ERROR
    except (NumericalError, GridcastError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
