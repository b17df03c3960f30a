import datetime as dt

import numpy as np
import pandas as pd
import pytest

import gridcast as gc
from gridcast.errors import DataError, SchemaError
from gridcast.marketdata import (
    ZoneConfig,
    canonical_zone_config,
    clean,
    dst_transition_dates,
    generate_synthetic,
    impute_locf,
    impute_regression,
    load_csv,
    normalize_dst,
    write_csv,
)


def csv_rows(days, start=dt.date(2021, 1, 4), price=None, skip=None):
    """Build rows of a wide hourly CSV covering consecutive days."""
    rows = []
    for d in range(days):
        day = start + dt.timedelta(days=d)
        for h in range(24):
            if skip and (day, h) in skip:
                continue
            rows.append(
                {
                    "timestamp": f"{day.isoformat()}T{h:02d}:00:00",
                    "price": 50.0 + h if price is None else price(day, h),
                    "solar": 100.0 * max(0, 12 - abs(h - 12)),
                    "wind_on": 800.0 + d,
                    "wind_off": 300.0 + d,
                    "load": 40_000.0 + 100 * h,
                    "ngas": 25.0 + d,
                    "oil": 80.0 + d,
                    "coal": 90.0 + d,
                    "eua": 85.0 + d,
                }
            )
    return rows


def write_rows(tmp_path, rows, name="data.csv"):
    path = tmp_path / name
    pd.DataFrame(rows).to_csv(path, index=False)
    return path


class TestLoadCsv:
    def test_two_full_days(self, tmp_path):
        path = write_rows(tmp_path, csv_rows(2))
        series = load_csv(path, canonical_zone_config("TEST", True))
        assert series.n_days == 2
        assert series.price.shape == (2, 24)
        assert series.missing_count() == 0
        assert series.ngas[1] == 26.0

    def test_missing_mapped_column_is_schema_error(self, tmp_path):
        rows = csv_rows(2)
        for r in rows:
            del r["load"]
        path = write_rows(tmp_path, rows)
        with pytest.raises(SchemaError, match="load"):
            load_csv(path, canonical_zone_config("TEST", True))

    def test_unparseable_cell_marked_missing(self, tmp_path):
        rows = csv_rows(2)
        rows[5]["solar"] = "NA"
        path = write_rows(tmp_path, rows)
        series = load_csv(path, canonical_zone_config("TEST", True))
        assert np.isnan(series.solar[0, 5])
        assert series.missing_count() == 1

    def test_duplicate_timestamp_outside_dst_is_data_error(self, tmp_path):
        rows = csv_rows(2)
        rows.append(dict(rows[3]))
        path = write_rows(tmp_path, rows)
        with pytest.raises(DataError, match="appears 2 times"):
            load_csv(path, canonical_zone_config("TEST", True, dst_rule="eu"))

    def test_rows_align_regardless_of_order(self, tmp_path):
        rows = csv_rows(2)
        path = write_rows(tmp_path, list(reversed(rows)))
        series = load_csv(path, canonical_zone_config("TEST", True))
        assert series.price[0, 3] == 53.0


class TestImputeLocf:
    def test_carry_forward(self):
        out = impute_locf([1.0, np.nan, np.nan, 2.0])
        assert out.tolist() == [1.0, 1.0, 1.0, 2.0]

    def test_leading_missing_is_error(self):
        with pytest.raises(DataError):
            impute_locf([np.nan, 1.0])

    def test_complete_vector_unchanged(self):
        out = impute_locf([3.0, 4.0, 5.0])
        assert out.tolist() == [3.0, 4.0, 5.0]


class TestImputeRegression:
    def test_perfect_predictor(self):
        target = np.array([1.0, np.nan, 3.0, np.nan])
        predictor = np.array([1.0, 2.0, 3.0, 4.0])
        out = impute_regression(target, predictor)
        np.testing.assert_allclose(out, [1.0, 2.0, 3.0, 4.0])

    def test_two_point_closed_form(self):
        # pairs (1, 2) and (2, 4): slope 2, intercept 0; gap at x=3 fills 6
        target = np.array([2.0, 4.0, np.nan])
        predictor = np.array([1.0, 2.0, 3.0])
        out = impute_regression(target, predictor)
        assert out[2] == pytest.approx(6.0)

    def test_constant_predictor_degenerates_to_mean(self):
        target = np.array([1.0, 3.0, np.nan])
        predictor = np.array([5.0, 5.0, 5.0])
        out = impute_regression(target, predictor)
        assert out[2] == pytest.approx(2.0)

    def test_predictor_gap_falls_back_with_warning(self):
        target = np.array([1.0, 2.0, np.nan])
        predictor = np.array([1.0, 2.0, np.nan])
        with pytest.warns(UserWarning, match="carry-forward"):
            out = impute_regression(target, predictor)
        assert out[2] == pytest.approx(2.0)

    def test_too_few_pairs_is_error(self):
        with pytest.raises(DataError):
            impute_regression(np.array([1.0, np.nan]), np.array([1.0, 2.0]))


class TestNormalizeDst:
    def test_spring_hour_is_adjacent_mean(self, tmp_path):
        spring, _ = dst_transition_dates(2021)
        start = spring - dt.timedelta(days=1)
        rows = csv_rows(3, start=start, skip={(spring, 2)})
        path = write_rows(tmp_path, rows)
        zone = canonical_zone_config("TEST", True, dst_rule="eu")
        raw = load_csv(path, zone)
        assert np.isnan(raw.price[1, 2])
        series = normalize_dst(raw, zone)
        # adjacent price values are 51 and 53
        assert series.price[1, 2] == pytest.approx(52.0)
        assert series.missing_count() == 0

    def test_spring_mean_of_specific_values(self, tmp_path):
        spring, _ = dst_transition_dates(2021)

        def price(day, h):
            if day == spring and h == 1:
                return 10.0
            if day == spring and h == 3:
                return 14.0
            return 42.0

        rows = csv_rows(2, start=spring, skip={(spring, 2)}, price=price)
        path = write_rows(tmp_path, rows)
        zone = canonical_zone_config("TEST", True, dst_rule="eu")
        series = normalize_dst(load_csv(path, zone), zone)
        assert series.price[0, 2] == pytest.approx(12.0)

    def test_fall_duplicate_is_averaged(self, tmp_path):
        _, fall = dst_transition_dates(2021)
        rows = csv_rows(2, start=fall)
        dup = dict(rows[2])  # hour 2 of the fall day
        assert dup["timestamp"].endswith("T02:00:00")
        dup["price"] = 8.0
        rows[2]["price"] = 10.0
        rows.append(dup)
        path = write_rows(tmp_path, rows)
        zone = canonical_zone_config("TEST", True, dst_rule="eu")
        raw = load_csv(path, zone)
        assert raw.dst_duplicates
        series = normalize_dst(raw, zone)
        assert series.price[0, 2] == pytest.approx(9.0)
        assert not series.dst_duplicates

    def test_non_dst_day_unchanged(self, tmp_path):
        path = write_rows(tmp_path, csv_rows(2))
        zone = canonical_zone_config("TEST", True, dst_rule="eu")
        raw = load_csv(path, zone)
        series = normalize_dst(raw, zone)
        np.testing.assert_array_equal(series.price, raw.price)

    def test_missing_adjacent_hour_is_error(self, tmp_path):
        spring, _ = dst_transition_dates(2021)
        rows = csv_rows(2, start=spring, skip={(spring, 2)})
        for r in rows:
            if r["timestamp"].endswith(f"{spring.isoformat()}T01:00:00"):
                r["price"] = "NA"
        path = write_rows(tmp_path, rows)
        zone = canonical_zone_config("TEST", True, dst_rule="eu")
        with pytest.raises(DataError, match="adjacent"):
            normalize_dst(load_csv(path, zone), zone)


class TestCalendarDummies:
    @pytest.mark.parametrize(
        "day, expected",
        [
            (dt.date(2025, 1, 13), (1, 0, 0)),  # Monday
            (dt.date(2025, 1, 15), (0, 0, 0)),  # Wednesday
            (dt.date(2025, 1, 18), (0, 1, 0)),  # Saturday
            (dt.date(2025, 1, 19), (0, 0, 1)),  # Sunday
        ],
    )
    def test_known_dates(self, day, expected):
        assert gc.calendar_dummies(day) == expected

    def test_at_most_one_indicator_over_a_year(self):
        day = dt.date(2024, 1, 1)
        for i in range(366):
            mon, sat, sun = gc.calendar_dummies(day + dt.timedelta(days=i))
            assert mon + sat + sun in (0, 1)


class TestClean:
    def test_clean_series_has_no_gaps_and_counts(self, tmp_path):
        rows = csv_rows(12)
        # plant three commodity gaps (same day, different columns count per-cell)
        rows[26]["ngas"] = ""
        rows[50]["ngas"] = ""
        rows[74]["oil"] = ""
        path = write_rows(tmp_path, rows)
        zone = canonical_zone_config("TEST", True)
        raw = load_csv(path, zone)
        series, log = clean(raw, zone)
        assert series.missing_count() == 0
        # one"" cell only marks the day when every row of the day is empty;
        # here each day keeps other rows with values, so nothing was missing
        assert log.locf_fills == 0

    def test_commodity_gap_locf_counts(self, tmp_path):
        rows = csv_rows(12)
        gap_days = {3, 7}
        for r in rows:
            day = dt.date.fromisoformat(r["timestamp"][:10])
            if (day - dt.date(2021, 1, 4)).days in gap_days:
                r["ngas"] = ""
        path = write_rows(tmp_path, rows)
        zone = canonical_zone_config("TEST", True)
        raw = load_csv(path, zone)
        assert np.isnan(raw.ngas).sum() == 2
        series, log = clean(raw, zone)
        assert log.locf_fills == 2
        assert series.ngas[3] == series.ngas[2]

    def test_hourly_gap_without_actuals_falls_back(self, tmp_path):
        rows = csv_rows(12)
        rows[30]["solar"] = "NA"
        path = write_rows(tmp_path, rows)
        zone = canonical_zone_config("TEST", True)
        raw = load_csv(path, zone)
        with pytest.warns(UserWarning):
            series, log = clean(raw, zone)
        assert log.locf_fallback_fills == 1
        assert series.missing_count() == 0

    def test_hourly_gap_with_actuals_uses_regression(self, tmp_path):
        rows = csv_rows(12)
        for r in rows:
            r["solar_actual"] = float(r["solar"]) * 2.0
        rows[30]["solar"] = "NA"
        path = write_rows(tmp_path, rows)
        base = canonical_zone_config("TEST", True)
        zone = ZoneConfig(
            zone_id="TEST",
            has_wind_offshore=True,
            columns=dict(base.columns),
            actual_pairs={"solar": "solar_actual"},
            dst_rule="none",
        )
        raw = load_csv(path, zone)
        series, log = clean(raw, zone)
        assert log.regression_fills == 1
        # actual = 2 * day-ahead, so the fit inverts the doubling exactly
        expected = rows[30]["solar_actual"] / 2.0
        assert series.solar[1, 6] == pytest.approx(expected)


class TestZoneConfig:
    def test_missing_role_is_schema_error(self):
        cols = dict(canonical_zone_config("Z", False).columns)
        del cols["price"]
        with pytest.raises(SchemaError, match="price"):
            ZoneConfig(zone_id="Z", has_wind_offshore=False, columns=cols)

    def test_offshore_flag_must_match_mapping(self):
        cols = dict(canonical_zone_config("Z", False).columns)
        with pytest.raises(SchemaError, match="wind_off"):
            ZoneConfig(zone_id="Z", has_wind_offshore=True, columns=cols)

    def test_duplicate_column_is_schema_error(self):
        cols = dict(canonical_zone_config("Z", False).columns)
        cols["solar"] = cols["price"]
        with pytest.raises(SchemaError, match="twice"):
            ZoneConfig(zone_id="Z", has_wind_offshore=False, columns=cols)

    def test_json_round_trip(self, tmp_path):
        zone = canonical_zone_config("Z", True)
        zone.to_json(tmp_path / "zone.json")
        back = ZoneConfig.from_json(tmp_path / "zone.json")
        assert back == zone


class TestGenerateSynthetic:
    def test_same_seed_is_bitwise_identical(self):
        a, _ = generate_synthetic(40, seed=5)
        b, _ = generate_synthetic(40, seed=5)
        np.testing.assert_array_equal(a.price, b.price)
        np.testing.assert_array_equal(a.load, b.load)
        np.testing.assert_array_equal(a.ngas, b.ngas)

    def test_different_seed_differs(self):
        a, _ = generate_synthetic(40, seed=5)
        b, _ = generate_synthetic(40, seed=6)
        assert not np.array_equal(a.price, b.price)

    def test_too_short_is_error(self):
        with pytest.raises(DataError):
            generate_synthetic(10, seed=0)

    def test_noise_free_linear_prices_match_generating_equation(self):
        spec = gc.SyntheticSpec(noise_scale=0.0, nonlinear_weight=0.0)
        series, coeffs = generate_synthetic(40, seed=3, spec=spec)
        for d in (7, 20, 39):
            np.testing.assert_allclose(
                series.price[d], coeffs.linear_prediction(series, d), rtol=0, atol=1e-9
            )

    def test_nonlinear_term_added_when_planted(self):
        base = gc.SyntheticSpec(noise_scale=0.0, nonlinear_weight=0.0)
        planted = gc.SyntheticSpec(noise_scale=0.0, nonlinear_weight=5.0)
        series, coeffs = generate_synthetic(40, seed=3, spec=planted)
        for d in (10, 30):
            expected = coeffs.linear_prediction(series, d) + coeffs.nonlinear_term(series, d)
            np.testing.assert_allclose(series.price[d], expected, rtol=0, atol=1e-9)
        assert generate_synthetic(40, seed=3, spec=base)[1].nonlinear_weight == 0.0

    def test_csv_round_trip(self, tmp_path):
        series, _ = generate_synthetic(35, seed=9)
        path = tmp_path / "synth.csv"
        write_csv(series, path)
        zone = canonical_zone_config(series.zone_id, True)
        back = load_csv(path, zone)
        np.testing.assert_allclose(back.price, series.price, atol=1e-9)
        np.testing.assert_allclose(back.ngas, series.ngas, atol=1e-9)

    def test_spain_like_zone_has_no_offshore(self):
        series, _ = generate_synthetic(35, seed=1, spec=gc.SyntheticSpec(has_wind_offshore=False))
        assert series.wind_off is None
