import numpy as np
import pytest

import gridcast as gc
from gridcast.errors import DataError
from gridcast.features import FeatureLayout, DesignScaler


class TestFeatureLayout:
    def test_widths_with_offshore(self):
        layout = FeatureLayout(True)
        assert layout.n_features == 175
        assert layout.reduced_indices(5).size == 15
        assert layout.reduced_indices(23).size == 14

    def test_widths_without_offshore(self):
        # 24x3 price lags + 24x3 fundamentals + 4 commodities + 3 dummies
        layout = FeatureLayout(False)
        assert layout.n_features == 151
        assert layout.reduced_indices(5).size == 14
        assert layout.reduced_indices(23).size == 13

    def test_reduced_ordering_documented(self):
        layout = FeatureLayout(True)
        assert layout.reduced_names(4) == (
            "price_d1_h04", "price_d2_h04", "price_d7_h04", "price_d1_h23",
            "solar_h04", "wind_on_h04", "wind_off_h04", "load_h04",
            "oil_d2", "coal_d2", "eua_d2", "ngas_d2", "mon", "sat", "sun",
        )

    def test_hour_23_drops_duplicate_slot(self):
        layout = FeatureLayout(True)
        names = layout.reduced_names(23)
        assert names.count("price_d1_h23") == 1

    def test_skip_mask_row_sums(self):
        layout = FeatureLayout(True)
        reduced = layout.skip_mask("reduced")
        assert reduced.sum(axis=1)[:23].tolist() == [15.0] * 23
        assert reduced.sum(axis=1)[23] == 14.0
        assert layout.skip_mask("full").sum() == 24 * 175
        assert layout.skip_mask(None).sum() == 0

    def test_feature_map_artifact(self, tmp_path):
        layout = FeatureLayout(False)
        layout.write_feature_map(tmp_path / "feature_map.txt")
        lines = (tmp_path / "feature_map.txt").read_text().splitlines()
        assert len(lines) == 151
        assert lines[0] == "0\tprice_d1_h00"
        assert lines[-1] == "150\tsun"


class TestBuildDesigns:
    def test_values_match_series_arrays(self, synth_series, designs):
        series, _ = synth_series
        layout = designs.layout
        for d in (8, 50, 119):
            x = designs.X[d]
            expected = np.concatenate(
                [
                    series.price[d - 1],
                    series.price[d - 2],
                    series.price[d - 7],
                    series.solar[d],
                    series.wind_on[d],
                    series.wind_off[d],
                    series.load[d],
                    [series.oil[d - 2], series.coal[d - 2],
                     series.eua[d - 2], series.ngas[d - 2]],
                    gc.calendar_dummies(series.days[d]),
                ]
            )
            np.testing.assert_allclose(x, expected)
            np.testing.assert_array_equal(designs.Y[d], series.price[d])
            assert designs.day(d).valid

    def test_reduced_slice_agrees_with_full_vector(self, synth_series, designs):
        series, _ = synth_series
        d = 30
        for h in (0, 11, 23):
            expected = [series.price[d - 1, h], series.price[d - 2, h], series.price[d - 7, h]]
            if h != 23:
                expected.append(series.price[d - 1, 23])
            expected += [
                series.solar[d, h], series.wind_on[d, h], series.wind_off[d, h],
                series.load[d, h], series.oil[d - 2], series.coal[d - 2],
                series.eua[d - 2], series.ngas[d - 2],
            ]
            expected += list(gc.calendar_dummies(series.days[d]))
            np.testing.assert_allclose(designs.reduced_x(d, h), expected)
            np.testing.assert_allclose(designs.day(d).reduced_x(h), expected)

    def test_first_seven_days_invalid(self, designs):
        assert not designs.valid[:7].any()
        assert designs.valid[7:].all()

    def test_short_series_is_error(self):
        series, _ = gc.generate_synthetic(30, seed=0)
        import dataclasses

        stub = dataclasses.replace(
            series,
            days=series.days[:5],
            price=series.price[:5],
            solar=series.solar[:5],
            wind_on=series.wind_on[:5],
            wind_off=series.wind_off[:5],
            load=series.load[:5],
            ngas=series.ngas[:5],
            oil=series.oil[:5],
            coal=series.coal[:5],
            eua=series.eua[:5],
            weekday=series.weekday[:5],
        )
        with pytest.raises(DataError, match="at least 8"):
            gc.build_designs(stub)

    def test_uncleaned_series_is_error(self, synth_series):
        series, _ = synth_series
        import dataclasses

        dirty = dataclasses.replace(series, solar=series.solar.copy())
        dirty.solar[3, 3] = np.nan
        with pytest.raises(DataError, match="cleaned"):
            gc.build_designs(dirty)

    def test_index_of(self, designs):
        assert designs.index_of(designs.dates[12]) == 12
        with pytest.raises(DataError):
            designs.index_of(designs.dates[0].replace(year=1999))


class TestDesignScaler:
    def test_population_moments(self):
        X = np.array([[1.0], [2.0], [3.0]])
        scaler = DesignScaler().fit(X)
        assert scaler.mean_[0] == pytest.approx(2.0)
        assert scaler.std_[0] == pytest.approx(np.sqrt(2.0 / 3.0))

    def test_constant_column_forced_to_unit_std(self):
        X = np.full((3, 1), 5.0)
        scaler = DesignScaler().fit(X)
        assert scaler.mean_[0] == 5.0
        assert scaler.std_[0] == 1.0
        np.testing.assert_allclose(scaler.transform(X), np.zeros((3, 1)))

    def test_transform_of_mean_is_zero(self):
        X = np.array([[1.0, 10.0], [3.0, 30.0]])
        scaler = DesignScaler().fit(X)
        np.testing.assert_allclose(scaler.transform(scaler.mean_[None, :]), 0.0, atol=1e-15)

    def test_dummy_column_keeps_unit_scale(self):
        X = np.array([[1.0], [0.0], [0.0], [1.0], [1.0], [0.0], [1.0], [0.0], [0.0], [0.0]])
        scaler = DesignScaler(unit_std_columns=(0,)).fit(X)
        assert scaler.std_[0] == 1.0
        assert scaler.mean_[0] == pytest.approx(0.4)
        # dummy value 1 with mean 0.3 maps to 0.7
        scaler.mean_ = np.array([0.3])
        assert scaler.transform(np.array([[1.0]]))[0, 0] == pytest.approx(0.7)

    def test_round_trip_identity(self, designs):
        scaler = gc.fit_scaler(designs, rows=np.arange(7, 60))
        X = designs.X[7:60]
        back = scaler.inverse_transform(scaler.transform(X))
        np.testing.assert_allclose(back, X, atol=1e-12)

    def test_window_columns_standardized(self, designs):
        rows = np.arange(7, 90)
        scaler = gc.fit_scaler(designs, rows=rows)
        Z = scaler.transform(designs.X[rows])
        dummies = set(designs.layout.dummy_columns.tolist())
        keep = [j for j in range(Z.shape[1]) if j not in dummies]
        np.testing.assert_allclose(Z[:, keep].mean(axis=0), 0.0, atol=1e-10)
        np.testing.assert_allclose(Z[:, keep].std(axis=0), 1.0, atol=1e-10)

    def test_layout_mismatch_is_error(self, designs):
        scaler = gc.fit_scaler(designs)
        with pytest.raises(ValueError, match="layout mismatch"):
            scaler.transform(np.zeros((3, 7)))

    def test_unfitted_transform_is_error(self):
        with pytest.raises(ValueError, match="not fitted"):
            DesignScaler().transform(np.zeros((2, 2)))

    def test_empty_window_is_error(self):
        with pytest.raises(ValueError, match="non-empty"):
            DesignScaler().fit(np.zeros((0, 3)))

    def test_standardize_designs_keeps_targets(self, designs):
        scaler = gc.fit_scaler(designs)
        std = gc.standardize_designs(designs, scaler)
        np.testing.assert_array_equal(std.Y, designs.Y)
        assert std.X.shape == designs.X.shape

    def test_transform_single_day(self, designs):
        scaler = gc.fit_scaler(designs)
        day = designs.day(10)
        out = gc.transform_design(day, scaler)
        np.testing.assert_allclose(out.full_x, scaler.transform(day.full_x))
        np.testing.assert_array_equal(out.targets, day.targets)
