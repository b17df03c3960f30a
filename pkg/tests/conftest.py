import numpy as np
import pytest

import gridcast as gc


@pytest.fixture(scope="session")
def synth_series():
    series, coeffs = gc.generate_synthetic(120, seed=7)
    return series, coeffs


@pytest.fixture(scope="session")
def designs(synth_series):
    series, _ = synth_series
    return gc.build_designs(series)


@pytest.fixture(scope="session")
def std_designs(designs):
    scaler = gc.fit_scaler(designs, rows=np.arange(7, 90))
    return gc.standardize_designs(designs, scaler), scaler
