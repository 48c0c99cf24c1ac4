import numpy as np
import pytest

from spdc_tuner import (
    CrystalSpec,
    GridSpec,
    PumpSpec,
    QuadratureSpec,
    degenerate_poling_period,
    load_builtin_dispersion,
)

PUMP_WL = 532e-9
WAIST_NARROW = 23.27e-6
WAIST_WIDE = 46.53e-6
LENGTH_SHORT = 7.5e-3
LENGTH_LONG = 12e-3


@pytest.fixture(scope="session")
def ktp():
    return load_builtin_dispersion()


@pytest.fixture(scope="session")
def pump(ktp):
    return PumpSpec.from_wavelength(PUMP_WL, WAIST_NARROW)


@pytest.fixture(scope="session")
def pump_wide(ktp):
    return PumpSpec.from_wavelength(PUMP_WL, WAIST_WIDE)


@pytest.fixture(scope="session")
def gstar(ktp, pump):
    probe = CrystalSpec(length_m=LENGTH_SHORT, poling_m=9e-6, dispersion=ktp)
    return degenerate_poling_period(pump, probe, 25.0)


@pytest.fixture(scope="session")
def crystal(ktp, gstar):
    return CrystalSpec(length_m=LENGTH_SHORT, poling_m=gstar, dispersion=ktp)


@pytest.fixture
def small_grid():
    return GridSpec(lambda_points=32, q_points=32)


@pytest.fixture
def small_quad():
    return QuadratureSpec(points_per_axis=16, refine_tol=1e-3, max_points=64)


def make_crystal(ktp, poling_m, length_m=LENGTH_SHORT, alpha=None, beta=None):
    kwargs = {}
    if alpha is not None:
        kwargs["alpha"] = alpha
    if beta is not None:
        kwargs["beta"] = beta
    return CrystalSpec(length_m=length_m, poling_m=poling_m, dispersion=ktp, **kwargs)


@pytest.fixture(scope="session")
def omega_of():
    def convert(lambda_m):
        from scipy.constants import c
        return 2.0 * np.pi * c / lambda_m
    return convert
