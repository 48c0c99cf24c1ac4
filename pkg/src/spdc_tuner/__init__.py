"""Tuning curves of type-0 SPDC in periodically poled crystals.

Library layout:

- `dispersion`: temperature-dependent refractive index, thermal expansion
- `phasematch`: longitudinal mismatch, QPM residual, amplitude kernel
- `spectrum`: quadrature engine, tuning-curve grids, instrument smoothing
- `calibrate`: sweeps, poling-period fitting, photon-budget utilities
- `config` / `cli` / `writers` / `figures`: batch-run plumbing
"""

from .dispersion import (
    CrystalSpec,
    DispersionModel,
    KTP_ALPHA,
    KTP_BETA,
    TemperatureExtrapolationWarning,
    WavelengthOutOfRange,
    builtin_dispersion_path,
    crystal_length_at,
    load_builtin_dispersion,
    load_dispersion_file,
    poling_period_at,
    refractive_index,
    wavevector_magnitude,
)
from .phasematch import (
    BeyondCone,
    EVANESCENT,
    PumpSpec,
    TransverseMomentum,
    amplitude_sq,
    degenerate_poling_period,
    emission_angle,
    longitudinal_mismatch,
    pump_amplitude,
    qpm_residual,
    sinc,
)
from .spectrum import (
    AllZeroGrid,
    GridSpec,
    InstrumentSpec,
    KernelUnderresolved,
    QuadratureNoConverge,
    QuadratureSpec,
    Scenario,
    TuningCurve,
    fiber_position_to_q,
    instrument_convolve,
    marginal_spectrum,
    spectral_density,
    spectral_density_at,
    spectral_density_riemann,
    tuning_curve,
)
from .calibrate import (
    EquivalenceResult,
    FitResult,
    MeasuredSpectrum,
    NoDescent,
    SweepEntry,
    fit_poling_period,
    load_measured_csv,
    mode_density,
    photon_flux,
    sweep,
    temperature_poling_equivalence,
)

__version__ = "0.1.0"
