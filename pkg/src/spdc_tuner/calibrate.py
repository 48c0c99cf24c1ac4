"""Parameter sweeps, poling-period fitting, and photon-budget utilities.

The effective poling period of a poled crystal is rarely known to the
nanometre accuracy the spectrum demands, so it is recovered by matching
simulations against a reference spectrum. Poling period and temperature are
nearly interchangeable knobs; fitting is therefore one-dimensional (golden
section on the period), and the temperature equivalence is reported as a
period offset instead of being fitted jointly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.constants import c as C_LIGHT, h as H_PLANCK
from scipy.interpolate import RegularGridInterpolator

from .dispersion import CrystalSpec, poling_period_at, _expansion_factor
from .phasematch import Q_ZERO, PumpSpec, longitudinal_mismatch
from .spectrum import (
    InstrumentSpec,
    Scenario,
    TuningCurve,
    fiber_position_to_q,
    instrument_convolve,
    tuning_curve,
)

SWEEPABLE = ("G0", "w0", "T", "L0")

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


class NoDescent(RuntimeError):
    """Fit objective is flat across the search bounds; nothing to descend."""


@dataclass(frozen=True)
class MeasuredSpectrum:
    """Imported reference records (momentum, wavelength, counts)."""

    q: np.ndarray              # rad/m
    wavelength_nm: np.ndarray
    counts: np.ndarray         # relative
    instrument: InstrumentSpec | None = None

    def __post_init__(self):
        if len(self.counts) == 0:
            raise ValueError("measured spectrum has no records")
        if np.any(self.counts < 0):
            raise ValueError("counts must be nonnegative")
        if not np.any(self.counts > 0):
            raise ValueError("measured spectrum is identically zero")


@dataclass(frozen=True)
class FitResult:
    best_poling_m: float
    residual: float
    iterations: int
    converged: bool
    best_temp_c: float | None = None


@dataclass(frozen=True)
class SweepEntry:
    value: float
    curve: TuningCurve | None
    error: Exception | None = None


@dataclass(frozen=True)
class EquivalenceResult:
    """Poling-period offset equivalent to a temperature step."""

    delta_poling_m: float
    expansion_share_m: float   # alpha * G0 * dT, the pure thermal-expansion part
    fit: FitResult


def load_measured_csv(path: str | Path, instrument: InstrumentSpec | None = None) -> MeasuredSpectrum:
    """Read `x_mm,lambda_nm,counts` or `q_per_um,lambda_nm,counts` records.

    `#` lines are comments; row order is irrelevant. Position records need an
    instrument (its imaging focal length maps position to momentum).
    """
    path = Path(path)
    header = None
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if header is None:
            header = [col.strip() for col in stripped.split(",")]
            if header not in (["x_mm", "lambda_nm", "counts"],
                              ["q_per_um", "lambda_nm", "counts"]):
                raise ValueError(f"{path}:{lineno}: unsupported header {stripped!r}")
            continue
        parts = stripped.split(",")
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 columns")
        rows.append(tuple(float(p) for p in parts))
    if header is None or not rows:
        raise ValueError(f"{path}: no data rows")
    first, lam, counts = (np.array(col) for col in zip(*rows))
    if header[0] == "x_mm":
        if instrument is None:
            raise ValueError("position records need an instrument (f2) to map x to q")
        omega = 2.0 * np.pi * C_LIGHT / (lam * 1e-9)
        q = fiber_position_to_q(first * 1e-3, omega, instrument.f2)
    else:
        q = first * 1e6
    return MeasuredSpectrum(q=q, wavelength_nm=lam, counts=counts, instrument=instrument)


def sweep(param: str, values, base: Scenario, *, workers: int = 1) -> list[SweepEntry]:
    """One tuning curve per value of a single swept parameter.

    Per-element failures are recorded on the entry and the sweep continues.
    """
    if param not in SWEEPABLE:
        raise ValueError(f"unknown sweep parameter {param!r}; expected one of {SWEEPABLE}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one value")
    entries = []
    for value in values:
        try:
            scenario = _with_param(base, param, float(value))
            curve = tuning_curve(
                scenario.grid, scenario.pump, scenario.crystal,
                scenario.temperature_c, scenario.quad, workers=workers,
            )
            entries.append(SweepEntry(value=float(value), curve=curve))
        except Exception as err:  # noqa: BLE001 - per-element error contract
            entries.append(SweepEntry(value=float(value), curve=None, error=err))
    return entries


def _with_param(base: Scenario, param: str, value: float) -> Scenario:
    if param == "G0":
        return replace(base, crystal=replace(base.crystal, poling_m=value))
    if param == "L0":
        return replace(base, crystal=replace(base.crystal, length_m=value))
    if param == "w0":
        return replace(base, pump=replace(base.pump, waist=value))
    return replace(base, temperature_c=value)


def _golden_minimize(f, lo: float, hi: float, tol: float):
    """Golden-section search; returns (x_best, f_best, iterations, all_f)."""
    span = hi - lo
    steps = max(1, int(math.ceil(math.log(tol / span) / math.log(_INV_PHI))))
    c = lo + _INV_PHI_SQ * span
    d = lo + _INV_PHI * span
    fc, fd = f(c), f(d)
    seen = [fc, fd]
    for _ in range(steps - 1):
        if fc < fd:
            hi, d, fd = d, c, fc
            span *= _INV_PHI
            c = lo + _INV_PHI_SQ * span
            fc = f(c)
            seen.append(fc)
        else:
            lo, c, fc = c, d, fd
            span *= _INV_PHI
            d = lo + _INV_PHI * span
            fd = f(d)
            seen.append(fd)
    x, fx = (c, fc) if fc < fd else (d, fd)
    return x, fx, steps, seen


def _target_support(target, pump: PumpSpec):
    if isinstance(target, TuningCurve):
        lam = target.wavelength_nm
        qq = target.q_axis
        pts_lam, pts_q = np.meshgrid(lam, qq, indexing="ij")
        data = target.values.ravel()
        points = np.column_stack([pts_lam.ravel(), pts_q.ravel()])
    elif isinstance(target, MeasuredSpectrum):
        points = np.column_stack([target.wavelength_nm, target.q])
        data = target.counts.astype(float)
    else:
        raise TypeError("target must be a TuningCurve or MeasuredSpectrum")
    lam_p_nm = pump.wavelength_m * 1e9
    if np.any(points[:, 0] <= 0) or np.any(points[:, 0] >= 10.0 * lam_p_nm):
        raise ValueError("target wavelengths outside the physical emission range")
    peak = data.max()
    if peak <= 0:
        raise ValueError("target carries no signal")
    return points, data / peak


def fit_poling_period(
    target,
    base: Scenario,
    bounds: tuple[float, float],
    tol: float = 1e-10,
    *,
    workers: int = 1,
) -> FitResult:
    """Golden-section fit of the reference-temperature poling period.

    Minimizes the mean squared difference between the (instrument-convolved,
    max-normalized) simulation resampled onto the target support and the
    max-normalized target. The metric ignores absolute scale on both sides.
    """
    lo, hi = float(bounds[0]), float(bounds[1])
    if not 0 < lo < hi:
        raise ValueError("bounds must be ordered and positive")
    if hi - lo > 2.001e-7:
        raise ValueError("bounds span exceeds 200 nm (single-regime assumption)")
    if tol < 0.999e-10:
        raise ValueError("tolerance below 0.1 nm is not resolvable by the fit metric")
    points, data = _target_support(target, base.pump)

    def objective(g0: float) -> float:
        scenario = _with_param(base, "G0", g0)
        curve = tuning_curve(
            scenario.grid, scenario.pump, scenario.crystal,
            scenario.temperature_c, scenario.quad, workers=workers,
        )
        if scenario.instrument is not None:
            curve = instrument_convolve(curve, scenario.instrument)
        interp = RegularGridInterpolator(
            (curve.wavelength_nm, curve.q_axis), curve.values,
            bounds_error=True,
        )
        sim = interp(points)
        peak = sim.max()
        if peak <= 0:
            return float(np.mean(data * data)) + 1.0
        sim = sim / peak
        return float(np.mean((sim - data) ** 2))

    best, fbest, iterations, seen = _golden_minimize(objective, lo, hi, tol)
    spread = max(seen) - min(seen)
    if spread <= 1e-9 * max(abs(max(seen)), 1e-300):
        raise NoDescent("objective is flat across the poling-period bounds")
    return FitResult(
        best_poling_m=float(best), residual=float(fbest),
        iterations=iterations, converged=True,
    )


def _collinear_residual(pump: PumpSpec, crystal: CrystalSpec, temp_c: float) -> float:
    dk = longitudinal_mismatch(Q_ZERO, Q_ZERO, pump.omega / 2.0, pump, temp_c, crystal)
    return dk + 2.0 * np.pi / poling_period_at(temp_c, crystal)


def temperature_poling_equivalence(
    delta_t: float,
    base: Scenario,
    *,
    fit_tol: float = 2.5e-10,
    bounds_halfwidth: float = 2e-8,
    workers: int = 1,
) -> EquivalenceResult:
    """Poling-period elongation that mimics heating the crystal by `delta_t`.

    Simulates the curve at T + delta_t, then fits the period at temperature T
    to reproduce it. Also reports the share of the result that is plain
    thermal expansion of the poling structure (alpha G0 dT).
    """
    if abs(delta_t) > 30.0:
        raise ValueError("temperature step limited to +-30 C (linear-regime fit)")
    shifted = replace(base, temperature_c=base.temperature_c + delta_t)
    target = tuning_curve(
        shifted.grid, shifted.pump, shifted.crystal,
        shifted.temperature_c, shifted.quad, workers=workers,
    )
    if base.instrument is not None:
        target = instrument_convolve(target, base.instrument)

    # Linearized guess: match the collinear degenerate residual analytically.
    g0 = base.crystal.poling_m
    dk_base = longitudinal_mismatch(
        Q_ZERO, Q_ZERO, base.pump.omega / 2.0, base.pump,
        base.temperature_c, base.crystal,
    )
    res_shifted = _collinear_residual(base.pump, base.crystal, shifted.temperature_c)
    grating = res_shifted - dk_base
    guess = 2.0 * np.pi / (grating * _expansion_factor(base.temperature_c, base.crystal))
    bounds = (guess - bounds_halfwidth, guess + bounds_halfwidth)

    fit = fit_poling_period(target, base, bounds, tol=fit_tol, workers=workers)
    return EquivalenceResult(
        delta_poling_m=fit.best_poling_m - g0,
        expansion_share_m=base.crystal.alpha * g0 * delta_t,
        fit=fit,
    )


def photon_flux(power_w: float, center_wavelength_m: float) -> float:
    """Photons per second carried by `power_w` at the given wavelength."""
    if power_w < 0:
        raise ValueError("power must be nonnegative")
    if not center_wavelength_m > 0:
        raise ValueError("wavelength must be positive")
    return power_w * center_wavelength_m / (H_PLANCK * C_LIGHT)


def mode_density(flux: float, bandwidth_wl_m: float, center_wavelength_m: float) -> float:
    """Spectral mode occupation: flux over the bandwidth expressed in hertz."""
    if not bandwidth_wl_m > 0:
        raise ValueError("bandwidth must be positive")
    if not center_wavelength_m > 0:
        raise ValueError("wavelength must be positive")
    bandwidth_hz = C_LIGHT * bandwidth_wl_m / (center_wavelength_m ** 2)
    return flux / bandwidth_hz
