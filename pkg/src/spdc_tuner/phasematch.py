"""Longitudinal phase mismatch, QPM residual, and the SPDC amplitude kernel.

All spectral densities produced from this kernel are relative: the global
constants of the down-conversion amplitude (vacuum permittivity, nonlinear
susceptibility, numeric prefactors) are dropped, while the frequency
dependent weight `omega_i omega_s / (n_i n_s)^2` is kept so that the
asymmetry of the spectrum about half the pump frequency survives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.constants import c as C_LIGHT

from .dispersion import (
    CrystalSpec,
    crystal_length_at,
    poling_period_at,
    refractive_index,
    wavevector_magnitude,
    _expansion_factor,
)


class BeyondCone(ValueError):
    """Transverse momentum exceeds the medium wave-vector magnitude."""


class Evanescent:
    """Distinguished non-propagating outcome of the mismatch (a value, not an error)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "EVANESCENT"


EVANESCENT = Evanescent()


@dataclass(frozen=True)
class PumpSpec:
    """Undepleted monochromatic Gaussian pump propagating along the z axis."""

    omega: float          # rad/s
    waist: float          # m (1/e^2 intensity radius w0)
    power: float | None = None  # W, only used by flux utilities

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("pump frequency must be positive")
        if not self.waist > 0:
            raise ValueError("pump waist must be positive")
        if self.power is not None and self.power < 0:
            raise ValueError("pump power must be nonnegative")

    @classmethod
    def from_wavelength(cls, lam_m: float, waist: float, power: float | None = None):
        return cls(omega=2.0 * np.pi * C_LIGHT / lam_m, waist=waist, power=power)

    @property
    def wavelength_m(self) -> float:
        return 2.0 * np.pi * C_LIGHT / self.omega


@dataclass(frozen=True)
class TransverseMomentum:
    """Transverse part (qx, qy) of a wave vector, in rad/m."""

    qx: float
    qy: float

    def __post_init__(self):
        if not (np.isfinite(self.qx) and np.isfinite(self.qy)):
            raise ValueError("momentum components must be finite")

    def __add__(self, other: "TransverseMomentum") -> "TransverseMomentum":
        return TransverseMomentum(self.qx + other.qx, self.qy + other.qy)

    def mag_sq(self) -> float:
        return self.qx * self.qx + self.qy * self.qy

    def magnitude(self) -> float:
        return float(np.hypot(self.qx, self.qy))


Q_ZERO = TransverseMomentum(0.0, 0.0)


def sinc(x):
    """sin(x)/x with a series guard below |x| = 1e-6 (sinc(0) = 1 exactly)."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)
    return float(out) if out.ndim == 0 else out


def _check_signal_frequency(omega_s, pump: PumpSpec):
    if np.any(np.asarray(omega_s) <= 0) or np.any(np.asarray(omega_s) >= pump.omega):
        raise ValueError("signal frequency must lie strictly inside (0, omega_pump)")


def longitudinal_mismatch(
    q_i: TransverseMomentum,
    q_s: TransverseMomentum,
    omega_s: float,
    pump: PumpSpec,
    temp_c: float,
    crystal: CrystalSpec,
):
    """dk_z of the three longitudinal wave-vector components, rad/m.

    Returns EVANESCENT when any transverse momentum exceeds the corresponding
    medium wave vector (no propagating far-field mode).
    """
    _check_signal_frequency(omega_s, pump)
    omega_i = pump.omega - omega_s
    model = crystal.dispersion
    k_i = wavevector_magnitude(omega_i, temp_c, model)
    k_s = wavevector_magnitude(omega_s, temp_c, model)
    k_p = wavevector_magnitude(pump.omega, temp_c, model)
    q_p = q_i + q_s
    rad_i = k_i * k_i - q_i.mag_sq()
    rad_s = k_s * k_s - q_s.mag_sq()
    rad_p = k_p * k_p - q_p.mag_sq()
    if rad_i < 0 or rad_s < 0 or rad_p < 0:
        return EVANESCENT
    return float(np.sqrt(rad_i) + np.sqrt(rad_s) - np.sqrt(rad_p))


def qpm_residual(delta_kz: float, temp_c: float, crystal: CrystalSpec) -> float:
    """dk_z + 2 pi / G(T): what the poling grating fails to cancel."""
    if not np.isfinite(delta_kz):
        raise ValueError("mismatch must be finite")
    return delta_kz + 2.0 * np.pi / poling_period_at(temp_c, crystal)


def pump_amplitude(q_sum: TransverseMomentum, pump: PumpSpec) -> float:
    """Gaussian angular spectrum exp(-w0^2 |q|^2 / 4), peak normalized to 1."""
    return float(np.exp(-pump.waist * pump.waist * q_sum.mag_sq() / 4.0))


def emission_angle(q_mag: float, omega_s: float, temp_c: float, crystal: CrystalSpec) -> float:
    """Internal emission angle arcsin(|q_s| / |k_s|) in the crystal."""
    if q_mag < 0:
        raise ValueError("momentum magnitude must be nonnegative")
    k_s = wavevector_magnitude(omega_s, temp_c, crystal.dispersion)
    if q_mag > k_s:
        raise BeyondCone(f"|q| = {q_mag:.6g} rad/m exceeds |k_s| = {k_s:.6g} rad/m")
    return float(np.arcsin(q_mag / k_s))


def degenerate_poling_period(pump: PumpSpec, crystal: CrystalSpec, temp_c: float) -> float:
    """Reference-temperature poling period whose grating cancels the collinear
    degenerate mismatch at `temp_c` (the calibration point of a tuning curve)."""
    dk = longitudinal_mismatch(Q_ZERO, Q_ZERO, pump.omega / 2.0, pump, temp_c, crystal)
    if dk is EVANESCENT or dk >= 0:
        raise ValueError("no first-order QPM solution: collinear mismatch is not negative")
    return float(-2.0 * np.pi / dk / _expansion_factor(temp_c, crystal))


# ---------------------------------------------------------------------------
# Vectorized kernel, shared by the quadrature engine and the Riemann oracle.
# The scalar amplitude_sq below goes through the same code path.

@dataclass(frozen=True)
class _RowKernel:
    """Per-frequency scalars of the kernel, arrays over signal-frequency rows."""

    k_i: np.ndarray       # rad/m
    k_s: np.ndarray
    weight: np.ndarray    # omega_i omega_s / (n_i n_s)^2
    k_p: float
    two_pi_over_g: float  # 2 pi / G(T)
    half_length: float    # L(T) / 2


def _row_kernel(omega_s, pump: PumpSpec, temp_c: float, crystal: CrystalSpec) -> _RowKernel:
    _check_signal_frequency(omega_s, pump)
    omega_s = np.atleast_1d(np.asarray(omega_s, dtype=float))
    omega_i = pump.omega - omega_s
    model = crystal.dispersion
    lam_s = 2.0 * np.pi * C_LIGHT / omega_s
    lam_i = 2.0 * np.pi * C_LIGHT / omega_i
    n_s = refractive_index(lam_s, temp_c, model)
    n_i = refractive_index(lam_i, temp_c, model)
    return _RowKernel(
        k_i=omega_i * n_i / C_LIGHT,
        k_s=omega_s * n_s / C_LIGHT,
        weight=omega_i * omega_s / (n_i * n_s) ** 2,
        k_p=wavevector_magnitude(pump.omega, temp_c, model),
        two_pi_over_g=2.0 * np.pi / poling_period_at(temp_c, crystal),
        half_length=0.5 * crystal_length_at(temp_c, crystal),
    )


@dataclass(frozen=True)
class _TransverseAux:
    """Row-independent node quantities: pump intensity and pump k_z."""

    pump2: np.ndarray     # |E_p|^2 on the idler-momentum nodes
    kpz: np.ndarray
    prop_p: np.ndarray    # bool, pump wave propagating
    qi_sq: np.ndarray


def _transverse_aux(qix, qiy, qsx: float, qsy: float, pump: PumpSpec, k_p: float) -> _TransverseAux:
    """`qix`, `qiy` are broadcastable node arrays of the idler momentum."""
    qix = np.asarray(qix, dtype=float)
    qiy = np.asarray(qiy, dtype=float)
    sum_x = qix + qsx
    sum_y = qiy + qsy
    qp_sq = sum_x * sum_x + sum_y * sum_y
    rad_p = k_p * k_p - qp_sq
    prop_p = rad_p >= 0
    w0 = pump.waist
    return _TransverseAux(
        pump2=np.exp(-0.5 * w0 * w0 * qp_sq),
        kpz=np.sqrt(np.where(prop_p, rad_p, 0.0)),
        prop_p=prop_p,
        qi_sq=qix * qix + qiy * qiy,
    )


def _amplitude_sq_rows(kernel: _RowKernel, rows: np.ndarray, aux: _TransverseAux,
                       qs_sq: float) -> np.ndarray:
    """|Lambda|^2 for a block of frequency rows; shape (len(rows),) + node shape."""
    k_i = kernel.k_i[rows][:, None, None]
    rad_i = k_i * k_i - aux.qi_sq[None, :, :]
    rad_s = kernel.k_s[rows] ** 2 - qs_sq
    prop = (rad_i >= 0) & aux.prop_p[None, :, :]
    dkz = (np.sqrt(np.where(prop, rad_i, 0.0))
           + np.sqrt(np.maximum(rad_s, 0.0))[:, None, None]
           - aux.kpz[None, :, :])
    arg = (dkz + kernel.two_pi_over_g) * kernel.half_length
    env = sinc(arg)
    out = aux.pump2[None, :, :] * env * env
    out = np.where(prop, out, 0.0)
    out *= kernel.weight[rows][:, None, None]
    out[rad_s < 0] = 0.0
    return out


def amplitude_sq(
    q_i: TransverseMomentum,
    q_s: TransverseMomentum,
    omega_s: float,
    pump: PumpSpec,
    temp_c: float,
    crystal: CrystalSpec,
) -> float:
    """|Lambda|^2 up to a global constant: weight * pump intensity * sinc^2.

    Exactly zero on evanescent points.
    """
    kernel = _row_kernel(omega_s, pump, temp_c, crystal)
    aux = _transverse_aux(
        np.array([[q_i.qx]]), np.array([[q_i.qy]]), q_s.qx, q_s.qy, pump, kernel.k_p
    )
    value = _amplitude_sq_rows(kernel, np.array([0]), aux, q_s.mag_sq())
    return float(value[0, 0, 0])
