"""Spectral density over (q_s, omega_s): quadrature engine and grid products.

The density at one point is a 2D integral of the amplitude kernel over the
idler transverse momentum. The pump Gaussian confines the integrand to a box
centered at q_i = -q_s, whose half width is `halfwidth_factor / w0` per axis;
tensor Gauss-Legendre quadrature on that box is refined by doubling the nodes
per axis until successive estimates agree.

Grid fill is embarrassingly parallel over pixels and byte-deterministic for a
fixed configuration regardless of worker count: every pixel is an independent
pure computation placed by index, and the refinement floor is derived from a
deterministic base-resolution pass rather than a fill-order-dependent running
maximum.
"""

from __future__ import annotations

import hashlib
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.constants import c as C_LIGHT
from scipy.ndimage import convolve1d

from .dispersion import CrystalSpec
from .phasematch import (
    PumpSpec,
    TransverseMomentum,
    _amplitude_sq_rows,
    _row_kernel,
    _transverse_aux,
)

_trapz = getattr(np, "trapezoid", np.trapz)


class QuadratureNoConverge(RuntimeWarning):
    """Node cap reached with the refinement tolerance unmet (value still returned)."""


class AllZeroGrid(RuntimeError):
    """No pixel of the requested grid carries any density."""


class KernelUnderresolved(ValueError):
    """Instrument kernel narrower than three grid steps; the grid cannot resolve it."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Integration-domain and refinement policy for the idler-momentum integral."""

    points_per_axis: int = 64
    halfwidth_factor: float = 5.0
    refine_tol: float = 1e-3
    max_points: int = 512

    def __post_init__(self):
        if self.points_per_axis < 8:
            raise ValueError("points_per_axis must be at least 8")
        if self.halfwidth_factor < 3:
            raise ValueError("halfwidth_factor must be at least 3")
        if not 0 < self.refine_tol < 1:
            raise ValueError("refine_tol must lie in (0, 1)")
        if self.max_points < self.points_per_axis:
            raise ValueError("max_points must be >= points_per_axis")


@dataclass(frozen=True)
class GridSpec:
    """Display grid: wavelength span (nm) by signed transverse momentum (rad/um)."""

    lambda_min_nm: float = 1000.0
    lambda_max_nm: float = 1140.0
    q_min_per_um: float = -0.25
    q_max_per_um: float = 0.25
    lambda_points: int = 256
    q_points: int = 256

    def __post_init__(self):
        if not 0 < self.lambda_min_nm < self.lambda_max_nm:
            raise ValueError("wavelength range must be ordered and positive")
        if not self.q_min_per_um < self.q_max_per_um:
            raise ValueError("momentum range must be ordered")
        if self.lambda_points < 2 or self.q_points < 2:
            raise ValueError("grid needs at least 2 points per axis")


@dataclass(frozen=True)
class InstrumentSpec:
    """Collection-side resolution: fiber core, imaging lens, OSA bandwidth."""

    fiber_core_diameter: float  # m
    f2: float                   # m
    osa_fwhm: float             # m, wavelength FWHM

    def __post_init__(self):
        if not (self.fiber_core_diameter > 0 and self.f2 > 0 and self.osa_fwhm > 0):
            raise ValueError("instrument dimensions must be positive")


@dataclass(frozen=True, eq=False)
class TuningCurve:
    """Relative spectral density on a (wavelength x momentum) grid, max = 1."""

    q_axis: np.ndarray         # rad/m, signed
    omega_axis: np.ndarray     # rad/s, aligned with wavelength_nm
    wavelength_nm: np.ndarray
    values: np.ndarray         # shape (len(wavelength_nm), len(q_axis)), in [0, 1]
    peak_density: float        # pre-normalization maximum, relative units
    params_digest: str


@dataclass(frozen=True)
class Scenario:
    """One fully specified simulation: source, crystal, temperature, grids."""

    pump: PumpSpec
    crystal: CrystalSpec
    temperature_c: float = 25.0
    grid: GridSpec = GridSpec()
    quad: QuadratureSpec = QuadratureSpec()
    instrument: InstrumentSpec | None = None


@lru_cache(maxsize=32)
def _gauss_nodes(n: int):
    x, w = leggauss(n)
    return x, w


def _integrate_level(kernel, rows, qsx, qsy, qs_sq, pump, half, n):
    """One Gauss-Legendre tensor level for a block of frequency rows."""
    x, w = _gauss_nodes(n)
    qix = -qsx + half * x
    qiy = -qsy + half * x
    aux = _transverse_aux(qix[:, None], qiy[None, :], qsx, qsy, pump, kernel.k_p)
    wts = np.outer(half * w, half * w)
    out = np.empty(len(rows))
    chunk = max(1, 3_000_000 // (n * n))
    for s in range(0, len(rows), chunk):
        block = _amplitude_sq_rows(kernel, rows[s:s + chunk], aux, qs_sq)
        out[s:s + chunk] = np.sum(block * wts[None, :, :], axis=(1, 2))
    return out


def _density_rows(qsx, qsy, omega_arr, pump, crystal, temp_c, quad,
                  floor=0.0, base_values=None):
    """Refined densities for all frequency rows at one signal momentum.

    Returns (values, converged). When `base_values` (a completed level at
    `quad.points_per_axis` nodes) is given, refinement starts from there.
    """
    kernel = _row_kernel(omega_arr, pump, temp_c, crystal)
    half = quad.halfwidth_factor / pump.waist
    qs_sq = qsx * qsx + qsy * qsy
    m = len(np.atleast_1d(omega_arr))
    all_rows = np.arange(m)

    n = quad.points_per_axis
    if base_values is None:
        values = _integrate_level(kernel, all_rows, qsx, qsy, qs_sq, pump, half, n)
    else:
        values = np.array(base_values, dtype=float)
    converged = np.zeros(m, dtype=bool)
    while n * 2 <= quad.max_points:
        n *= 2
        todo = all_rows[~converged]
        new = _integrate_level(kernel, todo, qsx, qsy, qs_sq, pump, half, n)
        old = values[todo]
        ok = (np.abs(new - old) <= quad.refine_tol * np.abs(new)) | (np.abs(new) < floor)
        values[todo] = new
        converged[todo] = ok
        if converged.all():
            break
    return values, converged


def spectral_density_at(
    q_s: TransverseMomentum,
    omega_s: float,
    pump: PumpSpec,
    crystal: CrystalSpec,
    temp_c: float,
    quad: QuadratureSpec = QuadratureSpec(),
    *,
    negligible_below: float = 0.0,
) -> float:
    """Relative density at one point, refined Gauss-Legendre quadrature."""
    values, converged = _density_rows(
        q_s.qx, q_s.qy, np.array([float(omega_s)]), pump, crystal, temp_c, quad,
        floor=negligible_below,
    )
    if not converged.all():
        warnings.warn(
            f"quadrature cap {quad.max_points} reached before tolerance "
            f"{quad.refine_tol:g}", QuadratureNoConverge, stacklevel=2,
        )
    return float(values[0])


def spectral_density(
    q_s_mag: float,
    omega_s: float,
    pump: PumpSpec,
    crystal: CrystalSpec,
    temp_c: float,
    quad: QuadratureSpec = QuadratureSpec(),
    *,
    negligible_below: float = 0.0,
) -> float:
    """Density at momentum magnitude |q_s| (the density is isotropic in q_s)."""
    return spectral_density_at(
        TransverseMomentum(float(q_s_mag), 0.0), omega_s, pump, crystal, temp_c,
        quad, negligible_below=negligible_below,
    )


def spectral_density_riemann(
    q_s_mag: float,
    omega_s: float,
    pump: PumpSpec,
    crystal: CrystalSpec,
    temp_c: float,
    quad: QuadratureSpec = QuadratureSpec(),
    *,
    resolution_factor: int = 4,
    box_factor: float = 1.5,
) -> float:
    """Brute-force midpoint Riemann sum of the same kernel.

    Independent of the Gauss-Legendre engine: dense uniform midpoints on a
    `box_factor` larger box at `resolution_factor` times the base node count.
    Serves as the verification oracle for `spectral_density`.
    """
    kernel = _row_kernel(float(omega_s), pump, temp_c, crystal)
    half = box_factor * quad.halfwidth_factor / pump.waist
    n = resolution_factor * quad.points_per_axis
    step = 2.0 * half / n
    mids = -half + step * (np.arange(n) + 0.5)
    qsx, qsy = float(q_s_mag), 0.0
    total = 0.0
    chunk = max(1, 3_000_000 // n)
    for s in range(0, n, chunk):
        aux = _transverse_aux(
            -qsx + mids[s:s + chunk, None], -qsy + mids[None, :],
            qsx, qsy, pump, kernel.k_p,
        )
        block = _amplitude_sq_rows(kernel, np.array([0]), aux, qsx * qsx + qsy * qsy)
        total += float(np.sum(block[0]))
    return total * step * step


def _symmetric_axis(raw: np.ndarray) -> np.ndarray:
    # forces axis[i] == -axis[n-1-i] bit-exactly
    return 0.5 * (raw - raw[::-1])


def _params_digest(pump, crystal, temp_c, grid, quad) -> str:
    parts = [
        pump.omega.hex(), pump.waist.hex(),
        "p" if pump.power is None else float(pump.power).hex(),
        crystal.length_m.hex(), crystal.poling_m.hex(),
        float(crystal.alpha).hex(), float(crystal.beta).hex(),
        crystal.dispersion.coefficient_text(),
        float(temp_c).hex(),
        *(float(v).hex() for v in (grid.lambda_min_nm, grid.lambda_max_nm,
                                   grid.q_min_per_um, grid.q_max_per_um)),
        str(grid.lambda_points), str(grid.q_points),
        str(quad.points_per_axis), float(quad.halfwidth_factor).hex(),
        float(quad.refine_tol).hex(), str(quad.max_points),
    ]
    return hashlib.sha256("|".join(parts).encode()).hexdigest()


def tuning_curve(
    grid: GridSpec,
    pump: PumpSpec,
    crystal: CrystalSpec,
    temp_c: float,
    quad: QuadratureSpec = QuadratureSpec(),
    *,
    workers: int = 1,
) -> TuningCurve:
    """Fill the display grid with relative densities, normalized to max 1.

    The momentum axis is symmetrized when the requested range is symmetric
    about zero; only nonnegative columns are computed and mirrored, so
    values(-q) == values(q) holds exactly.
    """
    lam_p_nm = pump.wavelength_m * 1e9
    if grid.lambda_min_nm <= lam_p_nm:
        raise ValueError("grid wavelengths must lie below the pump frequency")

    wavelength_nm = np.linspace(grid.lambda_min_nm, grid.lambda_max_nm, grid.lambda_points)
    omega_axis = 2.0 * np.pi * C_LIGHT / (wavelength_nm * 1e-9)
    raw_q = np.linspace(grid.q_min_per_um * 1e6, grid.q_max_per_um * 1e6, grid.q_points)
    symmetric = grid.q_min_per_um == -grid.q_max_per_um
    q_axis = _symmetric_axis(raw_q) if symmetric else raw_q

    nq = grid.q_points
    cols = [j for j in range(nq) if not symmetric or q_axis[j] >= 0.0]

    def base_column(j):
        return _integrate_level(
            _row_kernel(omega_axis, pump, temp_c, crystal),
            np.arange(grid.lambda_points), q_axis[j], 0.0, q_axis[j] ** 2,
            pump, quad.halfwidth_factor / pump.waist, quad.points_per_axis,
        )

    def refine_column(j, base, floor):
        return _density_rows(
            q_axis[j], 0.0, omega_axis, pump, crystal, temp_c, quad,
            floor=floor, base_values=base,
        )

    def run(fn, args_list):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(lambda a: fn(*a), args_list))
        return [fn(*a) for a in args_list]

    base_cols = run(base_column, [(j,) for j in cols])
    floor = 1e-9 * max(float(b.max()) for b in base_cols)

    refined = run(refine_column, [(j, b, floor) for j, b in zip(cols, base_cols)])

    values = np.zeros((grid.lambda_points, nq))
    unconverged = 0
    for j, (vals, conv) in zip(cols, refined):
        values[:, j] = vals
        unconverged += int((~conv).sum())
        if symmetric and q_axis[j] > 0.0:
            values[:, nq - 1 - j] = vals
    if unconverged:
        warnings.warn(
            f"{unconverged} pixel(s) hit the {quad.max_points}-node cap before "
            f"tolerance {quad.refine_tol:g}", QuadratureNoConverge, stacklevel=2,
        )

    peak = float(values.max())
    if peak <= 0.0:
        raise AllZeroGrid("no density anywhere on the requested grid")
    return TuningCurve(
        q_axis=q_axis,
        omega_axis=omega_axis,
        wavelength_nm=wavelength_nm,
        values=values / peak,
        peak_density=peak,
        params_digest=_params_digest(pump, crystal, temp_c, grid, quad),
    )


def marginal_spectrum(curve: TuningCurve) -> np.ndarray:
    """Collimated spectrum: each frequency row integrated over q, max 1."""
    if curve.values.size == 0:
        raise ValueError("empty curve")
    marg = _trapz(curve.values, curve.q_axis, axis=1)
    peak = float(marg.max())
    if peak <= 0.0:
        raise AllZeroGrid("marginal vanished everywhere")
    return marg / peak


def fiber_position_to_q(x: float, omega_s: float, f2: float) -> float:
    """Map a fiber offset in the 2f imaging plane to transverse momentum."""
    if not f2 > 0:
        raise ValueError("focal length must be positive")
    return omega_s * x / (f2 * C_LIGHT)


def _edge_normalized_convolve(arr: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    smoothed = convolve1d(arr, kernel, axis=axis, mode="constant", cval=0.0)
    correction = convolve1d(np.ones(arr.shape[axis]), kernel, mode="constant", cval=0.0)
    shape = [1, 1]
    shape[axis] = arr.shape[axis]
    return smoothed / correction.reshape(shape)


def _tophat_kernel(width: float, step: float) -> np.ndarray:
    # fractional-coverage taps of a hard aperture of the given width
    h = width / 2.0
    k = int(np.ceil(h / step + 0.5))
    centers = step * np.arange(-k, k + 1)
    lo = np.maximum(centers - step / 2.0, -h)
    hi = np.minimum(centers + step / 2.0, h)
    taps = np.maximum(hi - lo, 0.0)
    return taps / taps.sum()


def instrument_convolve(curve: TuningCurve, inst: InstrumentSpec) -> TuningCurve:
    """Separable instrument smoothing: OSA Gaussian along wavelength, fiber-core
    top-hat along momentum (aperture width scales with 1/wavelength per row)."""
    d_lam = float(curve.wavelength_nm[1] - curve.wavelength_nm[0])
    d_q = float(abs(curve.q_axis[1] - curve.q_axis[0]))
    fwhm_nm = inst.osa_fwhm * 1e9

    values = curve.values
    lam_span = fwhm_nm / d_lam
    if lam_span >= 0.5:
        if lam_span < 3.0:
            raise KernelUnderresolved(
                f"OSA kernel spans {lam_span:.2f} wavelength steps (< 3)")
        sigma = fwhm_nm / (2.0 * np.sqrt(2.0 * np.log(2.0)))
        k = int(np.ceil(4.0 * sigma / d_lam))
        taps = np.exp(-0.5 * (d_lam * np.arange(-k, k + 1) / sigma) ** 2)
        values = _edge_normalized_convolve(values, taps / taps.sum(), axis=0)

    widths = (2.0 * np.pi / (curve.wavelength_nm * 1e-9)) * (
        inst.fiber_core_diameter / inst.f2)
    q_span_min = float(widths.min() / d_q)
    if q_span_min >= 0.5:
        if q_span_min < 3.0:
            raise KernelUnderresolved(
                f"fiber kernel spans {q_span_min:.2f} momentum steps (< 3)")
        out = np.empty_like(values)
        for i in range(values.shape[0]):
            taps = _tophat_kernel(widths[i], d_q)
            out[i] = _edge_normalized_convolve(values[i:i + 1], taps, axis=1)[0]
        values = out

    peak = float(values.max())
    if peak <= 0.0:
        raise AllZeroGrid("smoothed grid vanished")
    digest = hashlib.sha256(
        (curve.params_digest + "|inst|" + float(inst.fiber_core_diameter).hex()
         + float(inst.f2).hex() + float(inst.osa_fwhm).hex()).encode()
    ).hexdigest()
    return TuningCurve(
        q_axis=curve.q_axis,
        omega_axis=curve.omega_axis,
        wavelength_nm=curve.wavelength_nm,
        values=values / peak,
        peak_density=curve.peak_density * peak,
        params_digest=digest,
    )
