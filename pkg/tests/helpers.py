"""Shared measurement helpers for curve classification and peak geometry."""

import numpy as np

from spdc_tuner import TuningCurve, marginal_spectrum


def row_index_at_omega(curve: TuningCurve, omega: float) -> int:
    return int(np.argmin(np.abs(curve.omega_axis - omega)))


def row_peak_q(curve: TuningCurve, omega: float) -> float:
    """|q| of the row maximum at the frequency closest to `omega`."""
    row = curve.values[row_index_at_omega(curve, omega)]
    return float(abs(curve.q_axis[int(np.argmax(row))]))


def global_peak(curve: TuningCurve) -> tuple[float, float]:
    """(wavelength_nm, |q|) of the brightest pixel."""
    i, j = np.unravel_index(int(np.argmax(curve.values)), curve.values.shape)
    return float(curve.wavelength_nm[i]), float(abs(curve.q_axis[j]))


def local_maxima(y: np.ndarray) -> list[int]:
    """Strict interior local maxima."""
    return [i for i in range(1, len(y) - 1) if y[i] > y[i - 1] and y[i] > y[i + 1]]


def fwhm(x: np.ndarray, y: np.ndarray, peak_index: int) -> float:
    """Interpolated full width at half maximum of the peak at `peak_index`."""
    half = y[peak_index] / 2.0
    left = peak_index
    while left > 0 and y[left] > half:
        left -= 1
    right = peak_index
    while right < len(y) - 1 and y[right] > half:
        right += 1
    if y[left] > half or y[right] > half:
        raise ValueError("peak not resolved inside the axis window")

    def cross(i0, i1):
        return x[i0] + (half - y[i0]) * (x[i1] - x[i0]) / (y[i1] - y[i0])

    return abs(cross(right - 1, right) - cross(left, left + 1))


def marginal_dip_fraction(curve: TuningCurve, omega_center: float) -> float:
    """Marginal value at `omega_center` relative to the tallest marginal lobe."""
    marg = marginal_spectrum(curve)
    return float(marg[row_index_at_omega(curve, omega_center)] / marg.max())


def classify_regime(curve: TuningCurve, omega_p: float,
                    ring_threshold: float = 0.03e6,
                    dip_threshold: float = 0.5) -> str:
    """One of 'collinear-degenerate', 'noncollinear-degenerate',
    'collinear-nondegenerate', or 'other'.

    A deep marginal dip at half the pump frequency marks the non-degenerate
    regime (the brightest pixel must still be on-axis for it to be collinear);
    otherwise the location of the row maximum at half the pump frequency
    separates collinear from ring emission.
    """
    dip = marginal_dip_fraction(curve, omega_p / 2.0)
    _, peak_q = global_peak(curve)
    if dip < dip_threshold:
        return "collinear-nondegenerate" if peak_q <= ring_threshold else "other"
    ring_q = row_peak_q(curve, omega_p / 2.0)
    if ring_q > ring_threshold:
        return "noncollinear-degenerate"
    return "collinear-degenerate"
