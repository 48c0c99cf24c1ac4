"""Bit-exact output writers: delimited grids, binary graymaps, key-value reports.

Every writer formats numbers deterministically, so identical configurations
produce byte-identical files regardless of worker count or run order.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .spectrum import TuningCurve

PGM_MAXVAL = 65535


def write_curve_csv(curve: TuningCurve, path: str | Path,
                    metadata: list[tuple[str, str]] = ()) -> None:
    """Grid rows as `q_per_um,lambda_nm,density`, frequency-outer ordering,
    densities at 9 significant digits, `# key=value` metadata up front."""
    q_um = curve.q_axis * 1e-6
    lines = [f"# {key}={value}" for key, value in metadata]
    lines.append("q_per_um,lambda_nm,density")
    for i, lam in enumerate(curve.wavelength_nm):
        row = curve.values[i]
        lam_txt = f"{lam:.9g}"
        for j, q in enumerate(q_um):
            lines.append(f"{q:.9g},{lam_txt},{row[j]:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_marginal_csv(wavelength_nm: np.ndarray, marginal: np.ndarray,
                       path: str | Path, metadata: list[tuple[str, str]] = ()) -> None:
    lines = [f"# {key}={value}" for key, value in metadata]
    lines.append("lambda_nm,density")
    for lam, val in zip(wavelength_nm, marginal):
        lines.append(f"{lam:.9g},{val:.9g}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_pgm(curve: TuningCurve, path: str | Path) -> None:
    """Binary portable graymap: P5, 16-bit, rows from largest wavelength down."""
    flipped = curve.values[::-1]
    pixels = np.floor(flipped * PGM_MAXVAL + 0.5).astype(">u2")
    height, width = pixels.shape
    header = f"P5\n{width} {height}\n{PGM_MAXVAL}\n".encode("ascii")
    Path(path).write_bytes(header + pixels.tobytes())


def write_keyvals(path: str | Path, items: list[tuple[str, str]]) -> None:
    Path(path).write_text("".join(f"{k} = {v}\n" for k, v in items))
