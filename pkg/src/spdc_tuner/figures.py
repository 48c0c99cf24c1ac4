"""Matplotlib rendering of tuning curves and collimated spectra."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .spectrum import TuningCurve, marginal_spectrum  # noqa: E402


def save_curve_figure(curve: TuningCurve, path: str | Path, title: str | None = None,
                      dpi: int = 150) -> None:
    """Heatmap of the density with the collimated spectrum as a top panel."""
    q_um = curve.q_axis * 1e-6
    lam = curve.wavelength_nm
    fig = plt.figure(figsize=(6.4, 5.8))
    gs = fig.add_gridspec(2, 1, height_ratios=[1.0, 3.4], hspace=0.1)

    ax_top = fig.add_subplot(gs[0])
    ax_top.plot(lam, marginal_spectrum(curve), color="0.2", lw=1.2)
    ax_top.set_ylabel("integrated")
    ax_top.set_ylim(0, 1.08)
    ax_top.tick_params(labelbottom=False)

    ax = fig.add_subplot(gs[1], sharex=ax_top)
    im = ax.imshow(
        curve.values.T,
        origin="lower",
        aspect="auto",
        extent=(lam[0], lam[-1], q_um[0], q_um[-1]),
        cmap="inferno",
        vmin=0.0,
        vmax=1.0,
        interpolation="nearest",
    )
    ax.set_xlabel("signal wavelength (nm)")
    ax.set_ylabel(r"$q_{s,x}$ (rad/$\mu$m)")
    cbar = fig.colorbar(im, ax=(ax_top, ax), pad=0.02)
    cbar.set_label("relative spectral density")
    if title:
        ax_top.set_title(title)
    fig.savefig(path, dpi=dpi)
    plt.close(fig)


def save_marginal_figure(wavelength_nm, marginal, path: str | Path,
                         title: str | None = None, dpi: int = 150) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.plot(wavelength_nm, marginal, color="0.2", lw=1.4)
    ax.set_xlabel("signal wavelength (nm)")
    ax.set_ylabel("relative spectral density")
    ax.set_ylim(0, 1.08)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=dpi)
    plt.close(fig)
