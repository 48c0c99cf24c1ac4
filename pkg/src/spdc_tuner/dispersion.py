"""Temperature-dependent refractive index and thermal expansion of the crystal.

The index model is a rational Sellmeier form plus a quadratic thermo-optic
correction,

    n^2(l) = A + sum_k B_k l^2 / (l^2 - C_k) - D l^2        (l in um)
    n(l, T) = n(l) + T1(1/l) (T - 25 C) + T2(1/l) (T - 25 C)^2

with T1, T2 cubic polynomials in 1/l. Coefficient sets are not hardcoded;
they are loaded from versioned fixture files (see `load_dispersion_file`).
The package ships one set for the z axis of KTP, assembled from
Kato & Takaoka, Appl. Opt. 41, 5040 (2002) and Emanueli & Arie,
Appl. Opt. 42, 6661 (2003).

Thermal expansion of the poling period and crystal length follows the
quadratic law G(T) = G0 [1 + alpha (T - 25 C) + beta (T - 25 C)^2].
"""

from __future__ import annotations

import hashlib
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.constants import c as C_LIGHT

T_REF_C = 25.0

# Thermal expansion of flux-grown KTP along x (Emanueli & Arie 2003).
KTP_ALPHA = 6.7e-6   # 1/C
KTP_BETA = 11e-9     # 1/C^2


class WavelengthOutOfRange(ValueError):
    """Wavelength outside the fitted validity window of a dispersion model."""


class TemperatureExtrapolationWarning(UserWarning):
    """Temperature outside the fitted window; the polynomial is extrapolated."""


@dataclass(frozen=True)
class DispersionModel:
    """Sellmeier + thermo-optic coefficient set for one crystal axis.

    Wavelengths inside the coefficients are in micrometres; the public
    evaluation functions take metres.
    """

    label: str
    sellmeier_A: float
    sellmeier_terms: tuple[tuple[float, float], ...]  # (B_k, C_k [um^2])
    sellmeier_D: float                                # um^-2
    thermo_linear: tuple[float, float, float, float]     # coeffs of (1/l)^0..3
    thermo_quadratic: tuple[float, float, float, float]
    lambda_min_nm: float
    lambda_max_nm: float
    temp_min_c: float
    temp_max_c: float
    content_digest: str = ""

    def __post_init__(self):
        if not self.sellmeier_terms:
            raise ValueError("dispersion model needs at least one resonance term")
        if not (0 < self.lambda_min_nm < self.lambda_max_nm):
            raise ValueError("invalid wavelength validity range")
        if not self.temp_min_c < self.temp_max_c:
            raise ValueError("invalid temperature validity range")

    def coefficient_text(self) -> str:
        """Canonical text rendering of all coefficients (for digests)."""
        parts = [self.label, self.sellmeier_A.hex()]
        for b, cc in self.sellmeier_terms:
            parts += [b.hex(), cc.hex()]
        parts.append(self.sellmeier_D.hex())
        parts += [x.hex() for x in self.thermo_linear]
        parts += [x.hex() for x in self.thermo_quadratic]
        parts += [float(v).hex() for v in (self.lambda_min_nm, self.lambda_max_nm,
                                           self.temp_min_c, self.temp_max_c)]
        return "|".join(parts)


@dataclass(frozen=True)
class CrystalSpec:
    """Periodically poled crystal: geometry at 25 C plus expansion law."""

    length_m: float       # L0, at the 25 C reference
    poling_m: float       # G0, at the 25 C reference
    alpha: float = KTP_ALPHA
    beta: float = KTP_BETA
    t_ref_c: float = T_REF_C
    dispersion: DispersionModel = None  # type: ignore[assignment]

    def __post_init__(self):
        if not self.length_m > 0:
            raise ValueError("crystal length must be positive")
        if not self.poling_m > 0:
            raise ValueError("poling period must be positive")
        if self.t_ref_c != T_REF_C:
            raise ValueError("expansion law is referenced to 25 C")
        if self.dispersion is None:
            raise ValueError("crystal needs a dispersion model")


def builtin_dispersion_path() -> Path:
    """Path of the KTP z-axis fixture shipped with the package."""
    return Path(resources.files("spdc_tuner").joinpath("data/ktp_z.disp"))


def load_dispersion_file(path: str | Path) -> DispersionModel:
    """Parse a `key = value` dispersion fixture file.

    Keys: label, A, B1..Bn, C1..Cn, D, T1_0..T1_3, T2_0..T2_3,
    lambda_min_nm, lambda_max_nm, temp_min_c, temp_max_c. Lines starting
    with `#` are comments.
    """
    path = Path(path)
    raw = path.read_bytes()
    entries: dict[str, str] = {}
    for lineno, line in enumerate(raw.decode("utf-8").splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key in entries:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        entries[key] = value

    def take_float(key: str) -> float:
        try:
            return float(entries.pop(key))
        except KeyError:
            raise ValueError(f"{path}: missing key {key!r}") from None
        except ValueError:
            raise ValueError(f"{path}: key {key!r} is not a number") from None

    label = entries.pop("label", path.stem)
    a = take_float("A")
    d = take_float("D")
    terms = []
    k = 1
    while f"B{k}" in entries or f"C{k}" in entries:
        terms.append((take_float(f"B{k}"), take_float(f"C{k}")))
        k += 1
    t1 = tuple(take_float(f"T1_{m}") for m in range(4))
    t2 = tuple(take_float(f"T2_{m}") for m in range(4))
    lam_lo = take_float("lambda_min_nm")
    lam_hi = take_float("lambda_max_nm")
    t_lo = take_float("temp_min_c")
    t_hi = take_float("temp_max_c")
    if entries:
        raise ValueError(f"{path}: unknown keys {sorted(entries)}")
    return DispersionModel(
        label=label,
        sellmeier_A=a,
        sellmeier_terms=tuple(terms),
        sellmeier_D=d,
        thermo_linear=t1,
        thermo_quadratic=t2,
        lambda_min_nm=lam_lo,
        lambda_max_nm=lam_hi,
        temp_min_c=t_lo,
        temp_max_c=t_hi,
        content_digest=hashlib.sha256(raw).hexdigest(),
    )


def load_builtin_dispersion() -> DispersionModel:
    return load_dispersion_file(builtin_dispersion_path())


def _poly_inverse_lambda(coeffs, lam_um):
    inv = 1.0 / lam_um
    return coeffs[0] + inv * (coeffs[1] + inv * (coeffs[2] + inv * coeffs[3]))


def refractive_index(lam_m, temp_c: float, model: DispersionModel):
    """n(lambda, T). `lam_m` in metres, scalar or ndarray.

    Raises WavelengthOutOfRange outside the fitted wavelength window;
    temperatures outside the fitted window extrapolate with a warning
    (tuning sweeps commonly step slightly past it).
    """
    lam_nm = np.asarray(lam_m, dtype=float) * 1e9
    # one-ppb slack so unit round-trips cannot push boundary wavelengths out
    lo = model.lambda_min_nm * (1.0 - 1e-9)
    hi = model.lambda_max_nm * (1.0 + 1e-9)
    if np.any(lam_nm < lo) or np.any(lam_nm > hi):
        bad = lam_nm[(lam_nm < lo) | (lam_nm > hi)]
        raise WavelengthOutOfRange(
            f"{np.min(bad):.6g} nm outside [{model.lambda_min_nm:g}, "
            f"{model.lambda_max_nm:g}] nm of {model.label!r}"
        )
    if not model.temp_min_c <= temp_c <= model.temp_max_c:
        warnings.warn(
            f"temperature {temp_c:g} C outside fitted range "
            f"[{model.temp_min_c:g}, {model.temp_max_c:g}] C of {model.label!r}; "
            "extrapolating",
            TemperatureExtrapolationWarning,
            stacklevel=2,
        )
    lam_um = lam_nm * 1e-3
    l2 = lam_um * lam_um
    n2 = model.sellmeier_A - model.sellmeier_D * l2
    for b, cc in model.sellmeier_terms:
        n2 = n2 + b * l2 / (l2 - cc)
    n = np.sqrt(n2)
    dt = temp_c - T_REF_C
    if dt != 0.0:
        n = n + _poly_inverse_lambda(model.thermo_linear, lam_um) * dt \
              + _poly_inverse_lambda(model.thermo_quadratic, lam_um) * dt * dt
    return float(n) if np.isscalar(lam_m) else n


def wavevector_magnitude(omega, temp_c: float, model: DispersionModel):
    """|k| = omega n(omega, T) / c in rad/m. `omega` in rad/s, scalar or ndarray."""
    if np.any(np.asarray(omega) <= 0):
        raise ValueError("angular frequency must be positive")
    lam = 2.0 * np.pi * C_LIGHT / np.asarray(omega, dtype=float)
    n = refractive_index(lam if not np.isscalar(omega) else float(lam), temp_c, model)
    k = np.asarray(omega, dtype=float) * n / C_LIGHT
    return float(k) if np.isscalar(omega) else k


def _expansion_factor(temp_c: float, crystal: CrystalSpec) -> float:
    dt = temp_c - crystal.t_ref_c
    return 1.0 + crystal.alpha * dt + crystal.beta * dt * dt


def poling_period_at(temp_c: float, crystal: CrystalSpec) -> float:
    """G(T) = G0 [1 + alpha dT + beta dT^2]."""
    return crystal.poling_m * _expansion_factor(temp_c, crystal)


def crystal_length_at(temp_c: float, crystal: CrystalSpec) -> float:
    """L(T), same expansion law as the poling period."""
    return crystal.length_m * _expansion_factor(temp_c, crystal)
