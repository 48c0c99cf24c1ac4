"""Run configuration: strict line-oriented `section.key = value` files.

Unknown keys are errors (they are almost always typos), required keys are the
pump and crystal geometry, and everything else carries documented defaults
that get echoed into run metadata.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .dispersion import (
    KTP_ALPHA,
    KTP_BETA,
    builtin_dispersion_path,
    load_dispersion_file,
    CrystalSpec,
)
from .phasematch import PumpSpec
from .spectrum import GridSpec, InstrumentSpec, QuadratureSpec, Scenario

BUILTIN_DISPERSION = "builtin:ktp_z"
_FORMATS = ("csv", "pgm", "png")


class ParseError(ValueError):
    """Malformed config line (reported with its line number)."""


class ValidationError(ValueError):
    """Config key missing, unknown, or carrying an invalid value."""


_REQUIRED = object()

# key -> (python type, default)
_SCHEMA: dict[str, tuple[type, object]] = {
    "pump.wavelength_nm": (float, _REQUIRED),
    "pump.waist_um": (float, _REQUIRED),
    "pump.power_w": (float, None),
    "crystal.length_mm": (float, _REQUIRED),
    "crystal.poling_um": (float, _REQUIRED),
    "crystal.temperature_c": (float, 25.0),
    "crystal.alpha": (float, KTP_ALPHA),
    "crystal.beta": (float, KTP_BETA),
    "crystal.dispersion_file": (str, BUILTIN_DISPERSION),
    "grid.lambda_min_nm": (float, 1000.0),
    "grid.lambda_max_nm": (float, 1140.0),
    "grid.q_min_per_um": (float, -0.25),
    "grid.q_max_per_um": (float, 0.25),
    "grid.lambda_points": (int, 256),
    "grid.q_points": (int, 256),
    "quad.points": (int, 64),
    "quad.halfwidth_factor": (float, 5.0),
    "quad.tolerance": (float, 1e-3),
    "quad.max_points": (int, 512),
    "instrument.core_um": (float, None),
    "instrument.f2_mm": (float, None),
    "instrument.osa_fwhm_nm": (float, None),
    "output.directory": (str, "out"),
    "output.formats": (str, "csv,pgm,png"),
}

_INSTRUMENT_KEYS = ("instrument.core_um", "instrument.f2_mm", "instrument.osa_fwhm_nm")


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration with every default filled in."""

    entries: dict[str, object]
    source_dir: Path

    def __getitem__(self, key: str):
        return self.entries[key]

    def effective_items(self) -> list[tuple[str, str]]:
        """Every config field as (key, text), for run-metadata echoes."""
        out = []
        for key in _SCHEMA:
            value = self.entries[key]
            if value is None:
                text = "none"
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            out.append((key, text))
        return out

    def formats(self) -> tuple[str, ...]:
        return tuple(token.strip() for token in str(self.entries["output.formats"]).split(","))

    def dispersion_path(self) -> Path:
        name = str(self.entries["crystal.dispersion_file"])
        if name == BUILTIN_DISPERSION:
            return builtin_dispersion_path()
        path = Path(name)
        return path if path.is_absolute() else self.source_dir / path

    def scenario(self) -> Scenario:
        """Construct the domain objects; their invariants validate the values."""
        e = self.entries
        model = load_dispersion_file(self.dispersion_path())
        pump = PumpSpec.from_wavelength(
            e["pump.wavelength_nm"] * 1e-9, e["pump.waist_um"] * 1e-6,
            e["pump.power_w"],
        )
        crystal = CrystalSpec(
            length_m=e["crystal.length_mm"] * 1e-3,
            poling_m=e["crystal.poling_um"] * 1e-6,
            alpha=e["crystal.alpha"],
            beta=e["crystal.beta"],
            dispersion=model,
        )
        grid = GridSpec(
            lambda_min_nm=e["grid.lambda_min_nm"],
            lambda_max_nm=e["grid.lambda_max_nm"],
            q_min_per_um=e["grid.q_min_per_um"],
            q_max_per_um=e["grid.q_max_per_um"],
            lambda_points=e["grid.lambda_points"],
            q_points=e["grid.q_points"],
        )
        quad = QuadratureSpec(
            points_per_axis=e["quad.points"],
            halfwidth_factor=e["quad.halfwidth_factor"],
            refine_tol=e["quad.tolerance"],
            max_points=e["quad.max_points"],
        )
        instrument = None
        if e["instrument.core_um"] is not None:
            instrument = InstrumentSpec(
                fiber_core_diameter=e["instrument.core_um"] * 1e-6,
                f2=e["instrument.f2_mm"] * 1e-3,
                osa_fwhm=e["instrument.osa_fwhm_nm"] * 1e-9,
            )
        return Scenario(
            pump=pump, crystal=crystal, temperature_c=e["crystal.temperature_c"],
            grid=grid, quad=quad, instrument=instrument,
        )


def load_config(path: str | Path) -> RunConfig:
    """Parse and fully validate a config file; defaults are filled in."""
    path = Path(path)
    seen: dict[str, object] = {}
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ParseError(f"{path}:{lineno}: expected 'section.key = value'")
        key, text = (part.strip() for part in stripped.split("=", 1))
        if key not in _SCHEMA:
            raise ValidationError(f"{path}:{lineno}: unknown key {key!r}")
        if key in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate key {key!r}")
        kind, _ = _SCHEMA[key]
        try:
            if kind is float:
                value: object = float(text)
            elif kind is int:
                value = int(text)
            else:
                value = text
        except ValueError:
            raise ValidationError(
                f"{path}:{lineno}: key {key!r} expects {kind.__name__}, got {text!r}"
            ) from None
        seen[key] = value

    entries: dict[str, object] = {}
    for key, (_, default) in _SCHEMA.items():
        if key in seen:
            entries[key] = seen[key]
        elif default is _REQUIRED:
            raise ValidationError(f"{path}: missing required key {key!r}")
        else:
            entries[key] = default

    given_inst = [k for k in _INSTRUMENT_KEYS if entries[k] is not None]
    if given_inst and len(given_inst) != len(_INSTRUMENT_KEYS):
        missing = sorted(set(_INSTRUMENT_KEYS) - set(given_inst))
        raise ValidationError(f"{path}: instrument section incomplete, missing {missing}")

    for token in str(entries["output.formats"]).split(","):
        if token.strip() not in _FORMATS:
            raise ValidationError(
                f"{path}: unknown output format {token.strip()!r}; expected {_FORMATS}")

    config = RunConfig(entries=entries, source_dir=path.parent)
    try:
        config.scenario()
    except ValidationError:
        raise
    except (ValueError, OSError) as err:
        raise ValidationError(f"{path}: {err}") from err
    return config
