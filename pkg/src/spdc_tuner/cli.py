"""Command-line interface: config-driven simulation with file outputs.

Commands map one-to-one onto library operations: `curve` and `marginal` onto
the grid engine, `sweep`/`fit`/`equiv` onto the calibration module, `flux`
onto the photon-budget helpers. Grid products are written as delimited CSV,
16-bit PGM heatmaps, and rendered PNG figures, selected by `--format`.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .calibrate import (
    fit_poling_period,
    load_measured_csv,
    mode_density,
    photon_flux,
    sweep,
    temperature_poling_equivalence,
)
from .config import RunConfig, load_config
from .figures import save_curve_figure, save_marginal_figure
from .spectrum import Scenario, instrument_convolve, marginal_spectrum, tuning_curve
from .writers import write_curve_csv, write_marginal_csv, write_keyvals, write_pgm


def _metadata(rc: RunConfig, scenario: Scenario, command: str,
              extra: list[tuple[str, str]] = ()) -> list[tuple[str, str]]:
    items = [("command", command)]
    items += rc.effective_items()
    items.append(("dispersion.digest", scenario.crystal.dispersion.content_digest))
    items += list(extra)
    return items


def _out_dir(args, rc: RunConfig) -> Path:
    out = Path(args.out) if args.out else Path(str(rc["output.directory"]))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _formats(args, rc: RunConfig) -> tuple[str, ...]:
    if args.format:
        return tuple(tok.strip() for tok in args.format.split(","))
    return rc.formats()


def _compute_curve(scenario: Scenario, workers: int, convolve: bool):
    curve = tuning_curve(
        scenario.grid, scenario.pump, scenario.crystal,
        scenario.temperature_c, scenario.quad, workers=workers,
    )
    if convolve:
        if scenario.instrument is None:
            raise ValueError("--convolve needs an instrument section in the config")
        curve = instrument_convolve(curve, scenario.instrument)
    return curve


def _write_curve_products(curve, stem: str, out: Path, formats, metadata) -> list[Path]:
    written = []
    if "csv" in formats:
        path = out / f"{stem}.csv"
        write_curve_csv(curve, path, metadata)
        written.append(path)
    if "pgm" in formats:
        path = out / f"{stem}.pgm"
        write_pgm(curve, path)
        written.append(path)
    if "png" in formats:
        path = out / f"{stem}.png"
        save_curve_figure(curve, path, title=stem)
        written.append(path)
    return written


def cmd_curve(args) -> int:
    rc = load_config(args.config)
    scenario = rc.scenario()
    curve = _compute_curve(scenario, args.threads, args.convolve)
    meta = _metadata(rc, scenario, "curve", [
        ("convolved", "true" if args.convolve else "false"),
        ("curve.params_digest", curve.params_digest),
    ])
    for path in _write_curve_products(curve, "curve", _out_dir(args, rc),
                                      _formats(args, rc), meta):
        print(path)
    return 0


def cmd_marginal(args) -> int:
    rc = load_config(args.config)
    scenario = rc.scenario()
    curve = _compute_curve(scenario, args.threads, args.convolve)
    marginal = marginal_spectrum(curve)
    meta = _metadata(rc, scenario, "marginal", [
        ("convolved", "true" if args.convolve else "false"),
        ("curve.params_digest", curve.params_digest),
    ])
    out = _out_dir(args, rc)
    formats = _formats(args, rc)
    if "csv" in formats:
        path = out / "marginal.csv"
        write_marginal_csv(curve.wavelength_nm, marginal, path, meta)
        print(path)
    if "png" in formats:
        path = out / "marginal.png"
        save_marginal_figure(curve.wavelength_nm, marginal, path, title="marginal")
        print(path)
    return 0


def cmd_sweep(args) -> int:
    rc = load_config(args.config)
    scenario = rc.scenario()
    values = [float(tok) for tok in args.values.split(",") if tok.strip()]
    entries = sweep(args.param, values, scenario, workers=args.threads)
    out = _out_dir(args, rc)
    formats = _formats(args, rc)
    failed = 0
    for idx, entry in enumerate(entries):
        if entry.error is not None:
            failed += 1
            print(f"spdc-tuner: sweep {args.param}={entry.value:g} failed: {entry.error}",
                  file=sys.stderr)
            continue
        meta = _metadata(rc, scenario, "sweep", [
            ("sweep.param", args.param),
            ("sweep.value", repr(entry.value)),
            ("curve.params_digest", entry.curve.params_digest),
        ])
        stem = f"curve_{args.param}_{idx:02d}_{entry.value:g}"
        for path in _write_curve_products(entry.curve, stem, out, formats, meta):
            print(path)
    return 1 if failed else 0


def cmd_fit(args) -> int:
    rc = load_config(args.config)
    scenario = rc.scenario()
    target = load_measured_csv(args.target, scenario.instrument)
    lo, hi = (float(tok) for tok in args.bounds.split(","))
    result = fit_poling_period(target, scenario, (lo, hi), tol=args.tol,
                               workers=args.threads)
    items = [
        ("best_poling_um", f"{result.best_poling_m * 1e6:.6f}"),
        ("residual", f"{result.residual:.6e}"),
        ("iterations", str(result.iterations)),
        ("converged", str(result.converged).lower()),
    ]
    for key, value in items:
        print(f"{key} = {value}")
    write_keyvals(_out_dir(args, rc) / "fit.txt", items)
    return 0


def cmd_equiv(args) -> int:
    rc = load_config(args.config)
    scenario = rc.scenario()
    result = temperature_poling_equivalence(args.delta_t, scenario,
                                            workers=args.threads)
    share_pct = 100.0 * result.expansion_share_m / result.delta_poling_m
    items = [
        ("delta_t_c", f"{args.delta_t:g}"),
        ("equivalent_delta_poling_nm", f"{result.delta_poling_m * 1e9:.3f}"),
        ("thermal_expansion_share_nm", f"{result.expansion_share_m * 1e9:.3f}"),
        ("thermal_expansion_share_percent", f"{share_pct:.2f}"),
        ("fit_residual", f"{result.fit.residual:.6e}"),
    ]
    for key, value in items:
        print(f"{key} = {value}")
    write_keyvals(_out_dir(args, rc) / "equiv.txt", items)
    return 0


def cmd_flux(args) -> int:
    flux = photon_flux(args.power_nw * 1e-9, args.lambda_nm * 1e-9)
    print(f"{flux:.3g}")
    if args.bandwidth_nm is not None:
        density = mode_density(flux, args.bandwidth_nm * 1e-9, args.lambda_nm * 1e-9)
        print(f"{density:.3g}")
    return 0


def _add_common(sub, config_required=True):
    sub.add_argument("--config", required=config_required, help="run configuration file")
    sub.add_argument("--out", default=None, help="output directory (default from config)")
    sub.add_argument("--format", default=None, help="comma list of csv,pgm,png")
    sub.add_argument("--threads", type=int, default=1,
                     help="grid worker count (does not change output bytes)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spdc-tuner",
        description="Transverse-momentum-resolved spectra of type-0 SPDC",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("curve", help="simulate one tuning curve")
    _add_common(p)
    p.add_argument("--convolve", action="store_true",
                   help="apply the instrument response from the config")
    p.set_defaults(func=cmd_curve)

    p = commands.add_parser("marginal", help="collimated spectrum of one curve")
    _add_common(p)
    p.add_argument("--convolve", action="store_true")
    p.set_defaults(func=cmd_marginal)

    p = commands.add_parser("sweep", help="sweep one of G0, w0, T, L0")
    _add_common(p)
    p.add_argument("--param", required=True, choices=("G0", "w0", "T", "L0"))
    p.add_argument("--values", required=True,
                   help="comma list in SI units (T in degrees C)")
    p.set_defaults(func=cmd_sweep)

    p = commands.add_parser("fit", help="fit the poling period to a measured spectrum")
    _add_common(p)
    p.add_argument("--target", required=True, help="measured-spectrum CSV")
    p.add_argument("--bounds", required=True, help="lo,hi poling bounds in metres")
    p.add_argument("--tol", type=float, default=1e-10, help="period tolerance in metres")
    p.set_defaults(func=cmd_fit)

    p = commands.add_parser("equiv", help="temperature to poling-period equivalence")
    _add_common(p)
    p.add_argument("--delta-t", type=float, required=True, dest="delta_t",
                   help="temperature step in degrees C")
    p.set_defaults(func=cmd_equiv)

    p = commands.add_parser("flux", help="photon flux of a beam power")
    p.add_argument("--power-nw", type=float, required=True, dest="power_nw")
    p.add_argument("--lambda-nm", type=float, required=True, dest="lambda_nm")
    p.add_argument("--bandwidth-nm", type=float, default=None, dest="bandwidth_nm",
                   help="also report the spectral mode density")
    p.set_defaults(func=cmd_flux)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as err:  # noqa: BLE001 - single CLI error surface
        print(f"spdc-tuner: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
