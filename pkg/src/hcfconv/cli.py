"""Command-line front end.

Grammar:

    hcfconv <dispersion|sweep|linescan|polfit|fit|optimize>
            --config <file-or-name> [command flags] --out <dir> [--svg]

Every subcommand writes delimited or JSON data files into the output
directory plus a machine-readable run manifest (config hash, versions,
command line). ``--svg`` additionally renders a matplotlib figure beside
the data; data files are byte-identical with or without it, and identical
across reruns except for the timestamp header line.

Exit codes: 0 success, 2 configuration error, 3 data parse error,
4 numerical error, 5 domain error.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._util import format_float
from .config import load_run_config
from .detection import (
    NoiseModel,
    coherent_spontaneous_ratio,
    fit_model_scale,
    load_counts,
    relative_efficiency_percent_per_w2,
)
from .dispersion import effective_index, leakage_loss_estimate, nearest_resonance, resonance_wavelengths
from .errors import (
    ConfigError,
    DataParseError,
    DomainError,
    HcfconvError,
    NumericalError,
    ResonanceProximityError,
)
from .phasematch import (
    conversion_efficiency,
    find_efficiency_maxima,
    optimize_pressure,
    pressure_sweep,
)
from .polarization import ProjectionDataset, fit_projection_dataset
from .ramanline import detuning_scan

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARSE = 3
EXIT_NUMERICAL = 4
EXIT_DOMAIN = 5


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _write_table(path: Path, title: str, meta: dict, columns, rows):
    lines = [f"# {title}", f"# generated: {_now()}"]
    lines += [f"# {k}: {v}" for k, v in meta.items()]
    lines.append("# columns: " + "\t".join(columns))
    for row in rows:
        lines.append(
            "\t".join(format_float(v) if isinstance(v, float) else str(v) for v in row)
        )
    path.write_text("\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args):
    if args.config is None:
        raise ConfigError("this subcommand needs --config <file-or-name>")
    return load_run_config(args.config)


def cmd_dispersion(args):
    run = _load(args)
    conv = run.conversion
    if args.steps < 1 or args.lambda_max_nm < args.lambda_min_nm:
        raise DomainError("need lambda_max >= lambda_min and steps >= 1")
    if args.steps == 1:
        grid = np.array([args.lambda_min_nm])
    else:
        grid = np.linspace(args.lambda_min_nm, args.lambda_max_nm, args.steps)
    rows = []
    n_eff_col, loss_col = [], []
    for lam_nm in grid:
        lam = lam_nm * 1e-9
        found = nearest_resonance(conv.fiber, lam)
        lam_res = found[1] if found is not None else math.nan
        try:
            neff = effective_index(conv.fiber, conv.gas, conv.dispersion_data, lam, conv.mode)
            loss = leakage_loss_estimate(conv.fiber, lam, conv.mode)
            status = "ok"
        except ResonanceProximityError:
            neff, loss, status = math.nan, math.nan, "resonance"
        rows.append((float(lam_nm), float(neff), float(loss), float(lam_res * 1e9), status))
        n_eff_col.append(neff)
        loss_col.append(loss)
    out = _outdir(args)
    table = out / "dispersion.tsv"
    _write_table(
        table,
        "hcfconv dispersion table",
        {
            "config_hash": run.config_hash(),
            "pressure_bar": format_float(conv.gas.pressure),
            "flagged_points": sum(1 for r in rows if r[4] != "ok"),
        },
        ("wavelength_nm", "n_eff", "loss_db_per_m", "nearest_resonance_nm", "status"),
        rows,
    )
    outputs = [table]
    if args.svg:
        from .plotting import plot_dispersion

        resonances_nm = [lam * 1e9 for lam in resonance_wavelengths(conv.fiber, 3)]
        svg = out / "dispersion.svg"
        plot_dispersion(grid, n_eff_col, loss_col, resonances_nm, svg)
        outputs.append(svg)
    return outputs, run.config_hash()


def cmd_sweep(args):
    run = _load(args)
    result = pressure_sweep(
        run.conversion,
        args.p_min,
        args.p_max,
        args.steps,
        gradient_out_ratio=args.gradient_out_ratio,
    )
    out = _outdir(args)
    table = out / "sweep.tsv"
    result.write_tsv(table, generated=_now())
    outputs = [table]
    if "json" in run.output_formats:
        data_json = out / "sweep.json"
        _write_json(data_json, result.to_dict())
        outputs.append(data_json)
    maxima = find_efficiency_maxima(result)
    if maxima:
        first_p, first_e = maxima[0]
        print(f"first efficiency maximum: {first_p:.2f} bar (relative {first_e:.3g})")
    print(f"global efficiency maximum: {result.peak_pressure:.2f} bar")
    if args.svg:
        from .plotting import plot_sweep

        svg = out / "sweep.svg"
        plot_sweep(result, svg)
        outputs.append(svg)
    return outputs, result.config_hash


def cmd_linescan(args):
    run = _load(args)
    conv = run.conversion
    if args.pressure is not None:
        conv = conv.at_pressure(args.pressure)
    half = args.span_mhz * 1e6 / 2.0
    scan = detuning_scan(conv, -half, half, args.steps)
    out = _outdir(args)
    table = out / "linescan.tsv"
    _write_table(
        table,
        "hcfconv detuning line scan",
        {
            "config_hash": run.config_hash(),
            "pressure_bar": format_float(scan.pressure),
            "peak_detuning_mhz": format_float(scan.peak_detuning() / 1e6),
            "fwhm_mhz": format_float(scan.fwhm() / 1e6),
        },
        ("detuning_mhz", "conversion_rel"),
        [(float(d / 1e6), float(c)) for d, c in zip(scan.detunings, scan.conversion)],
    )
    print(
        f"line scan at {scan.pressure:g} bar: peak at "
        f"{scan.peak_detuning() / 1e6:.1f} MHz, FWHM {scan.fwhm() / 1e6:.1f} MHz"
    )
    outputs = [table]
    if args.svg:
        from .plotting import plot_linescan

        svg = out / "linescan.svg"
        plot_linescan(scan, svg)
        outputs.append(svg)
    return outputs, run.config_hash()


def cmd_polfit(args):
    dataset = ProjectionDataset.from_file(
        args.data, background_v=args.background_v, background_h=args.background_h
    )
    fit = fit_projection_dataset(dataset, harmonic=args.harmonic)
    detectors = {}
    for name, sfit in (("V", fit.v), ("H", fit.h)):
        detectors[name] = {
            "offset_cps": sfit.offset,
            "amplitude_cps": sfit.amplitude,
            "phase_rad": sfit.phase,
            "offset_err": sfit.offset_err,
            "amplitude_err": sfit.amplitude_err,
            "phase_err": sfit.phase_err,
            "visibility": sfit.visibility,
            "visibility_err": sfit.visibility_err,
            "fidelity": sfit.fidelity(),
            "negative_offset": sfit.negative_offset,
        }
    report = {
        "harmonic": args.harmonic,
        "background_v_cps": args.background_v,
        "background_h_cps": args.background_h,
        "fidelity_convention": "F = (1 + visibility) / 2",
        "detectors": detectors,
        "mean_fidelity": 0.5 * (fit.v.fidelity() + fit.h.fidelity()),
        "phase_difference_rad": fit.phase_difference(),
    }
    out = _outdir(args)
    path = out / "polfit.json"
    _write_json(path, report)
    for name in ("V", "H"):
        d = detectors[name]
        print(
            f"{name}: visibility {d['visibility']:.4f} +- {d['visibility_err']:.4f}, "
            f"fidelity {d['fidelity']:.4f}"
        )
    outputs = [path]
    if args.svg:
        from .plotting import plot_projection_fit

        svg = out / "polfit.svg"
        plot_projection_fit(dataset, fit, svg)
        outputs.append(svg)
    return outputs, None


def cmd_fit(args):
    run = _load(args)
    conv = run.conversion
    records = load_counts(args.data)
    fit = fit_model_scale(
        records, conv, run.chain, p_max_fit=args.p_max_fit, background_rate=args.background_cps
    )
    fit_pressures = fit.pressures[fit.in_fit_range]
    fit_models = fit.model_rates[fit.in_fit_range]
    p_peak = float(fit_pressures[int(np.argmax(fit_models))])
    internal_peak = fit.scale * conversion_efficiency(conv, p_peak)
    noise = NoiseModel()
    report = fit.to_dict()
    report.update(
        {
            "config_hash": run.config_hash(),
            "background_cps": args.background_cps,
            "fit_peak_pressure_bar": p_peak,
            "internal_efficiency_at_fit_peak": internal_peak,
            "relative_efficiency_percent_per_w2": relative_efficiency_percent_per_w2(
                internal_peak, conv.pump.power, conv.stokes.power
            ),
            "spontaneous_coefficient_per_cm_bar": noise.spontaneous_coefficient,
            "coherent_spontaneous_ratio_at_fit_peak": coherent_spontaneous_ratio(
                internal_peak, noise, p_peak, conv.fiber.length * 100.0
            ),
        }
    )
    out = _outdir(args)
    report_path = out / "fit.json"
    _write_json(report_path, report)
    residuals = out / "fit_residuals.tsv"
    _write_table(
        residuals,
        "hcfconv model-scale fit residuals",
        {
            "config_hash": run.config_hash(),
            "scale": format_float(fit.scale),
            "p_max_fit_bar": format_float(fit.p_max_fit),
            "rms_fit": format_float(fit.rms_fit),
            "rms_full": format_float(fit.rms_full),
        },
        ("pressure_bar", "corrected_rate_cps", "model_rate_cps", "residual_cps", "in_fit_range"),
        [
            (float(p), float(d), float(m), float(r), int(f))
            for p, d, m, r, f in zip(
                fit.pressures, fit.corrected_rates, fit.model_rates, fit.residuals, fit.in_fit_range
            )
        ],
    )
    print(
        f"fitted scale {fit.scale:.6g} over {fit.n_fit} records at <= "
        f"{fit.p_max_fit:g} bar; rms {fit.rms_fit:.3g} (fit range), "
        f"{fit.rms_full:.3g} (all pressures)"
    )
    outputs = [report_path, residuals]
    if args.svg:
        from .plotting import plot_scale_fit

        svg = out / "fit.svg"
        plot_scale_fit(fit, svg)
        outputs.append(svg)
    return outputs, run.config_hash()


def cmd_optimize(args):
    run = _load(args)
    pressure, eff = optimize_pressure(
        run.conversion, args.p_min, args.p_max, grid_points=args.grid_points, tol=args.tol
    )
    out = _outdir(args)
    path = out / "optimize.json"
    _write_json(
        path,
        {
            "config_hash": run.config_hash(),
            "search_range_bar": [args.p_min, args.p_max],
            "grid_points": args.grid_points,
            "tolerance_bar": args.tol,
            "optimal_pressure_bar": pressure,
            "efficiency_arbitrary_units": eff,
        },
    )
    print(f"optimal pressure {pressure:.2f} bar (efficiency {eff:.6g} arb. u.)")
    return [path], run.config_hash()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hcfconv",
        description=(
            "Phase matching, Raman line, polarization, and detection-chain "
            "analysis for CW four-wave mixing in gas-filled hollow-core fibers."
        ),
    )
    parser.add_argument("--version", action="version", version=f"hcfconv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, need_config=True):
        sp.add_argument(
            "--config",
            required=need_config,
            default=None,
            help="run configuration file, or a packaged name such as 'reference'",
        )
        sp.add_argument("--out", default=".", help="output directory (default: current)")
        sp.add_argument("--svg", action="store_true", help="also render an SVG figure")

    sp = sub.add_parser("dispersion", help="mode index and loss versus wavelength")
    common(sp)
    sp.add_argument("--lambda-min-nm", type=float, default=800.0)
    sp.add_argument("--lambda-max-nm", type=float, default=1600.0)
    sp.add_argument("--steps", type=int, default=200)
    sp.set_defaults(handler=cmd_dispersion)

    sp = sub.add_parser("sweep", help="conversion efficiency versus gas pressure")
    common(sp)
    sp.add_argument("--p-min", type=float, default=0.0)
    sp.add_argument("--p-max", type=float, default=300.0)
    sp.add_argument("--steps", type=int, default=1000)
    sp.add_argument(
        "--gradient-out-ratio",
        type=float,
        default=None,
        help="model a linear pressure gradient: outlet = ratio * inlet (grid pressure)",
    )
    sp.set_defaults(handler=cmd_sweep)

    sp = sub.add_parser("linescan", help="conversion versus two-photon detuning")
    common(sp)
    sp.add_argument("--span-mhz", type=float, default=2000.0)
    sp.add_argument("--steps", type=int, default=2001)
    sp.add_argument("--pressure", type=float, default=None, help="override the config pressure")
    sp.set_defaults(handler=cmd_linescan)

    sp = sub.add_parser("polfit", help="sine-fit polarization projection data")
    common(sp, need_config=False)
    sp.add_argument("--data", required=True, help="projection dataset (delimited text)")
    sp.add_argument("--harmonic", type=int, choices=(1, 2), default=2,
                    help="2 for half-wave-plate scans (default), 1 for polarizer scans")
    sp.add_argument("--background-v", type=float, default=0.0, help="V detector background, cps")
    sp.add_argument("--background-h", type=float, default=0.0, help="H detector background, cps")
    sp.set_defaults(handler=cmd_polfit)

    sp = sub.add_parser("fit", help="fit the model scale to measured count rates")
    common(sp)
    sp.add_argument("--data", required=True, help="counts file (delimited text)")
    sp.add_argument("--p-max-fit", type=float, default=20.0)
    sp.add_argument("--background-cps", type=float, default=0.0)
    sp.set_defaults(handler=cmd_fit)

    sp = sub.add_parser("optimize", help="find the pressure of maximal efficiency")
    common(sp)
    sp.add_argument("--p-min", type=float, default=0.0)
    sp.add_argument("--p-max", type=float, default=300.0)
    sp.add_argument("--grid-points", type=int, default=2000)
    sp.add_argument("--tol", type=float, default=0.01, help="refinement tolerance, bar")
    sp.set_defaults(handler=cmd_optimize)

    return parser


def _write_manifest(args, outputs, config_hash):
    out = Path(args.out)
    manifest = {
        "command": args.command,
        "argv": list(sys.argv[1:]) if sys.argv else [],
        "config": args.config,
        "config_hash": config_hash,
        "package_version": __version__,
        "python_version": sys.version.split()[0],
        "generated": _now(),
        "outputs": [p.name for p in outputs],
    }
    path = out / f"{args.command}_manifest.json"
    _write_json(path, manifest)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outputs, config_hash = args.handler(args)
        _write_manifest(args, outputs, config_hash)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except HcfconvError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in outputs:
        print(f"wrote {path}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
