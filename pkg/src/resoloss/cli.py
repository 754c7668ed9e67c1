"""Command-line interface.

Every option is long-form. ``--config FILE`` reads ``key = value`` lines
(``#`` starts a comment; keys are option names without the leading dashes,
``-`` and ``_`` interchangeable). Explicit flags override the file. Keys that
belong to another subcommand are ignored; keys no subcommand knows are an
input error.

Exit codes: 0 success, 1 input error, 2 a fit failed or did not converge,
3 internal error.
"""
from __future__ import annotations

import argparse
import math
import sys
import threading
from pathlib import Path

import numpy as np

from . import __version__
from .campaign import DEFAULT_MANIFEST, DEFAULT_WORKERS, run_campaign
from .config import FitConfig, parse_beta_mode
from .design import DEFAULT_EPS_R, DEFAULT_GRID_POINTS, design_report
from .exceptions import EmptyBand, FitError, InputError, NotConverged, ResolossError
from .fitting import fit_resonance
from .io.catalog import catalog_query, dump_catalog
from .io.report import resonance_record, tls_record, write_report, design_records
from .io.sweepcsv import parse_sweep_csv, write_sweep_csv, write_temperature_csv
from .io.touchstone import parse_touchstone, write_touchstone
from .model import (
    BackgroundModel,
    ResonanceParams,
    TLSModelParams,
    dbm_to_watt,
    photon_number,
)
from .synth import NoiseModel, linewidth_grid, synth_power_sweep, synth_temperature_sweep, synth_trace
from .tls import fit_power_sweep

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_INTERNAL = 0, 1, 2, 3

_write_lock = threading.Lock()


def _emit(text, out):
    """Single serialised writer for every report and data file."""
    with _write_lock:
        if out in (None, "-"):
            sys.stdout.write(text)
            sys.stdout.flush()
        else:
            Path(out).write_text(text, encoding="utf-8")


def _band(text):
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError("band must be given as lo:hi in Hz")
    return float(lo), float(hi)


class _Options:
    """Registers long options with a None sentinel so config values can fill gaps."""

    def __init__(self, parser):
        self.parser = parser
        self.defaults = {}
        self.types = {}

    def add(self, name, type=str, default=None, help=None, **kw):
        dest = name.replace("-", "_")
        self.parser.add_argument(f"--{name}", dest=dest, type=type, default=None, help=help, **kw)
        self.defaults[dest] = default
        self.types[dest] = type
        return self


def _common_fit(opts):
    opts.add("max-iterations", int, FitConfig.max_iterations, "LM iteration cap")
    opts.add("gradient-tolerance", float, FitConfig.gradient_tolerance)
    opts.add("step-tolerance", float, FitConfig.step_tolerance)
    opts.add("seed", int, FitConfig.seed)


def _common_out(opts, formats=("json", "csv")):
    opts.add("out", str, None, "output file (default stdout)")
    opts.add("format", str, formats[0], f"one of {', '.join(formats)}", choices=formats)


def build_parser():
    parser = argparse.ArgumentParser(prog="resoloss", description="Resonator loss extraction and design.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", help="key = value defaults file")
    sub = parser.add_subparsers(dest="command", required=True)
    registry = {}

    p = sub.add_parser("fit", help="fit one Touchstone trace")
    p.add_argument("trace")
    o = _Options(p)
    o.add("power-dbm", float, None, "feed power at the device, dBm")
    o.add("temperature-k", float, None)
    o.add("wing-fraction", float, FitConfig.wing_fraction)
    o.add("label", str, "")
    _common_fit(o)
    _common_out(o)
    registry["fit"] = o

    p = sub.add_parser("sweep-fit", help="fit the TLS law to a loss-vs-drive CSV")
    p.add_argument("csv")
    o = _Options(p)
    o.add("frequency-hz", float, None, "resonance frequency (required)")
    o.add("temperature-k", float, None, "bath temperature (required)")
    o.add("beta", str, "fixed:1", "fixed:<value> or free")
    o.add("weighting", str, FitConfig.weighting, choices=("inverse_variance", "uniform"))
    o.add("q-l", float, None, "loaded Q, for power_dbm files")
    o.add("qc-mag", float, None, "|Q_c|, for power_dbm files")
    o.add("label", str, "")
    _common_fit(o)
    _common_out(o)
    registry["sweep-fit"] = o

    p = sub.add_parser("campaign", help="batch fit a directory described by a manifest")
    p.add_argument("directory")
    o = _Options(p)
    o.add("manifest", str, DEFAULT_MANIFEST, "manifest file name inside the directory")
    o.add("workers", int, DEFAULT_WORKERS, "size of the fit worker pool")
    o.add("wing-fraction", float, FitConfig.wing_fraction)
    o.add("beta", str, "fixed:1")
    o.add("weighting", str, FitConfig.weighting, choices=("inverse_variance", "uniform"))
    _common_fit(o)
    _common_out(o)
    registry["campaign"] = o

    p = sub.add_parser("design", help="lumped-element parallel-plate resonator design")
    o = _Options(p)
    o.add("inductance-h", float, None, "(required)")
    o.add("shunt-capacitance-f", float, None, "(required)")
    o.add("thickness-m", float, None, "dielectric thickness (required)")
    o.add("eps-r", float, DEFAULT_EPS_R)
    o.add("band-hz", _band, (4e9, 8e9), "lo:hi")
    o.add("p-min", float, 0.99)
    o.add("inductor-loss-bound", float, 1e-4)
    o.add("delta-expected", float, 3.2e-5)
    o.add("max-misattribution", float, None)
    o.add("grid-points", int, DEFAULT_GRID_POINTS)
    _common_out(o)
    registry["design"] = o

    p = sub.add_parser("synth", help="generate synthetic data in readable formats")
    synth_sub = p.add_subparsers(dest="synth_kind", required=True)

    q = synth_sub.add_parser("trace", help="Touchstone trace")
    o = _Options(q)
    o.add("seed", int, 0)
    o.add("f-r", float, 5e9)
    o.add("q-l", float, 5e4)
    o.add("qc-mag", float, 1e5)
    o.add("phi", float, 0.0)
    o.add("a", float, 1.0)
    o.add("alpha", float, 0.0)
    o.add("tau", float, 0.0)
    o.add("noise-sigma", float, 0.0, "isotropic complex noise RMS")
    o.add("points", int, 801)
    o.add("half-span-linewidths", float, 8.0)
    o.add("data-format", str, "RI", choices=("RI", "MA", "DB"))
    o.add("out", str, None)
    registry["synth trace"] = o

    q = synth_sub.add_parser("sweep", help="loss-vs-photon-number CSV")
    o = _Options(q)
    o.add("seed", int, 0)
    o.add("f-delta0", float, 2.8e-5)
    o.add("delta-other", float, 3.7e-6)
    o.add("n-c", float, 100.0)
    o.add("beta", float, 1.0)
    o.add("frequency-hz", float, 5e9)
    o.add("temperature-k", float, 0.01)
    o.add("noise-fraction", float, 0.05)
    o.add("n-min", float, 0.1)
    o.add("n-max", float, 1e6)
    o.add("points-per-decade", int, 20)
    o.add("out", str, None)
    registry["synth sweep"] = o

    q = synth_sub.add_parser("temp-sweep", help="loss-vs-temperature CSV")
    o = _Options(q)
    o.add("seed", int, 0, "accepted for symmetry; the generator is noiseless")
    o.add("f-delta0", float, 2.8e-5)
    o.add("delta-other", float, 3.7e-6)
    o.add("n-c", float, 100.0)
    o.add("beta", float, 1.0)
    o.add("frequency-hz", float, 5e9)
    o.add("photon-number", float, 1.0)
    o.add("t-min", float, 0.01)
    o.add("t-max", float, 1.0)
    o.add("points", int, 50)
    o.add("out", str, None)
    registry["synth temp-sweep"] = o

    p = sub.add_parser("catalog", help="query the bundled loss benchmark")
    o = _Options(p)
    o.add("material", str, None)
    o.add("reference", str, None)
    o.add("crystallinity", str, None)
    o.add("geometry", str, None)
    o.add("deposition", str, None)
    o.add("max-delta-lp", float, None, "absolute loss ceiling")
    o.add("exclude-incomparable", str, "false", "true/false", choices=("true", "false"))
    o.add("out", str, None)
    registry["catalog"] = o

    return parser, registry


def read_config(path):
    values = {}
    text = _read(path)
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise InputError(f"{path}: line {line_no}: expected 'key = value'")
        values[key.strip().lstrip("-").replace("-", "_")] = value.strip()
    return values


def _resolve(args, registry, key):
    opts = registry[key]
    config = read_config(args.config) if args.config else {}
    known = {d for o in registry.values() for d in o.defaults}
    unknown = sorted(set(config) - known)
    if unknown:
        raise InputError(f"unknown config keys: {', '.join(unknown)}")
    for dest, default in opts.defaults.items():
        if getattr(args, dest) is not None:
            continue
        if dest in config:
            try:
                setattr(args, dest, opts.types[dest](config[dest]))
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise InputError(f"config key {dest!r}: {exc}") from None
        else:
            setattr(args, dest, default)
    return args


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise InputError("missing required option(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))


def _fit_config(args, **extra):
    kw = dict(
        max_iterations=args.max_iterations,
        gradient_tolerance=args.gradient_tolerance,
        step_tolerance=args.step_tolerance,
        seed=args.seed,
    )
    if getattr(args, "wing_fraction", None) is not None:
        kw["wing_fraction"] = args.wing_fraction
    if getattr(args, "beta", None) is not None:
        kw["beta_mode"], kw["beta"] = parse_beta_mode(args.beta)
    if getattr(args, "weighting", None) is not None:
        kw["weighting"] = args.weighting
    kw.update(extra)
    try:
        return FitConfig(**kw)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def cmd_fit(args):
    cfg = _fit_config(args)
    (trace,) = parse_touchstone(_read(args.trace), label=args.label or Path(args.trace).stem)
    power = dbm_to_watt(args.power_dbm) if args.power_dbm is not None else None
    trace = trace.with_metadata(applied_power=power, temperature=args.temperature_k)
    fit = fit_resonance(trace, cfg)
    n = None
    if power is not None:
        n = photon_number(power, fit.params.f_r, fit.params.Q_l, fit.params.Qc_mag)
    _emit(write_report([resonance_record(fit, trace, source=args.trace, photon_number=n)], args.format), args.out)
    return EXIT_OK if fit.converged else EXIT_NOT_CONVERGED


def cmd_sweep_fit(args):
    _require(args, "frequency_hz", "temperature_k")
    cfg = _fit_config(args)
    sweep = parse_sweep_csv(_read(args.csv), f_r=args.frequency_hz, Q_l=args.q_l, Qc_mag=args.qc_mag)
    tls = fit_power_sweep(sweep, args.frequency_hz, args.temperature_k, cfg, label=args.label or Path(args.csv).stem)
    _emit(write_report([tls_record(tls, n_points=len(sweep))], args.format), args.out)
    return EXIT_OK if tls.converged else EXIT_NOT_CONVERGED


def cmd_campaign(args):
    cfg = _fit_config(args)
    result = run_campaign(args.directory, args.manifest, cfg, workers=args.workers)
    _emit(write_report(result.report, args.format), args.out)
    for msg in result.failures:
        print(f"warning: {msg}", file=sys.stderr)
    return EXIT_OK if result.all_converged else EXIT_NOT_CONVERGED


def cmd_design(args):
    _require(args, "inductance_h", "shunt_capacitance_f", "thickness_m")
    kw = dict(
        eps_r=args.eps_r, band=args.band_hz, p_min=args.p_min, loss_bound=args.inductor_loss_bound,
        delta_expected=args.delta_expected, max_misattribution=args.max_misattribution,
        grid_points=args.grid_points,
    )
    try:
        report = design_report(args.inductance_h, args.shunt_capacitance_f, args.thickness_m, **kw)
    except EmptyBand as exc:
        if exc.report is not None:
            _emit(write_report(design_records(exc.report), args.format), args.out)
        raise InputError(str(exc)) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    _emit(write_report(report, args.format), args.out)
    return EXIT_OK


def cmd_synth(args):
    kind = args.synth_kind
    try:
        if kind == "trace":
            res = ResonanceParams(args.f_r, args.q_l, args.qc_mag, args.phi)
            bg = BackgroundModel(args.a, args.alpha, args.tau)
            noise = NoiseModel.isotropic(args.noise_sigma, seed=args.seed)
            trace = synth_trace(res, bg, linewidth_grid(res, args.half_span_linewidths, args.points), noise)
            _emit(write_touchstone(trace, fmt=args.data_format), args.out)
        elif kind == "sweep":
            p = TLSModelParams(args.f_delta0, args.delta_other, args.n_c, args.beta, args.frequency_hz, args.temperature_k)
            decades = math.log10(args.n_max / args.n_min)
            n_grid = np.logspace(math.log10(args.n_min), math.log10(args.n_max), int(round(decades * args.points_per_decade)) + 1)
            sweep = synth_power_sweep(p, n_grid, NoiseModel.relative(args.noise_fraction, seed=args.seed))
            _emit(write_sweep_csv(sweep), args.out)
        else:
            p = TLSModelParams(args.f_delta0, args.delta_other, args.n_c, args.beta, args.frequency_hz, 0.01)
            T_grid = np.geomspace(args.t_min, args.t_max, args.points)
            _emit(write_temperature_csv(synth_temperature_sweep(p, T_grid, args.photon_number)), args.out)
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from None
    return EXIT_OK


def cmd_catalog(args):
    rows = catalog_query(
        material=args.material, reference=args.reference, crystallinity=args.crystallinity,
        geometry=args.geometry, deposition=args.deposition, max_delta_LP=args.max_delta_lp,
        include_incomparable=args.exclude_incomparable != "true",
    )
    _emit(dump_catalog(rows), args.out)
    return EXIT_OK


COMMANDS = {
    "fit": cmd_fit,
    "sweep-fit": cmd_sweep_fit,
    "campaign": cmd_campaign,
    "design": cmd_design,
    "synth": cmd_synth,
    "catalog": cmd_catalog,
}


def main(argv=None):
    parser, registry = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; usage errors are input errors here
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    key = args.command if args.command != "synth" else f"synth {args.synth_kind}"
    try:
        _resolve(args, registry, key)
        return COMMANDS[args.command](args)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FitError as exc:
        print(f"fit failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except ResolossError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit code 3
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
