#!/usr/bin/env python
# encoding: utf-8
#
# Copyright (c) 2026 bispecar contributors
#
# MIT Licence. See http://opensource.org/licenses/MIT
#
# Created on 2026-10-18
#

"""Command-line interface.

Usage::

    bispecar simulate --family mixed --phi 0.7 --varphi 0.2 --alpha 1.5 --T 100
    bispecar identify --input brent.csv --column value --transform hp --p 2
    bispecar montecarlo --config table1.json -o table1

Every command writes its outputs atomically plus a
``<output>.manifest.json`` recording flags, seed, version and input
hashes. Exit codes: 0 success, 2 usage error, 3 data error, 4 model
error, 5 domain error, 6 estimation error, 7 configuration error and 1
for anything unexpected.
"""


import argparse
import functools
import json
import logging
import math
import os
import sys
import time
from contextlib import ExitStack
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from bispecar.config import MC_DEFAULTS, Settings, setup_logging
from bispecar.model import CAUSAL, FAMILIES, MIXED, NONCAUSAL, ModelSpec, family_for
from bispecar.objective import WEIGHTS, WEIGHT_MODULUS, build_context, implied_cumulants
from bispecar.optimize import GTOL, MAXITER, minimize_rt
from bispecar.pipeline import (
    HP_LAMBDA,
    TRANSFORMS,
    SeriesFrame,
    diagnostics,
    load_csv,
    sample_acf,
    transform,
)
from bispecar.serializers import SCHEMA_VERSION, RunManifest, manifest_path, write
from bispecar.simulate import MonteCarloConfig, StableParams, mc_run, simulate
from bispecar.spectral import summarize
from bispecar.strategy import START_METHODS, START_ROOTS, estimate_candidates
from bispecar.strategy import initial_values
from bispecar.theory import bispectrum_grid, spectrum_grid
from bispecar.util import BispecarError, ConfigError, atomic_writer, library_version
from bispecar.util import resolve_threads

log = logging.getLogger(__name__)

#: ``--family`` spellings
FAMILY_ALIASES = {"ar": CAUSAL, "mar": MIXED, "nar": NONCAUSAL}


def _family(value: str) -> str:
    name = value.lower()
    name = FAMILY_ALIASES.get(name, name)
    if name not in FAMILIES:
        raise argparse.ArgumentTypeError(
            "invalid family {!r}; choose from {}".format(
                value, ", ".join(FAMILIES + tuple(FAMILY_ALIASES))
            )
        )
    return name


def _spec_from_flags(args: argparse.Namespace) -> ModelSpec:
    phi = args.phi or []
    varphi = args.varphi or []
    family = family_for(len(phi), len(varphi))
    if args.family and args.family != family:
        raise ConfigError(
            "--family {} does not match {} --phi and {} --varphi values".format(
                args.family, len(phi), len(varphi)
            )
        )
    return ModelSpec(family, phi, varphi)


def _weights(args: argparse.Namespace) -> Dict[str, Any]:
    n = getattr(args, "n", None)
    return {"m": args.m, "n": n}


def _load(args: argparse.Namespace) -> SeriesFrame:
    frame = load_csv(args.input, args.column)
    return transform(frame, args.transform, args.lam)


def _json_doc(doc: Dict[str, Any], path: str) -> Dict[str, Any]:
    doc["schema_version"] = SCHEMA_VERSION
    doc["manifest"] = os.path.basename(manifest_path(path))
    return doc


def _flags(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k != "func"}


def _manifest(args: argparse.Namespace, inputs: Sequence[str] = ()) -> RunManifest:
    return RunManifest(args.command, _flags(args), args.seed, inputs)


# Commands -------------------------------------------------------------


def cmd_simulate(args: argparse.Namespace) -> List[str]:
    """Simulate a series with alpha-stable innovations."""
    spec = _spec_from_flags(args)
    params = StableParams(args.alpha, args.beta, args.gamma, args.delta)
    sim = simulate(spec, params, args.T, seed=args.seed, burn_in=args.burn_in)

    manifest = _manifest(args)
    frame = pd.DataFrame({"t": np.arange(args.T), "y": sim.y, "eps": sim.eps})
    write("csv", frame, manifest.add_output(args.output))
    manifest.write(args.output)
    return manifest.outputs


def _trace_line(fp: Any, record: Dict[str, Any]) -> None:
    fp.write(json.dumps(record, sort_keys=True) + "\n")


def cmd_estimate(args: argparse.Namespace) -> List[str]:
    """Estimate one ``(r, s)`` model by minimising ``R_T``."""
    r, s = args.r, args.s
    if r < 0 or s < 0 or r + s < 1:
        raise ConfigError("need r, s >= 0 and r + s >= 1, got ({}, {})".format(r, s))
    family = family_for(r, s)
    frame = _load(args)
    frame.require_length()
    ctx = build_context(frame.values, r + s, weight=args.weight, **_weights(args))
    start = initial_values(family, r, s, ctx.theta_bar, args.start, ctx.value)

    with ExitStack() as stack:
        callback: Optional[Callable[[Dict[str, Any]], None]] = None
        if args.trace:
            fp = stack.enter_context(atomic_writer(args.trace, "w", encoding="utf-8"))
            callback = functools.partial(_trace_line, fp)

        result = minimize_rt(
            ctx, family, start, r=r, gtol=args.gtol, maxiter=args.maxiter, trace=callback
        )

    manifest = _manifest(args, [args.input])
    k2, k3 = implied_cumulants(result.spec, ctx)
    doc = {
        "series": frame.name,
        "transform": frame.transform_applied,
        "T": len(frame),
        "start": [float(v) for v in start],
        "theta_bar": [float(v) for v in ctx.theta_bar],
        "k2_star": k2,
        "k3_star": k3,
        "result": result.to_dict(),
    }
    write("json", _json_doc(doc, args.output), manifest.add_output(args.output))
    if args.trace:
        manifest.add_output(args.trace)
    manifest.write(args.output)
    return manifest.outputs


def cmd_identify(args: argparse.Namespace) -> List[str]:
    """Estimate every split of ``p`` and select the smallest ``R_T``."""
    frame = _load(args)
    frame.require_length()
    report = estimate_candidates(
        frame.values,
        args.p,
        method=args.start,
        weight=args.weight,
        threads=resolve_threads(args.threads),
        gtol=args.gtol,
        maxiter=args.maxiter,
        **_weights(args)
    )
    manifest = _manifest(args, [args.input])
    doc = report.to_dict()
    doc.update(series=frame.name, transform=frame.transform_applied)
    write("json", _json_doc(doc, args.output), manifest.add_output(args.output))
    manifest.write(args.output)
    print(report.selected_spec.label)
    return manifest.outputs


def cmd_montecarlo(args: argparse.Namespace) -> List[str]:
    """Run a Monte Carlo campaign from a JSON configuration file."""
    settings = Settings(args.config, MC_DEFAULTS)
    if args.M is not None:
        settings["M"] = args.M
    if args.seed is not None:
        settings["seed"] = args.seed
    config = MonteCarloConfig.from_mapping(settings)
    threads = args.threads if args.threads is not None else settings.get("threads")
    report = mc_run(config, threads=threads)

    args.seed = config.seed
    manifest = _manifest(args, [args.config])
    rates = args.output + "_rates.csv"
    write("csv", report.rates_frame(), manifest.add_output(rates))
    estimates = args.output + "_estimates.csv"
    write("csv", report.estimates_frame(), manifest.add_output(estimates))
    logfile = args.output + "_log.json"
    write("json", _json_doc(report.to_dict(), rates), manifest.add_output(logfile))
    manifest.write(rates)
    return manifest.outputs


def cmd_ingest(args: argparse.Namespace) -> List[str]:
    """Transform a CSV column and write the series plus diagnostics."""
    frame = _load(args)
    summary = diagnostics(frame, args.pmax)
    manifest = _manifest(args, [args.input])
    write("csv", frame.to_frame(), manifest.add_output(args.output))
    path = args.diagnostics or os.path.splitext(args.output)[0] + "_diagnostics.json"
    write("json", _json_doc(summary, args.output), manifest.add_output(path))
    manifest.write(args.output)
    return manifest.outputs


def _surface_row(ctx: Any, r: int, s: int, x: float, ys: np.ndarray) -> List[float]:
    return [ctx.value(ModelSpec.from_theta(r, s, [x, y])) for y in ys]


def cmd_rt_surface(args: argparse.Namespace) -> List[str]:
    """Evaluate ``R_T`` over a grid of two coefficients."""
    r, s = args.r, args.s
    if r + s != 2:
        raise ConfigError("rt-surface needs r + s == 2, got ({}, {})".format(r, s))
    frame = _load(args)
    ctx = build_context(frame.values, 2, weight=args.weight, **_weights(args))
    first = np.linspace(*args.grid1[:2], int(args.grid1[2]))
    second = np.linspace(*args.grid2[:2], int(args.grid2[2]))

    jobs = Parallel(n_jobs=resolve_threads(args.threads), prefer="threads")
    rows = jobs(delayed(_surface_row)(ctx, r, s, x, second) for x in first)

    names = ModelSpec.from_theta(r, s, [0.0, 0.0]).coefficient_names
    grid = np.array(rows)
    x, y = np.meshgrid(first, second, indexing="ij")
    out = pd.DataFrame({names[0]: x.ravel(), names[1]: y.ravel(), "rt": grid.ravel()})
    manifest = _manifest(args, [args.input])
    write("csv", out, manifest.add_output(args.output))
    manifest.write(args.output)

    finite = np.where(np.isfinite(grid), grid, math.inf)
    i, j = np.unravel_index(int(np.argmin(finite)), finite.shape)
    log.info(
        "grid minimum R_T=%.6g at %s=%.4f %s=%.4f",
        grid[i, j], names[0], first[i], names[1], second[j],
    )
    return manifest.outputs


def _i3_frame(freqs: np.ndarray, grid: np.ndarray) -> pd.DataFrame:
    f1, f2 = np.meshgrid(freqs, freqs, indexing="ij")
    return pd.DataFrame(
        {
            "freq1": f1.ravel(),
            "freq2": f2.ravel(),
            "re": grid.real.ravel(),
            "im": grid.imag.ravel(),
        }
    )


def cmd_dump_spectra(args: argparse.Namespace) -> List[str]:
    """Write periodogram, biperiodogram and optional model grids as CSV."""
    frame = _load(args)
    summaries = summarize(frame.values)
    freqs = summaries.freqs
    prefix = args.output
    manifest = _manifest(args, [args.input])

    def out(suffix: str, data: pd.DataFrame) -> None:
        write("csv", data, manifest.add_output(prefix + suffix))

    out("_I2.csv", pd.DataFrame({"freq": freqs, "value": summaries.I2}))
    out("_I3.csv", _i3_frame(freqs, summaries.I3))

    if args.theory:
        spec = _spec_from_flags(args).require_stationary()
        ctx = build_context(frame.values, max(1, spec.r + spec.s))
        k2, k3 = implied_cumulants(spec, ctx)
        T = summaries.T
        out("_S2.csv", pd.DataFrame({"freq": freqs, "value": spectrum_grid(spec, k2, T)}))
        out("_S3.csv", _i3_frame(freqs, bispectrum_grid(spec, k3, T)))
    if args.acf:
        acf = sample_acf(frame.values, args.acf)
        out("_acf.csv", pd.DataFrame({"lag": np.arange(acf.size), "acf": acf}))

    manifest.write(prefix + "_I2.csv")
    return manifest.outputs


# Parser ---------------------------------------------------------------


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    parser.add_argument(
        "--threads", type=int, default=None, help="worker cap (default: all cores)"
    )
    parser.add_argument("--log-file", dest="log_file", help="rotating log file")


def _data(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="CSV file")
    parser.add_argument("--column", required=True, help="value column")
    parser.add_argument(
        "--transform", choices=sorted(TRANSFORMS), default="none", help="detrending"
    )
    parser.add_argument(
        "--lambda", dest="lam", type=float, default=HP_LAMBDA, help="HP penalty"
    )


def _objective(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--m", type=float, default=0.5, help="second-order weight")
    parser.add_argument("--n", type=float, default=None, help="third-order weight")
    parser.add_argument("--weight", choices=WEIGHTS, default=WEIGHT_MODULUS)
    parser.add_argument("--start", choices=START_METHODS, default=START_ROOTS)
    parser.add_argument(
        "--gtol", type=float, default=GTOL, help="gradient tolerance, times max(1, |R_T|)"
    )
    parser.add_argument("--maxiter", type=int, default=MAXITER)


def _model(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", type=_family, default=None)
    parser.add_argument("--phi", type=float, nargs="*", default=[], help="lag coefs")
    parser.add_argument(
        "--varphi", type=float, nargs="*", default=[], help="lead coefs"
    )


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog="bispecar",
        description="Spectrum/bispectrum estimation of causal, noncausal "
        "and mixed autoregressions.",
    )
    parser.add_argument("--version", action="version", version=library_version())
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("simulate", help="simulate a series")
    _common(p)
    _model(p)
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--T", type=int, required=True, help="sample size")
    p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
    p.add_argument("-o", "--output", default="simulated.csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="estimate one (r, s) model")
    _common(p)
    _data(p)
    _objective(p)
    p.add_argument("--r", type=int, required=True, help="causal order")
    p.add_argument("--s", type=int, required=True, help="noncausal order")
    p.add_argument("--trace", help="JSON lines file of optimiser iterations")
    p.add_argument("-o", "--output", default="estimate.json")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("identify", help="estimate all splits of p and select")
    _common(p)
    _data(p)
    _objective(p)
    p.add_argument("--p", type=int, default=2, help="total order r + s")
    p.add_argument("-o", "--output", default="identify.json")
    p.set_defaults(func=cmd_identify)

    p = sub.add_parser("montecarlo", help="run a Monte Carlo campaign")
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--seed", type=int, default=None, help="override config seed")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--log-file", dest="log_file")
    p.add_argument("--M", type=int, default=None, help="override replications")
    p.add_argument("-o", "--output", default="montecarlo", help="output prefix")
    p.set_defaults(func=cmd_montecarlo)

    p = sub.add_parser("ingest", help="transform a series and report diagnostics")
    _common(p)
    _data(p)
    p.add_argument("--pmax", type=int, default=4)
    p.add_argument("--diagnostics", default=None, help="diagnostics JSON path")
    p.add_argument("-o", "--output", default="series.csv")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("rt-surface", help="evaluate R_T on a 2-D grid")
    _common(p)
    _data(p)
    p.add_argument("--m", type=float, default=0.5)
    p.add_argument("--n", type=float, default=None)
    p.add_argument("--weight", choices=WEIGHTS, default=WEIGHT_MODULUS)
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--s", type=int, default=1)
    grid = dict(nargs=3, type=float, metavar=("START", "STOP", "NUM"))
    p.add_argument("--grid1", default=[0.0, 0.95, 20], help="first axis", **grid)
    p.add_argument("--grid2", default=[0.0, 0.95, 20], help="second axis", **grid)
    p.add_argument("-o", "--output", default="rt_surface.csv")
    p.set_defaults(func=cmd_rt_surface)

    p = sub.add_parser("dump-spectra", help="write I2/I3 grids as CSV")
    _common(p)
    _data(p)
    _model(p)
    p.add_argument("--theory", action="store_true", help="also write S2/S3")
    p.add_argument("--acf", type=int, default=0, help="also write ACF to lag N")
    p.add_argument("-o", "--output", default="spectra", help="output prefix")
    p.set_defaults(func=cmd_dump_spectra)

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, run the command and return an exit code.

    Library errors are logged and mapped to their ``exit_code``;
    anything else is logged with a traceback and gives 1.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)

    setup_logging(args.log_file)
    start = time.time()
    log.info("---------- %s (%s) ----------", args.command, library_version())
    try:
        for path in args.func(args):
            log.debug("output: %s", path)
        retcode = 0
    except BispecarError as err:
        log.error("%s: %s", type(err).__name__, err)
        retcode = err.exit_code
    except Exception as err:
        log.exception(err)
        retcode = 1
    finally:
        log.info("---------- finished in %0.3fs ----------", time.time() - start)
    return retcode


def main() -> None:
    """Console entry point."""
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
