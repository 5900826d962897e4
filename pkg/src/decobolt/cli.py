"""Command-line interface.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import channels as ch
from .config import ConfigError, load_config, parse_quantity
from .evolution import EvolutionError, evolve, init_gaussian, write_snapshot
from .experiments import SCENARIOS, feasibility
from .kernel import build_kernel
from .quantities import BodySpec
from .report import rates_csv, rates_document, rates_text, svg_plot, to_json
from .spectra import QuadratureError, SpectrumError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


class _Fail(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _write(path, text: str) -> None:
    Path(path).write_text(text)


def _rate_row(name, kind, density) -> dict:
    kern = build_kernel(density)
    return {
        "channel": name,
        "kind": kind,
        "rate": density.rate,
        "decoherence_time": math.inf if density.rate == 0 else 1.0 / density.rate,
        "mean_k": kern.mean_k,
        "mean_wavelength": math.inf if kern.mean_k == 0 else kern.mean_wavelength,
    }


def _environment(cfg):
    if not cfg.environment:
        raise _Fail(EXIT_CONFIG, "configuration defines no [[channel]] entries")
    return ch.compose(cfg.environment)


def cmd_rates(args) -> int:
    cfg = load_config(args.config)
    total = _environment(cfg)
    rows = [_rate_row(s.name, s.kind, ch.channel_spectrum(s)) for s in cfg.environment]
    doc = rates_document(rows, _rate_row("total", "composed", total))
    sys.stdout.write(rates_text(doc))
    if args.csv:
        _write(args.csv, rates_csv(doc))
    if args.json:
        _write(args.json, to_json(doc))
    return EXIT_OK


def cmd_kernel(args) -> int:
    cfg = load_config(args.config)
    kern = build_kernel(_environment(cfg))
    if kern.mean_k == 0:
        raise _Fail(EXIT_CONFIG, "spectrum has zero mean wavevector; give --r-min/--r-max explicitly")
    r_min = parse_quantity(args.r_min, "length", "--r-min") if args.r_min else 1e-3 / kern.mean_k
    r_max = parse_quantity(args.r_max, "length", "--r-max") if args.r_max else 1e3 / kern.mean_k
    if not 0 < r_min < r_max:
        raise _Fail(EXIT_CONFIG, f"need 0 < r-min < r-max, got {r_min!r}, {r_max!r}")
    if args.points < 2:
        raise _Fail(EXIT_CONFIG, "--points must be >= 2")
    r = np.geomspace(r_min, r_max, args.points)
    text = kern.csv_text(r)
    if args.output:
        _write(args.output, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_evolve(args) -> int:
    cfg = load_config(args.config)
    exp = cfg.experiment
    if exp.grid is None or exp.time is None:
        raise _Fail(EXIT_CONFIG, "evolve needs [experiment] time and [experiment.grid]")
    kernel = build_kernel(ch.compose(cfg.environment)) if cfg.environment else None
    width = exp.state.width or exp.grid.extent / 32
    rho = init_gaussian(exp.grid, cfg.body.total_mass, exp.state.center, width, exp.state.momentum)
    traj = evolve(rho, kernel, exp.potential, exp.time, exp.grid.dt, stride=cfg.outputs.stride, kinetic=exp.kinetic)
    if cfg.outputs.trajectory:
        traj.to_csv(cfg.outputs.trajectory)
    else:
        sys.stdout.write(traj.csv_text())
    if cfg.outputs.snapshot:
        write_snapshot(cfg.outputs.snapshot, traj.final)
    final = traj.final
    audit = (f"audit: trace-1 = {final.trace() - 1:.3e}, hermiticity = {final.hermiticity_residual():.3e}, "
             f"guard-band mass = {final.guard_mass():.3e}")
    if args.eigen:
        audit += f", min eigenvalue = {final.min_eigenvalue():.3e}"
    print(audit, file=sys.stderr)
    if abs(final.trace() - 1) > 1e-9 or final.hermiticity_residual() > 1e-10:
        raise _Fail(EXIT_NUMERIC, "invariant breach in final state")
    return EXIT_OK


def cmd_feasibility(args) -> int:
    radius = parse_quantity(args.radius, "length", "--radius")
    density = parse_quantity(args.density, "density", "--density")
    temperature = parse_quantity(args.temperature, "temperature", "--temperature")
    delta = parse_quantity(args.delta, "dimensionless", "--delta")
    report = feasibility(BodySpec(radius=radius, mass_density=density), temperature, delta)
    if args.format == "json":
        sys.stdout.write(to_json(report.as_dict()))
    else:
        sys.stdout.write(
            f"radius                {report.radius:.6g} m\n"
            f"temperature           {report.temperature:.6g} K\n"
            f"delta                 {report.delta:.6g}\n"
            f"thermal speed         {report.thermal_speed:.6g} m/s\n"
            f"max de Broglie        {report.wavelength_max:.6g} m\n"
            f"required wavelength   {report.wavelength_required:.6g} m\n"
            f"max radius            {report.radius_max:.6g} m\n"
            f"verdict               {report.verdict}\n")
    return EXIT_OK


def cmd_scenario(args) -> int:
    want_pattern = bool(args.pattern_csv or args.svg)
    result = SCENARIOS[args.name]()
    if want_pattern and result.pattern is None:
        raise _Fail(EXIT_CONFIG, f"scenario {args.name!r} produces no diffraction pattern")
    text = to_json(result.as_dict()) if args.format == "json" else result.to_text()
    sys.stdout.write(text)
    if args.output:
        _write(args.output, text)
    if args.pattern_csv:
        result.pattern.to_csv(args.pattern_csv)
    if args.svg:
        pat = result.pattern
        _write(args.svg, svg_plot(
            [("no decoherence", pat.momentum / pat.order_momentum, pat.probability),
             ("with decoherence", pat.momentum / pat.order_momentum, pat.probability_decohered)],
            xlabel="transverse momentum / (2 pi hbar / d)", ylabel="probability", title=f"{args.name} grating"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="decobolt", description="Collisional decoherence of a body's centre of mass.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("rates", help="per-channel and total collision rates")
    p.add_argument("config")
    p.add_argument("--csv", metavar="PATH")
    p.add_argument("--json", metavar="PATH")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("kernel", help="tabulate gamma(r) as CSV")
    p.add_argument("config")
    p.add_argument("--r-min", help="smallest separation (default 1e-3 / kbar)")
    p.add_argument("--r-max", help="largest separation (default 1e3 / kbar)")
    p.add_argument("--points", type=int, default=61)
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("evolve", help="propagate a Gaussian density matrix")
    p.add_argument("config")
    p.add_argument("--eigen", action="store_true", help="include the O(N^3) eigenvalue check in the audit")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("feasibility", help="interference size bound")
    p.add_argument("--radius", required=True)
    p.add_argument("--density", required=True)
    p.add_argument("--temperature", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("scenario", help="run a built-in case study")
    p.add_argument("name", choices=sorted(SCENARIOS))
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", metavar="PATH")
    p.add_argument("--pattern-csv", metavar="PATH")
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=cmd_scenario)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as exc:
        print(f"decobolt: {exc}", file=sys.stderr)
        return exc.code
    except (QuadratureError, EvolutionError) as exc:
        print(f"decobolt: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, SpectrumError, ValueError, OSError) as exc:
        print(f"decobolt: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
