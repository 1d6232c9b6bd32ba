"""
Command-line driver.

    perarfima SUBCOMMAND [options]

Subcommands: simulate, acvf, theory, companion, matrices, figures, appendix-ma.
Output goes to ``--out`` (default stdout) as CSV or JSON.

Exit status: 0 on success, 2 on invalid input (bad flags, unreadable or
invalid model spec, nonstationary parameters), 3 on numerical failure.
"""
import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .acvf import (Pacvf, asymptotic_pacvf, exact_pacvf, fivar_amplitudes,
                   monte_carlo_pacvf, varfi_amplitudes)
from .appendixma import ma_recursion
from .exceptions import NumericalError, SpecError
from .fracdiff import DEFAULT_TRUNCATION
from .parmodel import (ModelKind, PeriodicModelSpec, build_companion,
                       check_stationary, is_stationary, pi_total,
                       stationarity_roots)
from .presets import FIGURE_TARGETS
from .simulate import DEFAULT_BURNIN, simulate, simulate_many

logger = logging.getLogger("perarfima")

__all__ = ["RunConfig", "main", "build_parser", "EXIT_OK", "EXIT_INVALID", "EXIT_NUMERICAL"]

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

SUBCOMMANDS = ("simulate", "acvf", "theory", "companion", "matrices", "figures", "appendix-ma")
MATRIX_TARGETS = ("m41", "m42")


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    spec_path: str | None = None
    output_path: str | None = None
    T: int = 1000
    Jmax: int = 100
    M: int = DEFAULT_TRUNCATION
    burnin: int = DEFAULT_BURNIN
    seed: int = 1
    replications: int = 1
    format: str = "csv"
    target: str | None = None
    d: tuple | None = None

    @classmethod
    def from_args(cls, ns: argparse.Namespace) -> "RunConfig":
        return cls(subcommand=ns.command, spec_path=ns.spec, output_path=ns.out,
                   T=ns.T, Jmax=ns.jmax, M=ns.trunc, burnin=ns.burnin, seed=ns.seed,
                   replications=ns.reps, format=ns.format, target=ns.target,
                   d=getattr(ns, "d", None))

    def load_spec(self) -> PeriodicModelSpec:
        if not self.spec_path:
            raise SpecError(f"{self.subcommand}: --spec is required")
        path = Path(self.spec_path)
        if not path.is_file():
            raise SpecError(f"spec file {path} not found")
        return PeriodicModelSpec.from_json(path)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _num(x):
    x = float(x)
    return repr(x) if np.isfinite(x) else ""


def _json_num(x):
    x = float(x)
    return x if np.isfinite(x) else None


def _json_grid(a):
    return [[_json_num(v) for v in row] for row in np.asarray(a)]


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path and cfg.output_path != "-":
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


PACVF_HEADER = ["s", "j", "h", "nu", "delta", "gamma", "method"]


def _pacvf_rows(pacv: Pacvf, se=None, lead=()):
    for s, j, h, nu, delta, g in pacv.rows():
        row = [*lead, s, j, h, nu, delta, _num(g), pacv.method.value]
        if se is not None:
            row.append(_num(se[s - 1, j]))
        yield row


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_simulate(cfg: RunConfig) -> int:
    spec = cfg.load_spec()
    if cfg.replications == 1:
        samples = [simulate(spec, cfg.T, seed=cfg.seed, burnin=cfg.burnin, M=cfg.M)]
    else:
        samples = simulate_many(spec, cfg.T, cfg.replications, seed=cfg.seed,
                                burnin=cfg.burnin, M=cfg.M)
    if cfg.format == "json":
        payload = {"S": spec.S, "model": spec.kind.value, "T": cfg.T, "seed": cfg.seed,
                   "burnin": cfg.burnin, "M": cfg.M,
                   "replications": [smp.values.tolist() for smp in samples]}
        text = json.dumps(payload) + "\n"
    elif len(samples) == 1:
        text = samples[0].to_csv()
    else:
        rows = ((r, t, int(season), repr(float(v)))
                for r, smp in enumerate(samples, start=1)
                for t, (season, v) in enumerate(zip(smp.seasons, smp.values), start=1))
        text = _csv_text(["rep", "t", "season", "value"], rows)
    _emit(cfg, text)
    return EXIT_OK


def cmd_acvf(cfg: RunConfig) -> int:
    spec = cfg.load_spec()
    mean, se = monte_carlo_pacvf(spec, cfg.T, cfg.replications, cfg.Jmax, seed=cfg.seed,
                                 burnin=cfg.burnin, M=cfg.M)
    if cfg.format == "json":
        text = json.dumps({"S": spec.S, "method": mean.method.value, "T": cfg.T,
                           "replications": cfg.replications, "seed": cfg.seed,
                           "gamma": _json_grid(mean.gamma), "se": _json_grid(se)}) + "\n"
    else:
        text = _csv_text(PACVF_HEADER + ["se"], _pacvf_rows(mean, se))
    _emit(cfg, text)
    return EXIT_OK


def cmd_theory(cfg: RunConfig) -> int:
    spec = cfg.load_spec()
    exact = exact_pacvf(spec, cfg.Jmax, M=cfg.M)
    asym = asymptotic_pacvf(spec, cfg.Jmax)
    if cfg.format == "json":
        text = json.dumps({"S": spec.S, "M": cfg.M,
                           "exact": _json_grid(exact.gamma),
                           asym.method.value: _json_grid(asym.gamma)}) + "\n"
    else:
        rows = [*_pacvf_rows(exact), *_pacvf_rows(asym)]
        text = _csv_text(PACVF_HEADER, rows)
    _emit(cfg, text)
    return EXIT_OK


def cmd_companion(cfg: RunConfig) -> int:
    spec = cfg.load_spec()
    c = build_companion(spec)
    roots = stationarity_roots(c)
    stationary = is_stationary(spec)
    named = {"Phi0": c.Phi0, **{f"Phi{i + 1}": m for i, m in enumerate(c.Phi)}}
    if stationary:
        named["Pi"] = pi_total(c)
    if cfg.format == "json":
        payload = {"S": c.S, "P": c.P, "stationary": stationary,
                   "root_moduli": roots.tolist(),
                   **{k: v.tolist() for k, v in named.items()}}
        text = json.dumps(payload) + "\n"
    else:
        rows = [[name, r + 1, col + 1, _num(v)]
                for name, m in named.items() for (r, col), v in np.ndenumerate(m)]
        rows += [["root_modulus", i + 1, "", _num(v)] for i, v in enumerate(roots)]
        text = _csv_text(["matrix", "row", "col", "value"], rows)
    _emit(cfg, text)
    return EXIT_OK


def cmd_matrices(cfg: RunConfig) -> int:
    spec = cfg.load_spec()
    check_stationary(spec)
    if cfg.target not in (None, *MATRIX_TARGETS):
        raise SpecError(f"matrices: --target must be one of {MATRIX_TARGETS}")
    grids = {}
    if cfg.target in (None, "m41"):
        grids["fivar"] = fivar_amplitudes(spec)
    if cfg.target in (None, "m42"):
        grids["varfi"] = varfi_amplitudes(spec)
    if cfg.format == "json":
        text = json.dumps({k: v.tolist() for k, v in grids.items()}) + "\n"
    else:
        rows = [[name, r + 1, col + 1, _num(v)]
                for name, m in grids.items() for (r, col), v in np.ndenumerate(m)]
        text = _csv_text(["grid", "row", "col", "value"], rows)
    _emit(cfg, text)
    return EXIT_OK


def _figure_spec(base: PeriodicModelSpec, kind: str, D) -> PeriodicModelSpec:
    if base.S != len(D):
        raise SpecError(f"figure targets need S = {len(D)} seasons, spec has S = {base.S}")
    kind = ModelKind(kind)
    if kind is ModelKind.A:
        return base.replace(p=0, phi=np.zeros((base.S, 0)), D=D, kind=kind)
    return base.replace(D=D, kind=kind)


def cmd_figures(cfg: RunConfig) -> int:
    base = cfg.load_spec()
    if cfg.target is not None and cfg.target not in FIGURE_TARGETS:
        raise SpecError(f"figures: unknown --target {cfg.target!r}; "
                        f"choose from {', '.join(FIGURE_TARGETS)}")
    names = [cfg.target] if cfg.target else list(FIGURE_TARGETS)
    records = []
    for name in names:
        target = FIGURE_TARGETS[name]
        for kind in target.kinds:
            spec = _figure_spec(base, kind, target.D)
            # same seed for every model of a target: common innovations
            emp, se = monte_carlo_pacvf(spec, cfg.T, cfg.replications, target.jmax,
                                        seed=cfg.seed, burnin=cfg.burnin, M=cfg.M)
            records.append((name, kind, "empirical", emp, se))
            records.append((name, kind, "exact", exact_pacvf(spec, target.jmax, M=cfg.M), None))
            records.append((name, kind, "asymptotic", asymptotic_pacvf(spec, target.jmax), None))
    if cfg.format == "json":
        payload = [{"figure": n, "model": k, "source": src, "D": list(FIGURE_TARGETS[n].D),
                    "method": p.method.value, "gamma": _json_grid(p.gamma),
                    **({"se": _json_grid(se)} if se is not None else {})}
                   for n, k, src, p, se in records]
        text = json.dumps(payload) + "\n"
    else:
        rows = []
        for n, k, src, p, se in records:
            for s, j, h, nu, delta, g in p.rows():
                if j == 0:
                    continue
                rows.append([n, k, src, s, j, h, nu, delta, _num(g),
                             _num(se[s - 1, j]) if se is not None else ""])
        text = _csv_text(["figure", "model", "source", "s", "j", "h", "nu", "delta",
                          "gamma", "se"], rows)
    _emit(cfg, text)
    return EXIT_OK


def cmd_appendix_ma(cfg: RunConfig) -> int:
    if cfg.d is not None:
        d = cfg.d
    else:
        d = cfg.load_spec().D
    table = ma_recursion(d, cfg.Jmax)
    if cfg.format == "json":
        text = json.dumps({"S": table.S, "d": table.d.tolist(),
                           "psi": table.psi.tolist()}) + "\n"
    else:
        text = table.to_csv()
    _emit(cfg, text)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "acvf": cmd_acvf,
    "theory": cmd_theory,
    "companion": cmd_companion,
    "matrices": cmd_matrices,
    "figures": cmd_figures,
    "appendix-ma": cmd_appendix_ma,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _nonnegative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _orders(text):
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", metavar="PATH", help="JSON model spec")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--T", type=_positive, default=1000, metavar="N",
                        help="sample length (default 1000)")
    common.add_argument("--jmax", type=_nonnegative, default=100, metavar="N",
                        help="largest lag (default 100)")
    common.add_argument("--trunc", type=_nonnegative, default=DEFAULT_TRUNCATION, metavar="M",
                        help=f"MA truncation (default {DEFAULT_TRUNCATION})")
    common.add_argument("--burnin", type=_nonnegative, default=DEFAULT_BURNIN, metavar="N",
                        help=f"discarded blocks (default {DEFAULT_BURNIN})")
    common.add_argument("--seed", type=int, default=1, metavar="N", help="RNG seed (default 1)")
    common.add_argument("--reps", type=_positive, default=1, metavar="N",
                        help="replications (default 1)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--target", metavar="NAME",
                        help="figures: fig1..fig8, figB, figC; matrices: m41, m42")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="perarfima",
        description="Periodic long-memory models: simulation, autocovariances, reproduction targets.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "simulate": "simulate a series (CSV t,season,value)",
        "acvf": "mean empirical periodic autocovariances over replications",
        "theory": "exact and asymptotic periodic autocovariances",
        "companion": "stacked AR matrices, root moduli and Phi(1)^-1",
        "matrices": "FIVAR and VARFI amplitude grids",
        "figures": "plot-ready data for the figure targets",
        "appendix-ma": "moving-average weights of the periodic fractional difference",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common], help=helps[name])
        if name == "appendix-ma":
            p.add_argument("--d", type=_orders, metavar="D1,D2,...",
                           help="seasonal orders (default: D of --spec)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = RunConfig.from_args(ns)
    try:
        return COMMANDS[cfg.subcommand](cfg)
    except (SpecError, ValueError) as exc:
        print(f"perarfima {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"perarfima {cfg.subcommand}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error of ours
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except OSError as exc:
        print(f"perarfima {cfg.subcommand}: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
