"""Command-line interface: CSV/JSON emission for computations and checks."""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import __version__
from .charfun import CharExponent, SemistableSpec
from .density import semistable_density
from .duality import (check_lt_identity, check_semi_duality, check_space_time, check_zolotarev,
                      load_tolerances, parallel_map)
from .laplace import LaplaceSystem, f_func, g_func, gamma_func, xi
from .pde import Grid1D, exact_transport, residual_semifrac_space, solve_time_fractional_transport
from .spectrum import extract_spectrum

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3


class ConfigError(Exception):
    pass


def fmt(v) -> str:
    """Shortest round-trip decimal (at most 17 significant digits)."""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return repr(float(v))


def csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(fmt(v) if not isinstance(v, str) else v for v in row) + "\n")
    return buf.getvalue()


@dataclass(frozen=True)
class RunConfig:
    spec: SemistableSpec
    spec_path: str | None
    out: str | None
    threads: int
    manifest: dict


def parse_grid(text: str) -> list[float]:
    """``a,b,c`` or ``start:stop:num`` (inclusive, linearly spaced)."""
    text = text.strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, num = text.split(":")
            n = int(num)
            if n < 1:
                return []
            return [float(v) for v in np.linspace(float(start), float(stop), n)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}: {exc}") from None


def _nonempty(name: str, grid: list[float]) -> list[float]:
    if not grid:
        raise ConfigError(f"grid {name} is empty")
    return grid


def load_config(args) -> RunConfig:
    if args.spec:
        try:
            with open(args.spec) as fh:
                spec = SemistableSpec.from_json(json.load(fh))
        except FileNotFoundError:
            raise ConfigError(f"spec file not found: {args.spec}") from None
        except (ValueError, KeyError, TypeError) as exc:
            raise ConfigError(f"invalid spec {args.spec}: {exc}") from None
    else:
        spec = SemistableSpec.default()
    if args.threads < 1:
        raise ConfigError("--threads must be >= 1")
    try:
        manifest = load_tolerances(args.tol_manifest)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"invalid tolerance manifest: {exc}") from None
    if args.out:
        parent = os.path.dirname(os.path.abspath(args.out))
        if not os.path.isdir(parent) or not os.access(parent, os.W_OK) or (
                os.path.exists(args.out) and not os.access(args.out, os.W_OK)):
            raise ConfigError(f"output path not writable: {args.out}")
    return RunConfig(spec, args.spec, args.out, args.threads, manifest)


def emit(cfg: RunConfig, text: str, meta: dict) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    try:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        with open(cfg.out + ".meta.json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
    except OSError as exc:
        raise ConfigError(f"cannot write {cfg.out}: {exc}") from None


def _rows_with_failures(fn: Callable, items: list, threads: int):
    """Evaluate ``fn`` on items; failures become NaN with a marker."""
    def safe(item):
        try:
            return fn(item), None
        except (ArithmeticError, RuntimeError, ValueError) as exc:
            return math.nan, str(exc)

    return parallel_map(safe, items, threads)


def _table(header, items, results):
    failed = any(err for _, err in results)
    head = list(header) + (["failed"] if failed else [])
    rows = []
    for item, (val, err) in zip(items, results):
        vals = list(val) if isinstance(val, tuple) else [val]
        if err and len(vals) < len(header) - len(item):
            vals = vals + [math.nan] * (len(header) - len(item) - len(vals))
        row = list(item) + vals
        if failed:
            row.append(1 if err else 0)
        rows.append(row)
    return csv_text(head, rows), failed


def cmd_density(cfg: RunConfig, args) -> int:
    xs = _nonempty("x", parse_grid(args.x))
    ts = _nonempty("t", parse_grid(args.t))
    if min(ts) <= 0:
        raise ConfigError("times must be positive")
    ce = CharExponent(cfg.spec)
    items = [(x, t) for x in xs for t in ts]
    res = _rows_with_failures(lambda p: semistable_density(ce, p[0], p[1]), items, cfg.threads)
    text, failed = _table(["x", "t", "value"], items, res)
    emit(cfg, text, {"command": "density", "rows": len(items)})
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_figure1(cfg: RunConfig, args) -> int:
    if not 1 < args.alpha < 2:
        raise ConfigError("alpha must lie in (1, 2)")
    if not args.t0 > 0:
        raise ConfigError("t0 must be positive")
    dx = {"coarse": 0.05, "fine": 0.02}[args.mode]
    grid = Grid1D.for_transport(1 / args.alpha, dx, args.t0, 4.0)
    try:
        h = solve_time_fractional_transport(1 / args.alpha, grid).at_time()
        p = np.array(parallel_map(lambda x: exact_transport(args.alpha, x, args.t0)[0],
                                  list(grid.x), cfg.threads)) / args.alpha
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    rows = [(x, pv, hv, hv / pv) for x, pv, hv in zip(grid.x, p, h)]
    emit(cfg, csv_text(["x", "p", "h", "ratio"], rows),
         {"command": "figure1", "mode": args.mode, "dx": dx, "dt": grid.dt, "steps": grid.nt})
    return EXIT_OK


def cmd_xi_table(cfg: RunConfig, args) -> int:
    ss = _nonempty("s", parse_grid(args.s))
    if min(ss) <= 0:
        raise ConfigError("s must be positive")
    ls = LaplaceSystem(CharExponent(cfg.spec))
    items = [(s,) for s in ss]

    def row(p):
        s, y = p[0], math.log(p[0])
        return (float(xi(ls, s)), float(g_func(ls, y)), float(f_func(ls, s)),
                float(gamma_func(ls, y)))

    res = _rows_with_failures(row, items, cfg.threads)
    text, failed = _table(["s", "xi", "g_of_log_s", "f", "gamma_of_log_s"], items, res)
    emit(cfg, text, {"command": "xi-table", "rows": len(items)})
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_spectrum(cfg: RunConfig, args) -> int:
    try:
        result = extract_spectrum(LaplaceSystem(CharExponent(cfg.spec)), n_max=args.n_max)
    except (ArithmeticError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    emit(cfg, json.dumps(result.to_json(), indent=2, sort_keys=True) + "\n",
         {"command": "spectrum"})
    return EXIT_OK


def cmd_residuals(cfg: RunConfig, args) -> int:
    xs = _nonempty("x", parse_grid(args.x))
    ts = _nonempty("t", parse_grid(args.t))
    ce = CharExponent(cfg.spec)
    if args.kind == "space":
        tol = float(cfg.manifest["semifrac_space"]["tolerance"])
        items = [(x, t) for x in xs for t in ts]
        res = _rows_with_failures(
            lambda p: (lambda r: (r.residual, r.scale, tol))(residual_semifrac_space(ce, *p)),
            items, cfg.threads)
        text, failed = _table(["x", "t", "residual", "scale", "tolerance"], items, res)
    else:
        if min(xs) <= 0:
            raise ConfigError("time residuals need x > 0")
        try:
            report = check_semi_duality(cfg.spec, xs, ts, manifest=cfg.manifest)
        except (ArithmeticError, RuntimeError) as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        rows = sorted((x, t, r, s, report.tolerance) for x, t, r, s in report.details["residuals"])
        text, failed = csv_text(["x", "t", "residual", "scale", "tolerance"], rows), False
    emit(cfg, text, {"command": "residuals", "kind": args.kind})
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    spec, m, th = cfg.spec, cfg.manifest, cfg.threads
    suites = [
        ("zolotarev",
         lambda: check_zolotarev(spec.alpha, np.linspace(0.1, 5, 25), [0.5, 1, 2], m, th)),
        ("space_time", lambda: check_space_time(spec.alpha, 3.5, manifest=m)),
        ("lt_identity", lambda: check_lt_identity(spec, [0.5, 1, 2], [0.5, 1, 2, 5], m, th)),
        ("semi_duality", lambda: check_semi_duality(spec, [0.5, 1, 2], [1, 2, 4], manifest=m)),
    ]
    reports, numeric = [], False
    for name, run in suites:
        try:
            reports.append(run().to_json())
        except (ArithmeticError, RuntimeError) as exc:
            numeric = True
            reports.append({"name": name, "passed": False,
                            "failed": True, "error": str(exc)})
    runtimes = {r["name"]: r.pop("runtime", None) for r in reports}
    emit(cfg, json.dumps(reports, indent=2, sort_keys=True) + "\n",
         {"command": "verify", "runtimes": runtimes})
    if args.points_csv:
        rows = []
        for r in reports:
            for x, t, res, scale in r.get("details", {}).get("residuals", []):
                rows.append((r["name"], x, t, res, scale))
        with open(args.points_csv, "w") as fh:
            fh.write(csv_text(["suite", "x", "t", "residual", "scale"], rows))
    if numeric:
        return EXIT_NUMERIC
    return EXIT_OK if all(r["passed"] for r in reports) else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    def globals_(suppress: bool) -> argparse.ArgumentParser:
        # global flags are accepted before or after the command; the copy on
        # subcommands suppresses defaults so it cannot clobber earlier values
        g = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
        d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
        g.add_argument("--spec", default=d(None),
                       help="semistable spec JSON (default: built-in default spec)")
        g.add_argument("--out", default=d(None), help="output file (default: stdout)")
        g.add_argument("--threads", type=int, default=d(1))
        g.add_argument("--tol-manifest", default=d(None), help="tolerance manifest JSON")
        return g

    common = globals_(True)
    parser = argparse.ArgumentParser(prog="semifrac", parents=[globals_(False)],
                                     allow_abbrev=False,
                                     description="Semi-fractional calculus toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", parents=[common], allow_abbrev=False, help="semistable density table")
    p.add_argument("--x", default="0")
    p.add_argument("--t", default="1")
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("figure1", parents=[common], allow_abbrev=False, help="h/p ratio of the transport solver")
    p.add_argument("--alpha", type=float, default=1.5)
    p.add_argument("--t0", type=float, default=3.5)
    p.add_argument("--mode", choices=["coarse", "fine"], default="coarse")
    p.set_defaults(func=cmd_figure1)

    p = sub.add_parser("xi-table", parents=[common], allow_abbrev=False, help="xi, g, f and gamma on an s grid")
    p.add_argument("--s", default="0.5,1,2,5")
    p.set_defaults(func=cmd_xi_table)

    p = sub.add_parser("spectrum", parents=[common], allow_abbrev=False, help="g/gamma coefficients, tau and rho")
    p.add_argument("--n-max", type=int, default=16)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("residuals", parents=[common], allow_abbrev=False, help="PDE residual table")
    p.add_argument("--kind", choices=["space", "time"], default="space")
    p.add_argument("--x", default="-1,0,1")
    p.add_argument("--t", default="1")
    p.set_defaults(func=cmd_residuals)

    p = sub.add_parser("verify", parents=[common], allow_abbrev=False, help="run the duality suites")
    p.add_argument("--points-csv", help="also write per-point residuals here")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        cfg = load_config(args)
        code = args.func(cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{args.command}: done in {time.perf_counter() - start:.2f} s "
          f"(python {platform.python_version()})", file=sys.stderr)
    return code


def run() -> None:
    sys.exit(main())
