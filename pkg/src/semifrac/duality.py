"""Verification suites for the duality identities."""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, Iterable, Sequence

import numpy as np

from .charfun import CharExponent, SemistableSpec, StableParams
from .density import semistable_density, stable_density
from .laplace import LaplaceSystem, lt_closed_form, lt_numeric
from .pde import (Grid1D, coarsen, exact_transport, h_paths, solve_time_fractional_transport,
                  time_residuals)
from .periodic import cosine_series
from .spectrum import SpectrumResult, extract_spectrum


def load_tolerances(path: str | None = None) -> dict:
    """Tolerance manifest; the packaged one unless ``path`` is given."""
    if path is None:
        text = resources.files("semifrac").joinpath("tolerances.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = json.loads(text)
    for name, entry in data.items():
        if "tolerance" not in entry:
            raise ValueError(f"manifest entry {name!r} has no tolerance")
    return data


def _tol(manifest: dict | None, name: str) -> float:
    return float((manifest or load_tolerances())[name]["tolerance"])


def parallel_map(fn: Callable, items: Sequence, threads: int = 1) -> list:
    """Ordered map; serial when ``threads == 1``."""
    if threads < 1:
        raise ValueError("threads must be >= 1")
    if threads == 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class DualityReport:
    name: str
    grid: str
    max_rel_error: float
    worst_point: tuple
    tolerance: float
    passed: bool
    runtime: float
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "grid": self.grid, "max_rel_error": self.max_rel_error,
                "worst_point": list(self.worst_point), "tolerance": self.tolerance,
                "passed": self.passed, "runtime": self.runtime, "details": self.details}


def _worst(errors: Sequence[float], points: Sequence[tuple]) -> tuple[float, tuple]:
    i = int(np.argmax(errors))
    return float(errors[i]), tuple(points[i])


def zolotarev_sides(alpha: float, x: float, t: float) -> tuple[float, float]:
    """Both sides of the Zolotarev identity at ``(x, t)``; ``alpha = 2`` uses
    the Gaussian closed form on the left."""
    cos_a = abs(math.cos(alpha * math.pi / 2))
    left = StableParams(alpha, -1.0, (cos_a * t) ** (1 / alpha), 0.0,
                        gaussian_oracle=alpha == 2.0)
    if alpha == 2.0:
        sigma = left.sigma
        lhs = math.exp(-x * x / (4 * sigma**2)) / math.sqrt(4 * math.pi * sigma**2)
    else:
        lhs = stable_density(left, x)
    right = StableParams(1 / alpha, 1.0, abs(math.cos(math.pi / (2 * alpha))) ** alpha, 0.0)
    rhs = t * x ** (-1 - alpha) * stable_density(right, t * x ** (-alpha))
    return lhs, rhs


def check_zolotarev(alpha: float, x_grid: Iterable[float], t_grid: Iterable[float],
                    manifest: dict | None = None, threads: int = 1) -> DualityReport:
    if not (1 < alpha < 2 or alpha == 2.0):
        raise ValueError("alpha must lie in (1, 2], 2 being the Gaussian oracle case")
    start = time.perf_counter()
    points = [(float(x), float(t)) for t in t_grid for x in x_grid]
    if not points or min(p[0] for p in points) <= 0:
        raise ValueError("grids must be non-empty with x > 0")

    def gap(p):
        lhs, rhs = zolotarev_sides(alpha, *p)
        return abs(lhs - rhs) / abs(lhs)

    errors = parallel_map(gap, points, threads)
    err, worst = _worst(errors, points)
    tol = _tol(manifest, "zolotarev")
    return DualityReport(f"zolotarev(alpha={alpha})", f"{len(points)} (x, t) points", err,
                         worst, tol, err <= tol, time.perf_counter() - start)


FINE_DX = 0.02
COARSE_DX = 0.05


def space_time_ratios(alpha: float, t0: float, dx: float, x_max: float,
                      x_points: Sequence[float]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Solver ``h`` and exact ``p`` at ``x_points`` (snapped to the grid)."""
    grid = Grid1D.for_transport(1 / alpha, dx, t0, x_max)
    h = solve_time_fractional_transport(1 / alpha, grid).at_time()
    idx = np.array([int(round(x / dx)) for x in x_points])
    xs = grid.x[idx]
    p = exact_transport(alpha, xs, t0) / alpha
    return xs, h[idx], p


def check_space_time(alpha: float = 1.5, t0: float = 3.5, x_grid: Sequence[float] | None = None,
                     manifest: dict | None = None) -> DualityReport:
    """Fine-grid agreement ``h / (alpha p)`` on ``[0, 2]`` plus the coarse
    grid drift endpoint of ``h / p`` at ``x = 4``."""
    if not 1 < alpha < 2:
        raise ValueError("alpha must lie in (1, 2)")
    start = time.perf_counter()
    x_grid = np.round(np.arange(0, 2.0001, 0.1), 10) if x_grid is None else np.asarray(x_grid)
    xs, h, p = space_time_ratios(alpha, t0, FINE_DX, 2.0, x_grid)
    rel = np.abs(h / (alpha * p) - 1)
    err, worst = _worst(rel, [(x, t0) for x in xs])
    tol = _tol(manifest, "space_time_fine")
    cx, ch, cp = space_time_ratios(alpha, t0, COARSE_DX, 4.0, [0, 1, 2, 3, 4])
    coarse = ch / cp
    entry = (manifest or load_tolerances())["space_time_coarse_endpoint"]
    drift_gap = abs(coarse[-1] - entry["target"])
    coarse_ok = drift_gap <= entry["tolerance"]
    details = {"fine_dx": FINE_DX, "coarse_dx": COARSE_DX,
               "fine_ratio_at_0": float(h[0] / p[0]),
               "coarse_x": [float(v) for v in cx], "coarse_ratio": [float(v) for v in coarse],
               "coarse_endpoint_target": entry["target"], "coarse_endpoint_gap": float(drift_gap),
               "coarse_endpoint_tolerance": entry["tolerance"], "coarse_passed": bool(coarse_ok),
               "fine_passed": bool(err <= tol)}
    return DualityReport(f"space_time(alpha={alpha})",
                         f"fine dx={FINE_DX} on [0,2]; coarse dx={COARSE_DX} on [0,4]; t0={t0}",
                         err, worst, tol, bool(err <= tol and coarse_ok),
                         time.perf_counter() - start, details)


def check_lt_identity(spec: SemistableSpec, x_grid: Iterable[float], s_grid: Iterable[float],
                      manifest: dict | None = None, threads: int = 1) -> DualityReport:
    start = time.perf_counter()
    ce = CharExponent(spec)
    ls = LaplaceSystem(ce)
    points = [(float(x), float(s)) for x in x_grid for s in s_grid]
    if not points:
        raise ValueError("empty grid")

    def run(p):
        x, s = p
        num = lt_numeric(lambda xx, tt: semistable_density(ce, xx, tt), x, s)
        closed = lt_closed_form(ls, x, s)
        control = lt_closed_form(ls, x, s, drop_f=True)
        return abs(num - closed) / closed, abs(num - control) / control

    res = parallel_map(run, points, threads)
    gaps = [r[0] for r in res]
    controls = [r[1] for r in res]
    err, worst = _worst(gaps, points)
    tol = _tol(manifest, "lt_identity_stable" if spec.is_stable else "lt_identity")
    details = {"control_max_gap": max(controls)}
    passed = err <= tol
    if not spec.is_stable:
        factor = max(controls) / max(err, 1e-300)
        need = _tol(manifest, "lt_control_factor")
        details.update(control_factor=factor, control_passed=bool(factor >= need))
        passed = passed and factor >= need
    return DualityReport("lt_identity", f"{len(points)} (x, s) points", err, worst, tol,
                         bool(passed), time.perf_counter() - start, details)


def stable_kernel(alpha: float, period: float):
    """The constant kernel ``1 / Gamma(1 - 1/alpha)`` of the stable case."""
    return cosine_series(1 / math.gamma(1 - 1 / alpha), {}, period)


def check_semi_duality(spec: SemistableSpec, x_grid: Sequence[float], t_grid: Sequence[float],
                       spectrum: SpectrumResult | None = None, dt: float = 1e-3,
                       dx: float = 0.02, manifest: dict | None = None) -> DualityReport:
    """Residuals of the dual equation with ``h = alpha p`` at steps
    ``(dt, dx)`` and ``(dt/2, dx/2)``, plus the stable-kernel control."""
    start = time.perf_counter()
    if min(x_grid) <= 0:
        raise ValueError("x grid must be strictly positive")
    ce = CharExponent(spec)
    if spectrum is None:
        spectrum = extract_spectrum(LaplaceSystem(ce))
    gamma = 1 / spec.alpha
    fine = h_paths(ce, x_grid, max(t_grid), dt / 2, dx / 2, offsets=(-4, -2, -1, 0, 1, 2, 4))
    coarse = coarsen(fine)
    res_c = time_residuals(coarse, spectrum.tau, gamma, t_grid)
    res_f = time_residuals(fine, spectrum.tau, gamma, t_grid)
    rel_c = [r.relative for r in res_c]
    rel_f = [r.relative for r in res_f]
    points = [(r.x, r.t) for r in res_c]
    err, worst = _worst(rel_c, points)
    improvement = err / max(max(rel_f), 1e-300)
    tol = _tol(manifest, "semi_duality")
    need_ref = _tol(manifest, "semi_duality_refinement")
    passed = err <= tol and improvement >= need_ref
    details = {"dt": dt, "dx": dx, "fine_max_rel": max(rel_f), "refinement_factor": improvement,
               "refinement_passed": bool(improvement >= need_ref),
               "residuals": [[r.x, r.t, r.residual, r.scale] for r in res_c],
               "tau_report": spectrum.tau_report.to_json(),
               "rho_report": spectrum.rho_report.to_json()}
    if not spec.is_stable:
        control = time_residuals(coarse, stable_kernel(spec.alpha, spectrum.tau.period),
                                 gamma, t_grid)
        factors = [c.relative / max(r, 1e-300) for c, r in zip(control, rel_c)]
        need = _tol(manifest, "semi_duality_control_factor")
        details.update(control_min_factor=min(factors),
                       control_passed=bool(min(factors) >= need))
        passed = passed and min(factors) >= need
    return DualityReport("semi_duality", f"x={list(x_grid)} t={list(t_grid)} dt={dt} dx={dx}",
                         err, worst, tol, bool(passed), time.perf_counter() - start, details)
