"""Time-fractional transport solver and residual checks for the
semi-fractional equations."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .charfun import CharExponent
from .density import semistable_density, semistable_density_grid, stable_pde_solution
from .fracops import FracOrder, SampledPath, gl_weights, semifrac_caputo, semifrac_space_generator
from .periodic import PeriodicFunction
from .spectrum import SpectrumResult

CFL_LIMIT = 0.5
BLOWUP = 1e6


class InstabilityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Grid1D:
    x_min: float
    x_max: float
    dx: float
    dt: float
    t_end: float

    def __post_init__(self):
        if not (self.dx > 0 and self.dt > 0 and self.t_end > 0):
            raise ValueError("dx, dt and t_end must be positive")
        if not (self.x_min == 0 or self.x_min < 0 <= self.x_max):
            raise ValueError("domain must start at 0 or contain it")
        if not self.x_max > self.x_min:
            raise ValueError("empty spatial domain")

    @classmethod
    def for_transport(cls, gamma, dx: float, t_end: float, x_max: float,
                      ratio: float = CFL_LIMIT) -> "Grid1D":
        """Grid on ``[0, x_max]`` with the largest ``dt <= (ratio dx)^(1/gamma)``
        dividing ``t_end``."""
        g = FracOrder(gamma).gamma if not isinstance(gamma, FracOrder) else gamma.gamma
        steps = math.ceil(t_end / (ratio * dx) ** (1 / g) - 1e-9)
        return cls(0.0, x_max, dx, t_end / steps, t_end)

    @property
    def nx(self) -> int:
        return int(round((self.x_max - self.x_min) / self.dx)) + 1

    @property
    def nt(self) -> int:
        return int(round(self.t_end / self.dt))

    @property
    def x(self) -> np.ndarray:
        return self.x_min + np.arange(self.nx) * self.dx

    @property
    def t(self) -> np.ndarray:
        return np.arange(self.nt + 1) * self.dt


@dataclass(frozen=True)
class Field:
    grid: Grid1D
    values: np.ndarray  # (time step, space index)

    @property
    def mass(self) -> np.ndarray:
        """Discrete mass ``dx * sum_i h_i`` at every time step.

        The point source sits in a boundary cell, so cell sums (not the
        trapezoid rule, which halves that cell) give unit initial mass.
        """
        return self.values.sum(axis=1) * self.grid.dx

    def at_time(self, n: int = -1) -> np.ndarray:
        return self.values[n]


def solve_time_fractional_transport(gamma, grid: Grid1D, check_cfl: bool = True) -> Field:
    """Explicit Grunwald-Letnikov scheme for ``D_t^gamma h = -h_x`` (Caputo)
    on ``x >= 0`` from a unit point source in the first cell."""
    g = gamma.gamma if isinstance(gamma, FracOrder) else FracOrder(gamma).gamma
    if grid.x_min != 0:
        raise ValueError("transport solver works on [0, x_max]")
    r = grid.dt**g / grid.dx
    if check_cfl and r > CFL_LIMIT * (1 + 1e-12):
        raise ValueError(f"CFL violation: dt^gamma/dx = {r:.4g} exceeds {CFL_LIMIT}")
    nt, nx = grid.nt, grid.nx
    w = gl_weights(g, nt)
    h0 = np.zeros(nx)
    h0[0] = 1.0 / grid.dx
    limit = BLOWUP * h0.sum() * grid.dx
    dev = np.zeros((nt + 1, nx))  # h^n - h^0
    for n in range(1, nt + 1):
        prev = h0 + dev[n - 1]
        flux = prev.copy()
        flux[1:] -= prev[:-1]
        dev[n] = -(w[n:0:-1] @ dev[:n]) - r * flux
        if not np.all(np.isfinite(dev[n])) or np.abs(dev[n]).max() > limit:
            raise InstabilityError(
                f"scheme blew up at step {n}: CFL ratio dt^gamma/dx = {r:.4g} "
                f"(stable limit {CFL_LIMIT})")
    return Field(grid, h0 + dev)


def exact_transport(alpha: float, x, t: float) -> np.ndarray:
    """``alpha p(x, t)`` for the negatively skewed stable point source (D = 1)."""
    return np.array([alpha * stable_pde_solution(alpha, -1.0, 1.0, 0.0, float(v), t)
                     for v in np.atleast_1d(x)])


@dataclass(frozen=True)
class Residual:
    x: float
    t: float
    residual: float
    scale: float

    @property
    def relative(self) -> float:
        return abs(self.residual) / self.scale if self.scale > 0 else math.inf


def _five_point(fm2, fm1, fp1, fp2, h):
    return (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * h)


def residual_semifrac_space(ce: CharExponent, x: float, t: float,
                            candidate: tuple[Callable, Callable, Callable] | None = None,
                            dt: float = 1e-3) -> Residual:
    """``dp/dt`` minus the semi-fractional generator applied to ``p(., t)``.

    ``candidate = (p, p_t, p_x)`` replaces the semistable density (used by
    negative controls); each takes ``(x, t)`` and ``p_x`` is vectorised.
    """
    if not t > 2 * dt:
        raise ValueError("t must exceed the time stencil")
    if candidate is None:
        vals = [semistable_density(ce, x, t + k * dt) for k in (-2, -1, 1, 2)]
        pt = _five_point(*vals, dt)

        def fprime(z):
            return semistable_density_grid(ce, z, t, derivative=1)
    else:
        _, cand_t, cand_x = candidate
        pt = float(cand_t(x, t))

        def fprime(z):
            return cand_x(z, t)
    gen = semifrac_space_generator(ce.spec, fprime, x)
    return Residual(float(x), float(t), float(pt - gen), abs(pt))


@dataclass(frozen=True)
class HPaths:
    """``h = alpha p`` sampled on ``t_j = j dt`` at ``x + k dx`` offsets."""

    xs: tuple
    dt: float
    dx: float
    offsets: tuple
    values: np.ndarray  # (time, point, offset)

    def column(self, i: int, offset: int) -> np.ndarray:
        return self.values[:, i, self.offsets.index(offset)]


def _vanishing_time(ce: CharExponent, x: float, t_end: float, floor: float = 1e-30) -> float:
    """Largest time below which ``p(x, .)`` is under ``floor`` (x > 0)."""
    lo, hi = 1e-6, t_end
    if semistable_density(ce, x, lo) > floor:
        return 0.0
    for _ in range(40):
        mid = math.sqrt(lo * hi)
        if semistable_density(ce, x, mid) > floor:
            hi = mid
        else:
            lo = mid
    return lo


def h_paths(ce: CharExponent, xs: Sequence[float], t_end: float, dt: float,
            dx: float, offsets: Sequence[int] = (-2, -1, 0, 1, 2)) -> HPaths:
    xs = tuple(float(v) for v in xs)
    if min(xs) - max(abs(o) for o in offsets) * dx <= 0:
        raise ValueError("stencil must stay in x > 0")
    offsets = tuple(offsets)
    pts = np.array([[x + o * dx for o in offsets] for x in xs])
    n = int(round(t_end / dt))
    t0 = _vanishing_time(ce, float(pts.min()), t_end)
    vals = np.zeros((n + 1, len(xs), len(offsets)))
    for j in range(1, n + 1):
        t = j * dt
        if t > t0:
            vals[j] = ce.alpha * semistable_density_grid(ce, pts, t)
    return HPaths(xs, dt, dx, offsets, vals)


def coarsen(paths: HPaths) -> HPaths:
    """Every other time sample and doubled ``dx`` (offsets must allow it)."""
    new = tuple(o for o in (-2, -1, 0, 1, 2))
    idx = [paths.offsets.index(2 * o) for o in new]
    return HPaths(paths.xs, 2 * paths.dt, 2 * paths.dx, new, paths.values[::2][:, :, idx])


def time_residuals(paths: HPaths, kernel: PeriodicFunction, gamma: float,
                   ts: Iterable[float]) -> list[Residual]:
    """Semi-fractional Caputo derivative (kernel ``kernel``) plus ``h_x``."""
    out = []
    for t in ts:
        n = int(round(t / paths.dt))
        for i, x in enumerate(paths.xs):
            path = SampledPath(0.0, paths.dt, paths.column(i, 0)[:n + 1], 0.0)
            cap = semifrac_caputo(path, kernel, gamma)
            hx = _five_point(*(paths.column(i, o)[n] for o in (-2, -1, 1, 2)), paths.dx)
            out.append(Residual(x, float(t), cap + hx, max(abs(cap), abs(hx))))
    return out


def residual_semifrac_time(ce: CharExponent, spectrum: SpectrumResult, x: float, t: float,
                           dt: float = 1e-3, dx: float = 0.02) -> Residual:
    """Residual of the homogeneous dual equation at ``x > 0`` for ``h = alpha p``."""
    if not x > 0:
        raise ValueError("x must be positive")
    paths = h_paths(ce, [x], t, dt, dx)
    return time_residuals(paths, spectrum.tau, 1 / ce.alpha, [t])[0]
