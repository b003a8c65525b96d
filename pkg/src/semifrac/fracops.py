"""Fractional and semi-fractional derivative operators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .charfun import SemistableSpec
from .periodic import PeriodicFunction
from .special import panel_nodes


@dataclass(frozen=True)
class FracOrder:
    gamma: float

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"order must lie in (0, 1), got {self.gamma}")


@dataclass(frozen=True)
class SampledPath:
    """Samples ``values[j] = f(t0 + j dt)``; ``initial`` is ``f`` at time 0."""

    t0: float
    dt: float
    values: np.ndarray
    initial: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        values = np.asarray(self.values, dtype=float)
        if values.size == 0:
            raise ValueError("path needs at least one sample")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, f: Callable, t: float, dt: float) -> "SampledPath":
        n = int(round(t / dt))
        times = np.arange(n + 1) * dt
        values = np.array([f(s) for s in times], dtype=float)
        return cls(0.0, dt, values, float(values[0]))

    @property
    def t_end(self) -> float:
        return self.t0 + (self.values.size - 1) * self.dt


def _order(gamma) -> float:
    return gamma.gamma if isinstance(gamma, FracOrder) else FracOrder(float(gamma)).gamma


def gl_weights(gamma, n: int) -> np.ndarray:
    """Grunwald-Letnikov weights ``w_j = (-1)^j binom(gamma, j)``, ``j <= n``."""
    g = _order(gamma)
    if n < 0:
        raise ValueError("n must be non-negative")
    factors = 1.0 - (g + 1.0) / np.arange(1, n + 1)
    return np.concatenate(([1.0], np.cumprod(factors)))


def caputo_gl(path: SampledPath, gamma) -> float:
    """Caputo derivative at the last sample by Grunwald-Letnikov differences."""
    g = _order(gamma)
    f = path.values
    n = f.size - 1
    w = gl_weights(g, n)
    return float(path.dt**-g * (w @ (f[::-1] - path.initial)))


def _moment_table(kernel: PeriodicFunction, g: float, dt: float, n: int):
    """Per-step integrals of ``k(u) = u^-g kernel(log u)`` against 1 and the
    local linear hat on ``[j dt, (j+1) dt]``, exact via the Fourier series."""
    ns = np.array(sorted(kernel.coeffs))
    cs = np.array([kernel.coeffs[m] for m in ns])
    a = -g + 1j * ns * kernel.angular  # exponents
    j = np.arange(n + 1, dtype=float)[:, None]
    # (j)^{a+1} and (j)^{a+2}; 0^{z} = 0 since Re z > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        logj = np.log(j)
        p1 = np.where(j > 0, np.exp((a + 1) * logj), 0.0)
        p2 = np.where(j > 0, np.exp((a + 2) * logj), 0.0)
    d1 = (p1[1:] - p1[:-1]) / (a + 1)
    d2 = (p2[1:] - p2[:-1]) / (a + 2)
    scale1 = np.exp((a + 1) * math.log(dt))
    A = ((d1 * scale1) @ cs).real
    B = (((d2 - j[:-1] * d1) * scale1) @ cs).real
    return A, B


def semifrac_caputo(path: SampledPath, kernel: PeriodicFunction, gamma) -> float:
    r"""Semi-fractional Caputo derivative at the last sample,

    .. math:: \int_0^t f'(t - u)\, u^{-\gamma}\, \kappa(\log u)\, du,

    by product integration: ``f'`` (centred differences) is interpolated
    linearly in ``u`` and integrated exactly against the kernel.
    """
    g = _order(gamma)
    f = path.values
    n = f.size - 1
    if n == 0:
        return 0.0
    fp = np.gradient(f, path.dt)
    A, B = _moment_table(kernel, g, path.dt, n)
    rev = fp[::-1]  # rev[j] = f'(t - j dt)
    return float(A @ rev[:-1] + B @ (rev[1:] - rev[:-1]))


def rl_semifrac_step(rho: PeriodicFunction, gamma, t: float) -> float:
    """Riemann-Liouville semi-fractional derivative of the unit step at ``t``."""
    if not t > 0:
        raise ValueError("t must be positive")
    return t ** -_order(gamma) * rho(math.log(t))


def _power_moments(theta: PeriodicFunction, alpha: float, lo: float, hi: float, j: int) -> complex:
    """``int_lo^hi y^(j - alpha) theta(log y) dy``; ``hi = inf`` allowed for ``j = 0``."""
    total = 0j
    for n, c in theta.coeffs.items():
        e = j - alpha + 1 + 1j * n * theta.angular
        up = 0j if math.isinf(hi) else np.exp(e * math.log(hi))
        low = 0j if lo == 0 else np.exp(e * math.log(lo))
        total += c * (up - low) / e
    return total


def semifrac_space_generator(spec: SemistableSpec, f_prime: Callable, x: float,
                             y_max: float = 30.0, width: float = 0.05,
                             delta: float = 0.1, degree: int = 10, tail: str = "vanish"):
    r"""Negative semi-fractional derivative in generator form,

    .. math:: \int_0^\infty (f'(x+y) - f'(x))\, y^{-\alpha} \theta(\log y)\, dy.

    ``f_prime`` is vectorised and may be complex. On ``(0, delta]`` it is
    replaced by a polynomial fit so the singular weight is integrated with
    exact moments; on ``[delta, y_max]`` composite Gauss-Legendre is used;
    the constant part ``f'(x) int_delta^inf`` is integrated exactly. Beyond
    ``y_max``, ``f'(x + y)`` is taken as zero (``tail="vanish"``: densities,
    oscillatory inputs) or held at ``f'(x + y_max)`` (``tail="hold"``).
    """
    if tail not in ("vanish", "hold"):
        raise ValueError("tail must be 'vanish' or 'hold'")
    a = spec.alpha
    theta = spec.theta
    z = 0.5 * (1 - np.cos(np.pi * (np.arange(4 * degree) + 0.5) / (4 * degree)))
    samples = f_prime(x + delta * z)
    vander = np.vander(z, degree + 1, increasing=True)
    coef = np.linalg.lstsq(vander, samples, rcond=None)[0]
    near = 0j
    for j in range(1, degree + 1):
        near += coef[j] * delta**-j * _power_moments(theta, a, 0.0, delta, j)
    # log-spaced panels on [delta, 1], uniform beyond
    edges = np.concatenate((np.geomspace(delta, 1.0, 12) if delta < 1 else [delta],
                            np.arange(1.0, y_max, width)[1:], [y_max]))
    y, w = panel_nodes(edges)
    weight = y**-a * theta(np.log(y))
    far = w @ (f_prime(x + y) * weight)
    const = f_prime(np.array([x]))[0] * _power_moments(theta, a, delta, math.inf, 0)
    out = near + far - const
    if tail == "hold":
        held = f_prime(np.array([x + y_max]))[0]
        out += held * _power_moments(theta, a, y_max, math.inf, 0)
    # complex only for complex inputs; the moments leave a rounding-level
    # imaginary part otherwise
    return complex(out) if np.iscomplexobj(samples) else float(np.real(out))
