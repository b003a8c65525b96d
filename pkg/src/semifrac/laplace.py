"""Laplace-side objects of the semistable point-source problem.

For ``s > 0`` the pole of ``1 / (s - psi(k))`` sits at ``k = -i xi(s)`` where
``xi`` inverts ``k -> psi(-ik) = k**alpha m(log k)``. From ``xi`` follow the
periodic factor ``g``, the correction ``f`` and ``gamma`` and the closed-form
time Laplace transform of the density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .charfun import CharExponent, m_deriv, m_eval, s_of_k, s_prime
from .special import QuadratureError


@dataclass(frozen=True)
class LaplaceSystem:
    ce: CharExponent
    tol: float = 1e-14
    use_cache: bool = False
    _m_range: tuple = field(init=False, repr=False, compare=False)
    _cache: object = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        y = np.linspace(0.0, self.ce.spec.period, 4097)
        m = m_eval(self.ce, y)
        slack = float(np.max(np.abs(m_deriv(self.ce, y)))) * self.ce.spec.period / 4096
        object.__setattr__(self, "_m_range", (float(m.min()) - slack, float(m.max()) + slack))
        if self.use_cache:
            object.__setattr__(self, "_cache", self._build_cache())

    @property
    def alpha(self) -> float:
        return self.ce.alpha

    @property
    def c(self) -> float:
        return self.ce.spec.c

    def _build_cache(self):
        # one log(c) period of g suffices: xi(s) = s^{1/alpha} g(log s)
        knots = np.linspace(0.0, math.log(self.c), 1025)
        values = np.array([_g_exact(self, y) for y in knots])
        return PchipInterpolator(knots, values)

    def xi(self, s):
        return xi(self, s)


def _xi_exact(ls: LaplaceSystem, s: float) -> float:
    if not s > 0:
        raise ValueError("s must be positive")
    a = ls.alpha
    ce = ls.ce
    m_lo, m_hi = ls._m_range
    log_s = math.log(s)
    lo = (log_s - math.log(m_hi)) / a - 1e-6
    hi = (log_s - math.log(m_lo)) / a + 1e-6

    # F(u) = log s(e^u) - log s, increasing with F'(u) = alpha + m'/m
    def F(u):
        return a * u + math.log(m_eval(ce, u)) - log_s

    f_lo, f_hi = F(lo), F(hi)
    if f_lo > 0 or f_hi < 0:
        raise RuntimeError(f"xi bracket failed for s = {s}")
    u = 0.5 * (lo + hi)
    for _ in range(100):
        val = F(u)
        if val > 0:
            hi = u
        else:
            lo = u
        m = m_eval(ce, u)
        step = val / (a + m_deriv(ce, u) / m)
        new = u - step
        if not lo < new < hi:
            new = 0.5 * (lo + hi)
        if abs(new - u) <= ls.tol * max(1.0, abs(u)) or hi - lo <= 1e-15 * max(1.0, abs(u)):
            u = new
            break
        u = new
    return math.exp(u)


def _xi_vec(ls: LaplaceSystem, s: np.ndarray) -> np.ndarray:
    """Array version of the safeguarded Newton solve, run in lockstep."""
    s = np.asarray(s, dtype=float)
    if np.any(~(s > 0)):
        raise ValueError("s must be positive")
    a, ce = ls.alpha, ls.ce
    m_lo, m_hi = ls._m_range
    log_s = np.log(s)
    lo = (log_s - math.log(m_hi)) / a - 1e-6
    hi = (log_s - math.log(m_lo)) / a + 1e-6
    u = 0.5 * (lo + hi)
    active = np.ones(s.shape, dtype=bool)
    for _ in range(100):
        ua = u[active]
        m = m_eval(ce, ua)
        val = a * ua + np.log(m) - log_s[active]
        lo_a, hi_a = lo[active], hi[active]
        hi_a = np.where(val > 0, ua, hi_a)
        lo_a = np.where(val > 0, lo_a, ua)
        new = ua - val / (a + m_deriv(ce, ua) / m)
        new = np.where((new > lo_a) & (new < hi_a), new, 0.5 * (lo_a + hi_a))
        scale = np.maximum(1.0, np.abs(ua))
        done = (np.abs(new - ua) <= ls.tol * scale) | (hi_a - lo_a <= 1e-15 * scale)
        idx = np.flatnonzero(active)
        u[idx], lo[idx], hi[idx] = new, lo_a, hi_a
        active[idx[done]] = False
        if not active.any():
            break
    return np.exp(u)


def _g_exact(ls: LaplaceSystem, y: float) -> float:
    return math.exp(-y / ls.alpha) * _xi_exact(ls, math.exp(y))


def xi(ls: LaplaceSystem, s):
    """Unique ``xi(s) > 0`` with ``psi(-i xi(s)) = s``."""
    if np.ndim(s):
        s = np.asarray(s, dtype=float)
        if ls._cache is None:
            return _xi_vec(ls, s)
        log_s = np.log(s)
        return np.exp(log_s / ls.alpha) * ls._cache(log_s % math.log(ls.c))
    s = float(s)
    if ls._cache is not None:
        log_s = math.log(s)
        y = log_s % math.log(ls.c)
        return math.exp(log_s / ls.alpha) * float(ls._cache(y))
    return _xi_exact(ls, s)


def g_func(ls: LaplaceSystem, y):
    """``g(y) = exp(-y / alpha) xi(exp(y))``, a ``log c``-periodic function."""
    if np.ndim(y):
        y = np.asarray(y, dtype=float)
        return np.exp(-y / ls.alpha) * xi(ls, np.exp(y))
    return math.exp(-y / ls.alpha) * xi(ls, math.exp(y))


def f_func(ls: LaplaceSystem, s):
    """``f(s) = xi(s)**alpha m'(log xi(s)) / alpha``."""
    x = xi(ls, s)
    val = x**ls.alpha * m_deriv(ls.ce, np.log(x)) / ls.alpha
    return val if np.ndim(s) else float(val)


def gamma_func(ls: LaplaceSystem, y):
    """``gamma`` with ``-f(s) xi(s) / (s + f(s)) = s**(1/alpha) gamma(log s)``."""
    a = ls.alpha
    x = xi(ls, np.exp(y))
    g = np.exp(-np.asarray(y, dtype=float) / a) * x
    ga_mp = g**a * m_deriv(ls.ce, np.log(x))
    val = -ga_mp / (a + ga_mp) * g
    return val if np.ndim(y) else float(val)


def lt_closed_form(ls: LaplaceSystem, x: float, s: float, drop_f: bool = False) -> float:
    """Closed-form time Laplace transform of the density at ``x > 0``.

    ``drop_f`` replaces ``f`` by zero; it exists only as a negative control.
    """
    if not (x >= 0 and s > 0):
        raise ValueError("need x >= 0 and s > 0")
    k = xi(ls, s)
    f = 0.0 if drop_f else f_func(ls, s)
    return k * math.exp(-x * k) / (s + f) / ls.alpha


def h_tilde(ls: LaplaceSystem, x: float, s: float) -> float:
    return ls.alpha * lt_closed_form(ls, x, s)


def lt_denominator_identity(ls: LaplaceSystem, s: float) -> float:
    """``xi(s) s'(xi(s)) / alpha``, which equals ``s + f(s)``."""
    k = xi(ls, s)
    return k * s_prime(ls.ce, k) / ls.alpha


@dataclass(frozen=True)
class LTResult:
    value: float
    error: float
    omitted_small_t: float
    T: float


def lt_numeric(density: Callable[[float, float], float], x: float, s: float,
               t_min: float = 1e-6, T: float | None = None, rel_tol: float = 1e-9,
               full_output: bool = False):
    r"""Numerical :math:`\int_0^\infty e^{-st} p(x, t)\, dt`.

    The integral runs over ``[t_min, T]`` in ``u = log t`` with ``s T >= 35``.
    Mass below ``t_min`` is bounded by ``t_min * p(x, t_min)``, valid when
    ``p(x, .)`` increases near zero.
    """
    if T is None:
        T = 40.0 / s
    if s * T < 35:
        raise ValueError("need s * T >= 35")

    def integrand(u):
        t = math.exp(u)
        return math.exp(-s * t) * density(x, t) * t

    value, err, info = integrate.quad(integrand, math.log(t_min), math.log(T),
                                      epsabs=0.0, epsrel=rel_tol, limit=200,
                                      full_output=1)[:3]
    if err > 1e3 * rel_tol * abs(value) + 1e-300:
        raise QuadratureError(f"lt_numeric did not converge: {value} +- {err}")
    omitted = t_min * density(x, t_min)
    tail = math.exp(-s * T) / s * density(x, T)
    if full_output:
        return LTResult(value, err + omitted + tail, omitted, T)
    return value
