"""Fourier coefficients of ``g`` and ``gamma`` and the time kernels ``tau``, ``rho``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .laplace import LaplaceSystem, g_func, gamma_func
from .periodic import (AdmissibilityReport, PeriodicFunction, check_admissible,
                       coefficients_from_samples)
from .special import gamma_complex

# coefficients below this fraction of |d_0| are sampling noise; dividing them
# by Gamma(i n dtilde - 1/alpha + 1) would amplify the noise exponentially
NOISE_FLOOR = 1e-13


@dataclass(frozen=True)
class SpectrumResult:
    d: Mapping[int, complex]
    h: Mapping[int, complex]
    dtilde: float
    d_base: float
    tau: PeriodicFunction
    rho: PeriodicFunction
    tau_report: AdmissibilityReport
    rho_report: AdmissibilityReport
    alpha: float

    def g_series(self, y):
        """``sum_n d_n exp(-i n dtilde y)``."""
        return _minus_series(self.d, self.dtilde, y)

    def gamma_series(self, y):
        return _minus_series(self.h, self.dtilde, y)

    def xi_rebuild(self, s):
        """``s**(1/alpha) sum_n d_n s**(-i n dtilde)``."""
        s = np.asarray(s, dtype=float)
        return s ** (1 / self.alpha) * self.g_series(np.log(s))

    def to_json(self) -> dict:
        def pack(coeffs):
            return [{"n": n, "re": c.real, "im": c.imag} for n, c in sorted(coeffs.items()) if n >= 0]

        return {
            "d": pack(self.d),
            "h": pack(self.h),
            "tau": self.tau.to_json(),
            "rho": self.rho.to_json(),
            "tau_admissible": self.tau_report.admissible,
            "rho_admissible": self.rho_report.admissible,
            "margins": {
                "tau": self.tau_report.to_json(),
                "rho": self.rho_report.to_json(),
            },
        }


def _minus_series(coeffs, freq, y):
    y = np.asarray(y, dtype=float)
    ns = np.array(sorted(coeffs))
    cs = np.array([coeffs[n] for n in ns])
    out = (np.exp(np.multiply.outer(y, -1j * ns * freq)) @ cs).real
    return float(out) if out.ndim == 0 else out


def _kernel(coeffs: Mapping[int, complex], alpha: float, dtilde: float,
            period: float, scale: float) -> PeriodicFunction:
    kernel = {}
    for n, c in coeffs.items():
        if n != 0 and abs(c) <= NOISE_FLOOR * scale:
            continue
        kernel[n] = c / gamma_complex(1j * n * dtilde - 1 / alpha + 1)
    # the division preserves conjugate symmetry only up to rounding
    for n in list(kernel):
        if n > 0:
            kernel[-n] = kernel[n].conjugate()
    kernel[0] = complex(kernel.get(0, 0j).real)
    return PeriodicFunction(period, kernel)


def extract_spectrum(ls: LaplaceSystem, n_max: int = 16, grid_points: int = 4096) -> SpectrumResult:
    """Sample ``g`` and ``gamma`` over one period and build ``tau`` and ``rho``.

    ``g(x) = sum d_n e^{-i n dtilde x}`` while the kernels use ``e^{+i n dtilde x}``;
    both conventions are implemented literally.
    """
    if grid_points < 8 * n_max:
        raise ValueError("grid_points must be at least 8 * n_max")
    alpha = ls.alpha
    period = math.log(ls.c)
    dtilde = 2 * math.pi / period
    y = np.arange(grid_points) * (period / grid_points)
    g_vals = g_func(ls, y)
    gam_vals = gamma_func(ls, y)
    # coefficients_from_samples returns the e^{+inwx} convention; flip n
    g_pf = coefficients_from_samples(g_vals, period, n_max)
    gam_pf = coefficients_from_samples(gam_vals, period, n_max)
    d = {n: g_pf.coeff(-n) for n in range(-n_max, n_max + 1)}
    h = {n: gam_pf.coeff(-n) for n in range(-n_max, n_max + 1)}
    scale = abs(d[0])
    tau = _kernel(d, alpha, dtilde, period, scale)
    rho = _kernel(h, alpha, dtilde, period, scale)
    return SpectrumResult(
        d=d, h=h, dtilde=dtilde, d_base=ls.c ** (1 / alpha), tau=tau, rho=rho,
        tau_report=check_admissible(tau, 1 / alpha, 4096),
        rho_report=check_admissible(rho, 1 / alpha, 4096),
        alpha=alpha,
    )
