"""Complex gamma function and quadrature primitives."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

# Lanczos approximation, g = 607/128 with 15 terms (P. Godfrey's set).
LANCZOS_G = 607.0 / 128.0
LANCZOS_COEFFS = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


class QuadratureError(RuntimeError):
    """Raised when a quadrature cannot reach its requested tolerance."""


def _lanczos_log(z: complex) -> complex:
    # log Gamma(z) for Re z >= 1/2
    z = z - 1.0
    x = LANCZOS_COEFFS[0]
    for i in range(1, len(LANCZOS_COEFFS)):
        x += LANCZOS_COEFFS[i] / (z + i)
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * cmath.log(t) - t + cmath.log(x)


def gamma_complex(z: complex) -> complex:
    """Gamma function for complex arguments.

    Uses the Lanczos approximation on ``Re z >= 1/2`` and the reflection
    formula elsewhere. Raises ``ValueError`` at the poles.
    """
    z = complex(z)
    if z.imag == 0.0 and z.real <= 0.0 and abs(z.real - round(z.real)) < 1e-12:
        raise ValueError(f"gamma has a pole at {z.real:g}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * cmath.exp(_lanczos_log(1.0 - z)))
    return cmath.exp(_lanczos_log(z))


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-11
    max_subdivisions: int = 500
    truncation_threshold: float = 1e-16

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 10:
            raise ValueError("max_subdivisions must be at least 10")


DEFAULT_QUAD = QuadratureSpec()


def integrate_real(f: Callable[[float], float], a: float, b: float,
                   spec: QuadratureSpec = DEFAULT_QUAD, points=None) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    ``b`` may be ``inf``. Endpoint singularities must be removed by the
    caller.
    """
    kwargs = dict(epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                  limit=spec.max_subdivisions, full_output=1)
    if points is not None and math.isfinite(b):
        kwargs["points"] = points
    value, err, info, *rest = integrate.quad(f, a, b, **kwargs)
    if rest and err > max(spec.abs_tol, spec.rel_tol * abs(value)) * 10:
        raise QuadratureError(
            f"quadrature on [{a}, {b}] failed: value {value}, error {err}"
        )
    return value


# Gauss-Legendre nodes used for panel quadrature of oscillatory integrands.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_GL_LOW_NODES, _GL_LOW_WEIGHTS = np.polynomial.legendre.leggauss(8)


def panel_nodes(edges: np.ndarray, order: str = "high"):
    """Composite Gauss-Legendre nodes and weights on consecutive panels."""
    nodes, weights = ((_GL_NODES, _GL_WEIGHTS) if order == "high"
                      else (_GL_LOW_NODES, _GL_LOW_WEIGHTS))
    left, right = edges[:-1], edges[1:]
    half = 0.5 * (right - left)
    mid = 0.5 * (right + left)
    k = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    return k, w


def fourier_panels(x: float, K: float, freq: Callable[[np.ndarray], np.ndarray] | None = None,
                   grading: int = 24) -> np.ndarray:
    """Panel edges on ``[0, K]``.

    Panel width is ``min(1, pi / (4 (1 + |x| + freq(k))))`` where ``freq``
    bounds the angular frequency of the transform itself. The first panel is
    refined geometrically towards ``k = 0`` where characteristic functions of
    stable type have a ``|k|**alpha`` kink.
    """
    edges = [0.0]
    k = 0.0
    while k < K:
        extra = float(freq(np.array(k))) if freq is not None else 0.0
        width = min(1.0, math.pi / (4.0 * (1.0 + abs(x) + extra)))
        k = min(K, k + width)
        edges.append(k)
    first = edges[1]
    graded = [first * 2.0 ** (-j) for j in range(grading, 0, -1)]
    return np.array([0.0] + graded + edges[1:])


@dataclass(frozen=True)
class FourierResult:
    value: float
    error: float
    K: float


def oscillatory_inverse_fourier(phi: Callable[[np.ndarray], np.ndarray], x: float,
                                K: float, spec: QuadratureSpec = DEFAULT_QUAD,
                                freq=None, check: bool = True,
                                full_output: bool = False):
    r"""Evaluate :math:`\frac{1}{\pi}\int_0^K \mathrm{Re}[e^{-ikx}\phi(k)]\,dk`.

    ``phi`` must be Hermitian, ``phi(-k) = conj(phi(k))``, vectorised over
    numpy arrays, and negligible beyond ``K``.
    """
    if check:
        probe = np.array([0.37, 1.3, 0.5 * K])
        a, b = phi(probe), phi(-probe)
        if np.max(np.abs(a - np.conj(b))) > 1e-10 * (1 + np.max(np.abs(a))):
            raise ValueError("phi is not Hermitian")
        tail = float(np.max(np.abs(phi(np.array([K, 1.1 * K])))))
        peak = max(float(np.max(np.abs(phi(np.array([0.0, 1e-3 * K]))))), 1e-300)
        if tail > spec.truncation_threshold * peak and tail > 1e-300:
            raise QuadratureError(
                f"|phi(K)| = {tail:.3e} above truncation threshold at K = {K}"
            )
    else:
        tail = 0.0
    edges = fourier_panels(x, K, freq)
    k, w = panel_nodes(edges)
    f = np.real(np.exp(-1j * k * x) * phi(k))
    value = float(w @ f) / math.pi
    kl, wl = panel_nodes(edges, "low")
    low = float(wl @ np.real(np.exp(-1j * kl * x) * phi(kl))) / math.pi
    error = abs(value - low) + K * tail / math.pi
    if full_output:
        return FourierResult(value, error, K)
    return value
