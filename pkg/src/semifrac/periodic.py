"""Log-periodic functions stored as truncated Fourier series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class PeriodicFunction:
    r"""Real function :math:`x \mapsto \sum_n c_n e^{i n \omega x}` with
    :math:`\omega = 2\pi / \text{period}`.

    Coefficients are kept for ``-n_max <= n <= n_max`` and must be conjugate
    symmetric so that the function is real.
    """

    period: float
    coeffs: Mapping[int, complex]
    angular: float = field(init=False)
    _n: np.ndarray = field(init=False, repr=False, compare=False)
    _c: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.period > 0 and math.isfinite(self.period)):
            raise ValueError(f"period must be positive, got {self.period}")
        coeffs = {int(n): complex(c) for n, c in self.coeffs.items()}
        for n, c in coeffs.items():
            partner = coeffs.get(-n, 0.0)
            if abs(partner - c.conjugate()) > SYMMETRY_TOL * max(1.0, abs(c)):
                raise ValueError(f"coefficients not conjugate symmetric at n={n}")
        ns = np.array(sorted(coeffs), dtype=int)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "angular", 2.0 * math.pi / self.period)
        object.__setattr__(self, "_n", ns)
        object.__setattr__(
            self, "_c", np.array([coeffs[n] for n in ns], dtype=complex)
        )

    @property
    def n_max(self) -> int:
        return int(np.max(np.abs(self._n))) if self._n.size else 0

    def coeff(self, n: int) -> complex:
        return self.coeffs.get(n, 0j)

    def series(self, x, order: int = 0):
        """Complex series sum of the ``order``-th term-wise derivative."""
        x = np.asarray(x, dtype=float)
        if not self._n.size:
            return np.zeros(x.shape, dtype=complex)
        freq = 1j * self._n * self.angular
        terms = self._c * freq**order
        phase = np.exp(np.multiply.outer(x, freq))
        return phase @ terms

    def __call__(self, x):
        out = self.series(x).real
        return float(out) if np.ndim(out) == 0 else out

    def derivative(self, x):
        out = self.series(x, order=1).real
        return float(out) if np.ndim(out) == 0 else out

    def is_constant(self, tol: float = 0.0) -> bool:
        return all(abs(c) <= tol for n, c in self.coeffs.items() if n != 0)

    def to_json(self) -> dict:
        return {
            "period": self.period,
            "coeffs": [
                {"n": n, "re": c.real, "im": c.imag}
                for n, c in sorted(self.coeffs.items())
                if n >= 0
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PeriodicFunction":
        coeffs: dict[int, complex] = {}
        for item in data["coeffs"]:
            n = int(item["n"])
            if n < 0:
                raise ValueError("only n >= 0 coefficients are stored on disk")
            c = complex(float(item.get("re", 0.0)), float(item.get("im", 0.0)))
            coeffs[n] = c
            if n == 0:
                coeffs[0] = complex(c.real, 0.0)
            else:
                coeffs[-n] = c.conjugate()
        return make_periodic(coeffs, float(data["period"]))


@dataclass(frozen=True)
class AdmissibilityReport:
    exponent: float
    min_margin: float
    min_value: float
    admissible: bool

    def to_json(self) -> dict:
        return {
            "exponent": self.exponent,
            "min_margin": self.min_margin,
            "min_value": self.min_value,
            "admissible": self.admissible,
        }


def make_periodic(coeffs: Mapping[int, complex], period: float) -> PeriodicFunction:
    return PeriodicFunction(period=period, coeffs=dict(coeffs))


def cosine_series(mean: float, amplitudes: Mapping[int, float], period: float,
                  phases: Mapping[int, float] | None = None) -> PeriodicFunction:
    """``mean + sum_n a_n cos(n w x + phi_n)`` as a :class:`PeriodicFunction`."""
    phases = phases or {}
    coeffs: dict[int, complex] = {0: complex(mean)}
    for n, a in amplitudes.items():
        c = 0.5 * a * np.exp(1j * phases.get(n, 0.0))
        coeffs[n] = complex(c)
        coeffs[-n] = complex(c).conjugate()
    return make_periodic(coeffs, period)


def eval_periodic(pf: PeriodicFunction, x):
    return pf(x)


def eval_periodic_derivative(pf: PeriodicFunction, x):
    return pf.derivative(x)


def check_admissible(pf: PeriodicFunction, exponent: float,
                     grid_points: int = 4096) -> AdmissibilityReport:
    """Grid test of ``exponent * pf - pf' >= 0`` and ``pf > 0`` over one period.

    The first condition is equivalent to ``x -> x**-exponent * pf(log x)``
    being non-increasing.
    """
    if grid_points < 64:
        raise ValueError("grid_points must be at least 64")
    y = np.arange(grid_points) * (pf.period / grid_points)
    values = pf(y)
    margin = exponent * values - pf.derivative(y)
    min_margin = float(np.min(margin))
    min_value = float(np.min(values))
    return AdmissibilityReport(
        exponent=float(exponent),
        min_margin=min_margin,
        min_value=min_value,
        admissible=bool(min_margin >= 0 and min_value > 0),
    )


def coefficients_from_samples(samples: Sequence[float], period: float,
                              n_max: int) -> PeriodicFunction:
    """Discrete Fourier estimate of the coefficients of equispaced samples.

    ``samples[j]`` is the value at ``j * period / len(samples)``; the right
    endpoint of the period is not included.
    """
    samples = np.asarray(samples, dtype=float)
    count = samples.size
    if count < max(4 * n_max, 1):
        raise ValueError(f"need at least {4 * n_max} samples, got {count}")
    spectrum = np.fft.fft(samples) / count
    coeffs: dict[int, complex] = {0: complex(spectrum[0].real, 0.0)}
    for n in range(1, n_max + 1):
        c = complex(spectrum[n])  # e^{+inwx} component
        coeffs[n] = c
        coeffs[-n] = c.conjugate()
    return make_periodic(coeffs, period)
