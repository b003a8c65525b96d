"""Characteristic exponents of stable and negatively skewed semistable laws."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy import integrate

from .periodic import PeriodicFunction, check_admissible, cosine_series
from .special import gamma_complex, integrate_real, panel_nodes


@dataclass(frozen=True)
class StableParams:
    """Parameters ``(alpha, beta, sigma, v)`` of the stable characteristic
    function ``exp(i v k - sigma**alpha |k|**alpha (1 - i beta sign(k) tan(pi alpha / 2)))``.

    Orders in ``(0, 2)`` other than 1 are accepted so that the positively
    skewed ``1/alpha``-stable laws can be represented; ``alpha = 2`` needs
    ``gaussian_oracle=True``.
    """

    alpha: float
    beta: float
    sigma: float
    v: float = 0.0
    gaussian_oracle: bool = False

    def __post_init__(self):
        a = self.alpha
        if a == 2.0:
            if not self.gaussian_oracle:
                raise ValueError("alpha = 2 requires gaussian_oracle=True")
        elif not (0.0 < a < 2.0) or abs(a - 1.0) < 1e-12:
            raise ValueError(f"alpha must lie in (0, 1) or (1, 2), got {a}")
        if not -1.0 <= self.beta <= 1.0:
            raise ValueError(f"beta must lie in [-1, 1], got {self.beta}")
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class LevyTriple:
    """Stable Levy measure ``D (p x^{-a-1} 1{x>0} + q |x|^{-a-1} 1{x<0})``
    together with the drift ``mu``."""

    D: float
    p: float
    q: float
    mu: float
    alpha: float

    def __post_init__(self):
        if self.D <= 0:
            raise ValueError("degenerate Levy measure: D must be positive")
        if min(self.p, self.q) < 0 or abs(self.p + self.q - 1.0) > 1e-12:
            raise ValueError("weights must be non-negative with p + q = 1")
        if not 1.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (1, 2)")


def centering_integral(tr: LevyTriple) -> float:
    r""":math:`\int (x/(1+x^2) - x)\,d\phi(x)` for the stable measure of ``tr``."""
    a = tr.alpha
    # both half-lines reduce to +-D * int_0^inf u^{2-a} / (1 + u^2) du
    head = integrate_real(lambda u: u ** (2 - a) / (1 + u * u), 0.0, 1.0)
    # u = 1/w on [1, inf): int_0^1 w^{a-2} / (1 + w^2) dw, singular only if a < 1
    tail = integrate_real(lambda w: w ** (a - 2) / (1 + w * w), 0.0, 1.0)
    return tr.D * (tr.q - tr.p) * (head + tail)


def stable_from_levy(tr: LevyTriple) -> StableParams:
    a = tr.alpha
    sigma = (tr.D * abs(math.cos(a * math.pi / 2))) ** (1 / a)
    v = tr.mu - centering_integral(tr)
    return StableParams(alpha=a, beta=tr.p - tr.q, sigma=sigma, v=v)


def stable_constant(alpha: float) -> float:
    """Tail constant ``(alpha - 1) / Gamma(2 - alpha)`` giving ``psi(k) = (ik)**alpha``."""
    return (alpha - 1.0) / math.gamma(2.0 - alpha)


@dataclass(frozen=True)
class SemistableSpec:
    """Negatively skewed semistable law with Levy tail ``x**-alpha * theta(log x)``."""

    alpha: float
    c: float
    theta: PeriodicFunction
    chat: float = field(init=False)

    def __post_init__(self):
        if not 1.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (1, 2), got {self.alpha}")
        if not self.c > 1.0:
            raise ValueError(f"c must exceed 1, got {self.c}")
        period = math.log(self.c) / self.alpha
        if abs(self.theta.period - period) > 1e-12 * max(1.0, period):
            raise ValueError(
                f"theta must have period log(c)/alpha = {period!r}, got {self.theta.period!r}"
            )
        report = check_admissible(self.theta, self.alpha, 4096)
        if not report.admissible:
            raise ValueError(
                f"theta is not admissible (min margin {report.min_margin:.3e}, "
                f"min value {report.min_value:.3e})"
            )
        object.__setattr__(self, "chat", 2 * math.pi * self.alpha / math.log(self.c))

    @property
    def n_max(self) -> int:
        return self.theta.n_max

    @property
    def period(self) -> float:
        return self.theta.period

    @property
    def is_stable(self) -> bool:
        return self.theta.is_constant() and abs(
            self.theta.coeff(0).real - stable_constant(self.alpha)
        ) < 1e-14

    @classmethod
    def stable(cls, alpha: float = 1.5, c: float = 100.0) -> "SemistableSpec":
        theta = cosine_series(stable_constant(alpha), {}, math.log(c) / alpha)
        return cls(alpha, c, theta)

    @classmethod
    def cosine(cls, alpha: float, c: float, eps: float, c0: float | None = None) -> "SemistableSpec":
        """``theta(y) = c0 (1 + eps cos(chat y))``."""
        c0 = stable_constant(alpha) if c0 is None else c0
        theta = cosine_series(c0, {1: c0 * eps}, math.log(c) / alpha)
        return cls(alpha, c, theta)

    @classmethod
    def default(cls) -> "SemistableSpec":
        return cls.cosine(1.5, 100.0, 0.2, 0.5 / math.sqrt(math.pi))

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "c": self.c, "theta": self.theta.to_json()}

    @classmethod
    def from_json(cls, data: Mapping) -> "SemistableSpec":
        alpha, c = float(data["alpha"]), float(data["c"])
        theta = dict(data["theta"])
        period = math.log(c) / alpha
        theta.setdefault("period", period)
        return cls(alpha, c, PeriodicFunction.from_json(theta))

    def levy_density(self, y):
        """Density of the reflected Levy measure at ``y > 0``."""
        y = np.asarray(y, dtype=float)
        ly = np.log(y)
        return y ** (-self.alpha - 1) * (
            self.alpha * self.theta(ly) - self.theta.derivative(ly)
        )


@dataclass(frozen=True)
class CharExponent:
    """Series form ``psi(z) = sum_n omega_n (iz)**(alpha - i n chat)``."""

    spec: SemistableSpec
    omega: Mapping[int, complex] = field(init=False)
    _n: np.ndarray = field(init=False, repr=False, compare=False)
    _w: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a, chat = self.spec.alpha, self.spec.chat
        omega = {
            n: -c * gamma_complex(1j * n * chat - a + 1)
            for n, c in self.spec.theta.coeffs.items()
            if c != 0
        }
        ns = np.array(sorted(omega), dtype=int)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "_n", ns)
        object.__setattr__(self, "_w", np.array([omega[n] for n in ns]))

    @property
    def alpha(self) -> float:
        return self.spec.alpha

    @property
    def real_axis_bound(self) -> float:
        """Bound ``M`` with ``|psi(z)| <= M |z|**alpha`` on the closed lower half plane."""
        return float(np.sum(np.abs(self._w) * np.exp(np.abs(self._n) * self.spec.chat * math.pi / 2)))

    def __call__(self, z):
        return psi_series(self, z)

    def m(self, y):
        return m_eval(self, y)

    def m_prime(self, y):
        return m_deriv(self, y)


def psi_series(ce: CharExponent, z):
    """Characteristic exponent from the gamma-weighted Fourier series.

    ``z`` may be real or lie in the lower half plane; the principal branch of
    ``log(iz)`` is used.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.zeros(z.shape, dtype=complex)
    nz = z != 0
    log_iz = np.log(1j * z[nz])
    expo = ce.alpha - 1j * ce._n * ce.spec.chat
    out[nz] = np.exp(np.multiply.outer(log_iz, expo)) @ ce._w
    return complex(out[0]) if scalar else out


def m_eval(ce: CharExponent, y):
    y = np.asarray(y, dtype=float)
    phase = np.exp(np.multiply.outer(y, -1j * ce._n * ce.spec.chat))
    out = (phase @ ce._w).real
    return float(out) if out.ndim == 0 else out


def m_deriv(ce: CharExponent, y):
    y = np.asarray(y, dtype=float)
    freq = -1j * ce._n * ce.spec.chat
    phase = np.exp(np.multiply.outer(y, freq))
    out = (phase @ (ce._w * freq)).real
    return float(out) if out.ndim == 0 else out


def s_of_k(ce: CharExponent, k):
    """``psi(-ik) = k**alpha m(log k)`` for ``k > 0``."""
    k = np.asarray(k, dtype=float)
    out = k**ce.alpha * m_eval(ce, np.log(k))
    return float(out) if np.ndim(out) == 0 else out


def s_prime(ce: CharExponent, k):
    k = np.asarray(k, dtype=float)
    y = np.log(k)
    out = k ** (ce.alpha - 1) * (ce.alpha * m_eval(ce, y) + m_deriv(ce, y))
    return float(out) if np.ndim(out) == 0 else out


def _small_expm1(w):
    """``exp(-w) - 1 + w`` without cancellation, for complex ``w``."""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    small = np.abs(w) < 0.25
    ws = w[small]
    term = ws * ws / 2
    acc = term.copy()
    for j in range(3, 20):
        term = -term * ws / j
        acc += term
    out[small] = acc
    wl = w[~small]
    out[~small] = np.exp(-wl) - 1 + wl
    return out


def _log_panels(v0: float, v1: float, width: float):
    count = max(1, int(math.ceil((v1 - v0) / width)))
    return panel_nodes(np.linspace(v0, v1, count + 1))


def psi_integral(spec: SemistableSpec, k) -> complex:
    r"""Characteristic exponent from the Levy-Khintchine integral

    .. math:: \psi(k) = \int_0^\infty (e^{-iky} - 1 + iky)\, \nu(y)\, dy,

    where ``nu`` is the reflected Levy density. ``k`` is real, or purely
    imaginary with negative imaginary part (``k = -i eta``). Independent of
    the gamma series.
    """
    k = complex(k)
    a = spec.alpha
    theta = spec.theta
    width = min(0.05, spec.period / 16)

    def shape(v):
        # nu(e^v) e^v = e^{-alpha v} (alpha theta(v) - theta'(v))
        return np.exp(-a * v) * (a * theta(v) - theta.derivative(v))

    if k == 0:
        return 0j
    if k.real == 0 and k.imag < 0:
        eta = -k.imag
        v_low = (math.log(1e-18) - 2 * math.log(eta)) / (2 - a) - 1.0
        v_high = -math.log(eta) + (-math.log(1e-18) + math.log(max(eta, 1.0))) / (a - 1) + 5.0
        v, w = _log_panels(v_low - math.log(eta), v_high, width)
        y = np.exp(v)
        return complex(w @ (_small_expm1(eta * y).real * shape(v)), 0.0)
    if k.imag != 0:
        raise ValueError("psi_integral supports real k or k = -i eta")
    kr = k.real
    if kr < 0:
        return psi_integral(spec, -kr).conjugate()
    big_y = 2 * math.pi / kr
    log_y = math.log(big_y)
    # head: (0, Y] in v = log y
    v_low = log_y + math.log(1e-18) / (2 - a) - 1.0
    v, w = _log_panels(v_low, log_y, width)
    head = w @ (_small_expm1(1j * kr * np.exp(v)) * shape(v))
    # oscillating part of the tail: int_Y^inf e^{-iky} nu(y) dy
    nu = lambda y: float(spec.levy_density(y))
    osc = []
    with warnings.catch_warnings():
        # QAWF flags the log-periodic modulation; the cycle sums still converge
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for wt in ("cos", "sin"):
            val, err = integrate.quad(nu, big_y, np.inf, weight=wt, wvar=kr,
                                      epsabs=1e-15, limlst=200)
            osc.append(val)
    # polynomial part of the tail: int_Y^inf (-1 + iky) nu(y) dy
    v_high = log_y + (-math.log(1e-18) + abs(log_y)) / (a - 1) + 5.0
    v, w = _log_panels(log_y, v_high, width)
    y = np.exp(v)
    poly = w @ ((-1 + 1j * kr * y) * shape(v))
    return complex(head + osc[0] - 1j * osc[1] + poly)


def random_admissible_spec(rng: np.random.Generator, harmonics: int = 3) -> SemistableSpec:
    """Random admissible spec with a few harmonics, used by property tests."""
    alpha = float(rng.uniform(1.2, 1.8))
    c = float(np.exp(rng.uniform(np.log(5.0), np.log(300.0))))
    period = math.log(c) / alpha
    w = 2 * math.pi / period
    c0 = stable_constant(alpha) * float(rng.uniform(0.5, 2.0))
    raw = {n: complex(rng.normal(), rng.normal()) / n**2 for n in range(1, harmonics + 1)}
    # |theta'| <= sum n w |c_n| and |theta - c0| <= sum |c_n| (two-sided series)
    budget = sum(2 * abs(v) * (alpha + n * w) for n, v in raw.items())
    scale = float(rng.uniform(0.2, 0.9)) * alpha * c0 / budget
    coeffs = {0: complex(c0)}
    for n, v in raw.items():
        coeffs[n] = v * scale
        coeffs[-n] = (v * scale).conjugate()
    return SemistableSpec(alpha, c, PeriodicFunction(period, coeffs))
