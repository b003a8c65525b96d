import cmath
import math

import mpmath as mp
import numpy as np
import pytest

from semifrac.charfun import StableParams
from semifrac.density import stable_cdf
from semifrac.special import (QuadratureError, QuadratureSpec, gamma_complex, integrate_real,
                              oscillatory_inverse_fourier)


def test_gamma_simple_values():
    assert gamma_complex(1) == pytest.approx(1.0, rel=1e-15)
    assert gamma_complex(0.5).real == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    with pytest.raises(ValueError):
        gamma_complex(0)
    with pytest.raises(ValueError):
        gamma_complex(-3)


def test_gamma_golden(golden):
    z = complex(*golden["gamma_n1"]["z"])
    ref = complex(*golden["gamma_n1"]["value"])
    assert abs(gamma_complex(z) - ref) <= 1e-10 * abs(ref)


def test_gamma_against_mpmath_region(rng):
    for _ in range(200):
        z = complex(rng.uniform(-10, 10), rng.uniform(-50, 50))
        ref = complex(mp.gamma(mp.mpc(z.real, z.imag)))
        assert abs(gamma_complex(z) - ref) <= 1e-12 * abs(ref)


def test_gamma_conjugate_symmetry(rng):
    for _ in range(50):
        z = complex(rng.uniform(-5, 5), rng.uniform(-20, 20))
        assert abs(gamma_complex(z.conjugate()).conjugate() - gamma_complex(z)) <= 1e-15 * abs(gamma_complex(z))


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=5)


def test_integrate_real_examples():
    assert integrate_real(lambda x: 1.0, 0, 1) == pytest.approx(1.0, rel=1e-14)
    assert integrate_real(lambda x: math.exp(-x), 0, math.inf) == pytest.approx(1.0, rel=1e-12)
    assert integrate_real(lambda x: math.exp(-x), 0, 40) == pytest.approx(1.0, rel=1e-12)
    # x^{-1/2} on (0, 1] with x = u^2
    val = integrate_real(lambda u: 2.0, 0, 1)
    assert abs(val - 2) <= 2e-10


def test_integrate_real_reports_failure():
    with pytest.raises(QuadratureError):
        integrate_real(lambda x: math.sin(1 / x) / x**2, 1e-6, 1,
                       QuadratureSpec(abs_tol=1e-14, rel_tol=1e-14, max_subdivisions=10))


def test_inverse_fourier_gaussian():
    phi = lambda k: np.exp(-k * k)
    assert oscillatory_inverse_fourier(phi, 0.0, 7.0) == pytest.approx(1 / (2 * math.sqrt(math.pi)), rel=1e-13)
    assert oscillatory_inverse_fourier(phi, 2.0, 7.0) == pytest.approx(math.exp(-1) / (2 * math.sqrt(math.pi)), rel=1e-12)


def test_inverse_fourier_refinement_oracle():
    phi = lambda k: np.exp((1j * k.astype(complex)) ** 1.5)
    value = oscillatory_inverse_fourier(phi, 1.0, 40.0)
    # self-oracle on a 10x finer grid of plain Gauss-Legendre panels
    edges = np.concatenate(([0.0], np.geomspace(1e-8, 1e-2, 40), np.linspace(1e-2, 40, 4001)[1:]))
    nodes, weights = np.polynomial.legendre.leggauss(16)
    a, b = edges[:-1], edges[1:]
    k = ((a + b)[:, None] + (b - a)[:, None] * nodes) / 2
    w = (b - a)[:, None] * weights / 2
    fine = float(np.sum(w * np.real(np.exp(-1j * k) * phi(k)))) / math.pi
    assert abs(value - fine) <= 1e-8


def test_inverse_fourier_checks():
    with pytest.raises(ValueError):
        oscillatory_inverse_fourier(lambda k: np.exp(-k * k) * (1 + 1j), 0.0, 7.0)
    with pytest.raises(QuadratureError):
        oscillatory_inverse_fourier(lambda k: np.exp(-k * k), 0.0, 2.0)
    res = oscillatory_inverse_fourier(lambda k: np.exp(-k * k), 0.0, 7.0, full_output=True)
    assert res.error < 1e-12 and res.K == 7.0


def test_inverse_fourier_mass():
    phi = lambda k: np.exp((1j * k.astype(complex)) ** 1.5)
    xs = np.linspace(-12, 6, 721)
    vals = np.array([oscillatory_inverse_fourier(phi, x, 40.0, check=False) for x in xs])
    # the heavy left tail holds ~0.5% of the mass; add both tails by Gil-Pelaez
    p = StableParams(1.5, -1.0, abs(math.cos(0.75 * math.pi)) ** (2 / 3))
    mass = np.trapezoid(vals, xs) + stable_cdf(p, -12.0) + (1 - stable_cdf(p, 6.0))
    assert abs(mass - 1) <= 1e-6
