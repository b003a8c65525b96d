import cmath
import math

import numpy as np
import pytest

from semifrac.charfun import CharExponent, psi_series
from semifrac.fracops import (FracOrder, SampledPath, caputo_gl, gl_weights, rl_semifrac_step,
                              semifrac_caputo, semifrac_space_generator)
from semifrac.laplace import xi
from semifrac.periodic import cosine_series

G = 2 / 3


def const_kernel(gamma, period=1.0):
    return cosine_series(1 / math.gamma(1 - gamma), {}, period)


def test_order_validation():
    with pytest.raises(ValueError):
        FracOrder(1.0)
    with pytest.raises(ValueError):
        SampledPath(0.0, 0.0, [1.0], 1.0)
    with pytest.raises(ValueError):
        SampledPath(0.0, 0.1, [], 1.0)


def test_gl_weights():
    assert np.allclose(gl_weights(0.5, 3), [1, -0.5, -0.125, -0.0625])
    assert np.allclose(gl_weights(1 - 1e-12, 3), [1, -1, 0, 0], atol=1e-11)
    w = gl_weights(G, 5000)
    assert w[0] > 0 and np.all(w[1:] < 0)
    partial = np.cumsum(w)
    assert np.all(partial > 0) and np.all(np.diff(partial) < 0)
    assert partial[-1] < 0.01


def test_caputo_constant_and_linear():
    assert caputo_gl(SampledPath(0.0, 1e-3, np.full(1001, 2.0), 2.0), 0.5) == 0.0
    path = SampledPath.from_function(lambda t: t, 1.0, 1e-3)
    assert caputo_gl(path, 0.5) == pytest.approx(1 / math.gamma(1.5), rel=0.02)


def test_caputo_first_order():
    exact = 2 / math.gamma(3 - G)
    errs = [abs(caputo_gl(SampledPath.from_function(lambda t: t * t, 1.0, dt), G) - exact)
            for dt in (4e-3, 2e-3, 1e-3)]
    assert errs[0] / errs[1] > 1.8 and errs[1] / errs[2] > 1.8


def _lt(values, dt, s):
    t = np.arange(values.size) * dt
    return np.trapezoid(np.exp(-s * t) * values, t)


def test_caputo_laplace_characterisation():
    dt, T = 1e-3, 20.0
    n = int(T / dt)
    f = np.exp(-np.arange(n + 1) * dt)
    w = gl_weights(G, n)
    # caputo_gl at every grid time via one convolution
    out = dt**-G * np.convolve(w, f - 1.0)[: n + 1]
    assert out[500] == pytest.approx(caputo_gl(SampledPath(0.0, dt, f[:501], 1.0), G), rel=1e-12)
    s = 1.0
    assert _lt(out, dt, s) == pytest.approx(s**G / (s + 1) - s ** (G - 1), rel=0.01)


def test_semifrac_caputo_constant_path():
    assert semifrac_caputo(SampledPath(0.0, 1e-2, np.ones(50), 1.0), const_kernel(G), G) == 0.0


def test_semifrac_caputo_reduces_to_classical():
    path = SampledPath.from_function(lambda t: t * t, 1.0, 1e-3)
    a = semifrac_caputo(path, const_kernel(0.5), 0.5)
    assert a == pytest.approx(caputo_gl(path, 0.5), rel=0.01)
    assert a == pytest.approx(2 / math.gamma(2.5), rel=1e-4)
    lin = SampledPath.from_function(lambda t: 3 * t, 1.0, 1e-2)
    assert semifrac_caputo(lin, const_kernel(0.5), 0.5) == pytest.approx(3 / math.gamma(1.5), rel=1e-12)


def test_semifrac_caputo_stable_kernel_matches_classical(stable_spectrum):
    path = SampledPath.from_function(lambda t: math.sin(t), 2.0, 1e-3)
    a = semifrac_caputo(path, stable_spectrum.tau, G)
    b = semifrac_caputo(path, const_kernel(G), G)
    assert a == pytest.approx(b, rel=1e-9)
    assert a == pytest.approx(caputo_gl(path, G), rel=0.01)


@pytest.mark.parametrize("s", [1.0, 2.0])
def test_semifrac_caputo_laplace_characterisation(default_spectrum, default_ls, s):
    dt, T = 1e-2, 20.0
    n = int(T / dt)
    f = np.exp(-np.arange(n + 1) * dt)
    out = np.array([semifrac_caputo(SampledPath(0.0, dt, f[: j + 1], 1.0), default_spectrum.tau, G)
                    for j in range(n + 1)])
    expected = xi(default_ls, s) / (s + 1) - xi(default_ls, s) / s
    assert _lt(out, dt, s) == pytest.approx(expected, rel=0.01)


def test_rl_step(stable_spectrum, default_spectrum):
    rho = const_kernel(G, math.log(100))
    assert rl_semifrac_step(rho, G, 1.0) == pytest.approx(1 / math.gamma(1 / 3), rel=1e-14)
    r = default_spectrum.rho
    c = 100.0
    for t in (0.3, 1.0, 4.0):
        assert rl_semifrac_step(r, G, c * t) == pytest.approx(c**-G * rl_semifrac_step(r, G, t), rel=1e-12)
        assert abs(rl_semifrac_step(stable_spectrum.rho, G, t)) <= 1e-10
    with pytest.raises(ValueError):
        rl_semifrac_step(r, G, 0.0)


def test_generator_stable_symbol(stable_spec):
    k = 1.0
    val = semifrac_space_generator(stable_spec, lambda x: -1j * k * np.exp(-1j * k * x), 0.0,
                                   y_max=2e4, width=0.25)
    assert abs(val - cmath.exp(0.75j * math.pi)) <= 1e-6


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0])
def test_generator_symbol_default(default_spec, default_ce, k):
    val = semifrac_space_generator(default_spec, lambda x: -1j * k * np.exp(-1j * k * x), 0.3,
                                   y_max=2e4, width=0.25)
    ref = psi_series(default_ce, k) * cmath.exp(-1j * k * 0.3)
    assert abs(val - ref) <= 1e-6 * abs(ref)


def test_generator_linear_is_zero(default_spec):
    assert abs(semifrac_space_generator(default_spec, lambda x: np.full(np.shape(x), 2.5), 0.7,
                                        tail="hold")) <= 1e-12
