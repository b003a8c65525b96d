import cmath
import math

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from semifrac.charfun import CharExponent, SemistableSpec
from semifrac.density import semistable_cdf, semistable_density_grid
from semifrac.fracops import gl_weights
from semifrac.periodic import coefficients_from_samples, make_periodic
from semifrac.special import gamma_complex

FAST = settings(max_examples=40, deadline=None)
SLOW = settings(max_examples=4, deadline=None, suppress_health_check=[HealthCheck.too_slow])

alphas = st.floats(1.1, 1.95)


@st.composite
def specs(draw):
    alpha = draw(alphas)
    c = draw(st.floats(4.0, 400.0))
    eps = draw(st.floats(0.0, 0.3))
    c0 = draw(st.floats(0.1, 1.0))
    try:
        return SemistableSpec.cosine(alpha, c, eps, c0)
    except ValueError:
        assume(False)


complex_args = st.builds(complex, st.floats(-4.5, 4.5), st.floats(-6.0, 6.0)).filter(
    lambda z: min(abs(z - round(z.real)), abs(z)) > 0.05)


@FAST
@given(complex_args)
def test_gamma_recurrence(z):
    lhs, rhs = gamma_complex(z + 1), z * gamma_complex(z)
    assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1e-300)


@FAST
@given(complex_args)
def test_gamma_reflection(z):
    lhs = gamma_complex(z) * gamma_complex(1 - z)
    rhs = math.pi / cmath.sin(math.pi * z)
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


@FAST
@given(complex_args)
def test_gamma_conjugate(z):
    assert abs(gamma_complex(z.conjugate()) - gamma_complex(z).conjugate()) <= 1e-12 * abs(gamma_complex(z))


@FAST
@given(st.floats(0.05, 0.95), st.integers(1, 200))
def test_gl_weight_partial_sums(g, n):
    # sum_{j<=n} (-1)^j binom(g, j) = (-1)^n binom(g - 1, n)
    w = gl_weights(g, n)
    assert w.size == n + 1
    expected = math.exp(math.lgamma(n + 1 - g) - math.lgamma(1 - g) - math.lgamma(n + 1))
    assert abs(w.sum() - expected) <= 1e-12
    assert w[0] == 1.0 and np.all(w[1:] < 0)


@FAST
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=8),
       st.floats(0.5, 5.0), st.floats(-2, 2))
def test_spectrum_roundtrip(pairs, period, mean):
    coeffs = {0: mean}
    for n, (re, im) in enumerate(pairs, start=1):
        coeffs[n], coeffs[-n] = complex(re, im), complex(re, -im)
    pf = make_periodic(coeffs, period)
    samples = pf(np.arange(64) * period / 64)
    back = coefficients_from_samples(samples, period, len(pairs))
    assert max(abs(back.coeff(n) - pf.coeff(n)) for n in range(-len(pairs), len(pairs) + 1)) <= 1e-8


@FAST
@given(specs(), st.floats(0.01, 50.0))
def test_exponent_conjugate_symmetry(spec, k):
    ce = CharExponent(spec)
    a, b = complex(ce(-k)), complex(ce(k))
    assert abs(a - b.conjugate()) <= 1e-12 * abs(b)
    assert b.real < 0


@FAST
@given(specs(), st.floats(0.05, 20.0))
def test_exponent_discrete_scaling(spec, k):
    # psi(c^{1/alpha} k) = c psi(k)
    ce = CharExponent(spec)
    lhs = complex(ce(spec.c ** (1 / spec.alpha) * k))
    rhs = spec.c * complex(ce(k))
    assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


@SLOW
@given(specs(), st.floats(0.5, 3.0))
def test_density_mass_and_positivity(spec, t):
    ce = CharExponent(spec)
    L = 25.0 * t ** (1 / spec.alpha)
    xs = np.linspace(-L, L, 4001)
    p = semistable_density_grid(ce, xs, t)
    assert p.min() >= -1e-10
    mass = np.trapezoid(p, xs) + semistable_cdf(ce, -L, t) + 1 - semistable_cdf(ce, L, t)
    assert abs(mass - 1) <= 1e-6
