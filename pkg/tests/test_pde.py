import math

import numpy as np
import pytest

from semifrac.density import stable_pde_solution
from semifrac.duality import stable_kernel
from semifrac.pde import (CFL_LIMIT, Grid1D, InstabilityError, coarsen, exact_transport, h_paths,
                          residual_semifrac_space, residual_semifrac_time,
                          solve_time_fractional_transport, time_residuals)

A = 1.5
G = 1 / A
T0 = 3.5


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid1D(0.0, 1.0, 0.0, 0.1, 1.0)
    with pytest.raises(ValueError):
        Grid1D(0.5, 1.0, 0.1, 0.1, 1.0)
    g = Grid1D.for_transport(G, 0.05, T0, 4.0)
    assert g.dt**G / g.dx <= CFL_LIMIT + 1e-12
    assert g.nt * g.dt == pytest.approx(T0)
    assert g.nx == 81


def test_cfl_violation_is_named():
    bad = Grid1D(0.0, 2.0, 0.05, 0.05, 1.0)
    with pytest.raises(ValueError, match="CFL"):
        solve_time_fractional_transport(G, bad)
    with pytest.raises(InstabilityError, match="CFL"):
        solve_time_fractional_transport(G, bad, check_cfl=False)


@pytest.fixture(scope="module")
def fine():
    grid = Grid1D.for_transport(G, 0.02, T0, 2.0)
    return grid, solve_time_fractional_transport(G, grid)


def test_fine_grid_ratio_at_origin(fine):
    grid, field = fine
    h0 = field.at_time()[0]
    p0 = stable_pde_solution(A, -1.0, 1.0, 0.0, 0.0, T0)
    assert abs(h0 / p0 - 1.5) <= 0.05


def test_fine_grid_band(fine):
    grid, field = fine
    ratio = field.at_time() / exact_transport(A, grid.x, T0)
    assert np.all(np.abs(ratio - 1) <= 0.03)


def test_positivity(fine):
    assert fine[1].values.min() >= -1e-8


def test_coarse_drift_reaches_reference_endpoint():
    grid = Grid1D.for_transport(G, 0.05, T0, 4.0)
    h = solve_time_fractional_transport(G, grid).at_time()
    ratio = h / (exact_transport(A, grid.x, T0) / A)
    assert abs(ratio[0] - 1.5) <= 0.1
    assert np.all(np.diff(ratio[::20]) < 0)  # monotone drift downwards
    assert abs(ratio[-1] - 1.2) <= 0.1


def test_mass_conservation():
    # large domain so outflow at the right edge is negligible up to T0
    grid = Grid1D.for_transport(G, 0.05, T0, 20.0)
    mass = solve_time_fractional_transport(G, grid).mass
    assert mass[0] == pytest.approx(1.0, rel=1e-14)
    assert np.all(np.abs(mass - mass[0]) <= 0.02 * mass[0])


def test_convergence_under_refinement():
    errs = []
    for dx in (0.1, 0.05, 0.025):
        grid = Grid1D.for_transport(G, dx, T0, 2.0)
        h = solve_time_fractional_transport(G, grid).at_time()
        errs.append(np.max(np.abs(h - exact_transport(A, grid.x, T0))))
    assert errs[0] > errs[1] > errs[2]
    order = np.polyfit(np.log([0.1, 0.05, 0.025]), np.log(errs), 1)[0]
    assert order >= 1.0


def test_space_residual_stable(stable_ce):
    r = residual_semifrac_space(stable_ce, 0.5, 1.0)
    assert r.relative <= 1e-3


@pytest.mark.parametrize("x", [-1.0, 0.0, 1.0])
def test_space_residual_default(default_ce, x):
    assert residual_semifrac_space(default_ce, x, 1.0).relative <= 1e-3


def _gaussian(var_rate=2.0):
    def p(x, t):
        v = var_rate * t
        return np.exp(-x * x / (2 * v)) / np.sqrt(2 * np.pi * v)

    def p_t(x, t):
        v = var_rate * t
        return p(x, t) * (x * x / (2 * v * t) - 1 / (2 * t))

    def p_x(x, t):
        return -x / (var_rate * t) * p(x, t)

    return p, p_t, p_x


@pytest.mark.parametrize("x", [-1.0, 0.0, 1.0])
def test_space_residual_rejects_gaussian(default_ce, x):
    cand = _gaussian()
    r = residual_semifrac_space(default_ce, x, 1.0, candidate=cand)
    # measured against the true time derivative scale at the same point
    true = residual_semifrac_space(default_ce, x, 1.0)
    assert abs(r.residual) >= 10 * 1e-3 * true.scale


def test_time_residual_stable(stable_ce, stable_spectrum):
    r = residual_semifrac_time(stable_ce, stable_spectrum, 1.0, 2.0)
    assert r.relative <= 1e-2
    with pytest.raises(ValueError):
        residual_semifrac_time(stable_ce, stable_spectrum, 0.0, 2.0)


@pytest.fixture(scope="module")
def default_paths(default_ce):
    return h_paths(default_ce, [1.0], 2.0, 5e-4, 0.01, offsets=(-4, -2, -1, 0, 1, 2, 4))


def test_time_residual_default_and_refinement(default_paths, default_spectrum):
    fine = time_residuals(default_paths, default_spectrum.tau, G, [2.0])[0]
    coarse = time_residuals(coarsen(default_paths), default_spectrum.tau, G, [2.0])[0]
    assert coarse.relative <= 1e-2
    assert coarse.relative / fine.relative >= 1.5


def test_time_residual_kernel_mismatch(default_paths, default_spectrum):
    coarse = coarsen(default_paths)
    good = time_residuals(coarse, default_spectrum.tau, G, [2.0])[0]
    bad = time_residuals(coarse, stable_kernel(A, default_spectrum.tau.period), G, [2.0])[0]
    assert bad.relative >= 5 * good.relative


def test_single_point_helper_matches_paths(default_ce, default_spectrum, default_paths):
    direct = residual_semifrac_time(default_ce, default_spectrum, 1.0, 2.0)
    via = time_residuals(coarsen(default_paths), default_spectrum.tau, G, [2.0])[0]
    assert direct.residual == pytest.approx(via.residual, rel=1e-9, abs=1e-14)
