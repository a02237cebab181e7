"""Deformation families of the relative energy over conformal structures."""

import numpy as np
import pytest

from codazzi import teich
from codazzi.grid import ConformalMetric, Grid, poincare_disk
from codazzi.jcalc import ID2
from codazzi.randfields import rng_for, tracefree_codazzi_conformal


@pytest.fixture(scope="module")
def family():
    h0 = poincare_disk(Grid(48, 48, 0.8, 0.8, "dirichlet"))
    b = tracefree_codazzi_conformal(h0, rng_for(3), amp=0.25)
    return h0, b, teich.DeformationFamily.build(b, h0)


def test_phi0_is_nonnegative(family):
    _, _, fam = family
    assert float(fam.phi0.min()) >= -1e-10


def test_phi0_vanishes_for_zero_direction():
    h0 = poincare_disk(Grid(24, 24, 0.8, 0.8, "dirichlet"))
    phi0 = teich.phi0_solve(np.zeros((24, 24, 2, 2)), h0)
    assert np.max(np.abs(phi0)) < 1e-12


def test_phi0_plateau_value_on_large_flat_chart():
    # constant trace-free direction of size s: phi0 -> s^2/2 in the bulk
    grid = Grid(96, 96, 12.0, 12.0, "dirichlet")
    flat = ConformalMetric.flat(grid)
    s = 0.7
    b = np.zeros((96, 96, 2, 2))
    b[..., 0, 0] = s
    b[..., 1, 1] = -s
    phi0 = teich.phi0_solve(b, flat)
    assert float(phi0[48, 48]) == pytest.approx(0.5 * s * s, abs=2e-3)


def test_e_hat_conformal_value(family):
    h0, _, _ = family
    c = 1.4
    assert teich.e_hat(h0, c * c * h0.matrix()) == pytest.approx(
        2.0 * c * h0.area(), abs=1e-10
    )


def test_first_derivative_matches_fd(family):
    h0, b, fam = family
    c = 1.4
    grid = h0.grid
    a0 = np.broadcast_to(c * ID2, (grid.ny, grid.nx, 2, 2)).copy()
    target = c * c * h0.matrix()
    eps = 1e-4
    fd = (fam.e_hat_along(target, eps) - fam.e_hat_along(target, -eps)) / (2 * eps)
    cf = teich.e_hat_first_derivative(a0, b, h0)
    assert abs(fd - cf) / max(1.0, abs(cf)) < 1e-2


def test_second_derivative_lower_bound(family):
    h0, _, fam = family
    grid = h0.grid
    c = 1.4
    a0 = np.broadcast_to(c * ID2, (grid.ny, grid.nx, 2, 2)).copy()
    target = c * c * h0.matrix()
    lhs, rhs = teich.second_derivative_lower_bound(a0, fam, target)
    assert rhs > 0.0
    assert lhs >= rhs - (1e-8 + 1e-2 * abs(rhs))


def test_critical_sum_vanishes_for_tracefree_direction(family):
    h0, b, _ = family
    grid = h0.grid
    a0 = np.broadcast_to(1.4 * ID2, (grid.ny, grid.nx, 2, 2)).copy()
    assert teich.critical_sum_check(a0, a0, b, h0) < 1e-10


def test_phi0_rejects_directions_with_trace():
    h0 = poincare_disk(Grid(24, 24, 0.8, 0.8, "dirichlet"))
    bad = np.zeros((24, 24, 2, 2))
    bad[..., 0, 0] = 1.0
    bad[..., 1, 1] = 1.0
    with pytest.raises(ValueError):
        teich.phi0_solve(bad, h0)
