"""Computable monitors: intermediate complex structure, alpha-harmonicity,
map energies, and hyperbolic collar / conformal-modulus formulas.

For a symmetric positive Codazzi field A over a conformal background g,
the metric h = g(A., .) has complex structure J-hat = Det(A)^{-1/2} J A,
and the identity map from (chart, h) to (chart, g) is alpha-harmonic for
the exact 1-form alpha = -d log(Det A) / 2.  The residual of that
statement, the energy identity joining the two identity-map energies to
the integral of 2 Tr(A) Cosh(phi/2), and the scalar collar formulas give
cheap, independently checkable diagnostics for solver output.
"""

import math

import numpy as np

from .grid import ConformalMetric, Grid
from .jcalc import J, det, inv2, trace
from .maps import FieldInterpolator, map_jacobian
from .operators import conformal_christoffels, general_christoffels
from .energy import codazzi_residual

__all__ = [
    "intermediate_J",
    "alpha_field",
    "alpha_curl",
    "alpha_harmonic_residual",
    "scalar_alpha_laplacian",
    "map_energy",
    "energy_identity_check",
    "collar_and_modulus",
    "modulus_lower_via_flat",
    "intermediate_modulus_bounds",
]


def _check_positive_symmetric(a):
    a = np.asarray(a, dtype=float)
    if np.max(np.abs(a[..., 0, 1] - a[..., 1, 0])) > 1e-10 * (1.0 + np.abs(a).max()):
        raise ValueError("field must be symmetric")
    if np.any(det(a) <= 0.0) or np.any(trace(a) <= 0.0):
        raise ValueError("field must be positive-definite")
    return a


def intermediate_J(a, g: ConformalMetric = None):
    """Complex structure of the intermediate metric: Det(A)^{-1/2} J A.

    Squares to -Id at every node; compatible with h = g(A., .).  The
    background only fixes the frame, so it is optional.
    """
    a = _check_positive_symmetric(a)
    return J / np.sqrt(det(a))[..., None, None] @ a


def _phi_field(a):
    return np.log(det(a))


def alpha_field(a, grid: Grid):
    """The 1-form alpha = -d log(Det A) / 2, components per node."""
    a = _check_positive_symmetric(grid.check_field(a, rank=2))
    phi = _phi_field(a)
    return np.stack([-0.5 * grid.ddx(phi), -0.5 * grid.ddy(phi)], axis=-1)


def alpha_curl(a, grid: Grid, margin=2):
    """Discrete curl of alpha; O(h^2) since alpha is exact by construction."""
    al = alpha_field(a, grid)
    curl = grid.ddx(al[..., 1]) - grid.ddy(al[..., 0])
    return float(np.max(np.abs(curl[grid.interior(margin)])))


def alpha_harmonic_residual(a, g: ConformalMetric, margin=3, codazzi_tol=None):
    """Defect of alpha-harmonicity of the identity from (chart, h) to (chart, g).

    h = g(A., .); the coordinate laplacian of the identity map reduces to
    h^{mn} (Gamma_g - Gamma_h)^k_{mn} and must match h^{kn} alpha_n, the
    source-sharp of alpha, within O(h^2) when A is Codazzi.  Passing a
    ``codazzi_tol`` certifies the field first; the default leaves the
    residual meaningful as a negative control for non-Codazzi input.
    """
    grid = g.grid
    a = _check_positive_symmetric(grid.check_field(a, rank=2))
    if codazzi_tol is not None:
        r = codazzi_residual(a, g)
        if r > codazzi_tol:
            raise ValueError(f"Codazzi residual {r:.3e} exceeds {codazzi_tol:.3e}")
    h = g.matrix() @ a
    hinv = inv2(h)
    gam_h = general_christoffels(grid, h)
    gam_g = conformal_christoffels(g)
    lap = np.einsum("...mn,...kmn->...k", hinv, gam_g - gam_h)
    al = alpha_field(a, grid)
    rhs = np.einsum("...kn,...n->...k", hinv, al)
    mask = grid.interior(margin)
    return float(np.max(np.abs((lap - rhs)[mask])))


def scalar_alpha_laplacian(f, a, g: ConformalMetric):
    """The operator Delta_h f - df(alpha-sharp) on scalar fields.

    Delta_h is the Laplace-Beltrami operator of h = g(A., .); the sharp is
    taken with h.  Non-negative at interior minima of alpha-harmonic
    compositions, up to O(h^2).
    """
    grid = g.grid
    a = _check_positive_symmetric(grid.check_field(a, rank=2))
    f = grid.check_field(f)
    h = g.matrix() @ a
    hinv = inv2(h)
    fx, fy = grid.ddx(f), grid.ddy(f)
    d2 = np.empty((grid.ny, grid.nx, 2, 2))
    d2[..., 0, 0] = grid.ddx(fx)
    d2[..., 0, 1] = grid.ddy(fx)
    d2[..., 1, 0] = d2[..., 0, 1]
    d2[..., 1, 1] = grid.ddy(fy)
    gam_h = general_christoffels(grid, h)
    df = np.stack([fx, fy], axis=-1)
    hess = d2 - np.einsum("...kij,...k->...ij", gam_h, df)
    lap = np.einsum("...ij,...ij->...", hinv, hess)
    al = alpha_field(a, grid)
    return lap - np.einsum("...ij,...i,...j->...", hinv, df, al)


def map_energy(x, gS: ConformalMetric, hN):
    """Energy of Phi(p) = p + X(p) from (chart, gS) into (chart, hN).

    Integrand g^{mn} h_{pq}(Phi) Phi^p_m Phi^q_n against dVol(gS); for a
    conformal source the factors cancel, so the value depends only on the
    source conformal class (exactly, even discretely).  ``x`` may be None
    for the identity map.
    """
    grid = gS.grid
    hN = grid.check_field(hN, rank=2)
    if x is None:
        dens = trace(inv2(gS.matrix()) @ hN) * gS.conformal_factor
        return float(np.sum(dens * grid.cell_weights()))
    x = grid.check_field(x, rank=1)
    xx, yy = grid.meshgrid()
    pts = np.stack([xx, yy], axis=-1) + x
    h_at = FieldInterpolator(grid, hN)(pts)
    jac = map_jacobian(grid, x)
    dens = trace(np.swapaxes(jac, -1, -2) @ h_at @ jac)
    return float(np.sum(dens * grid.cell_weights()))


def energy_identity_check(a, g: ConformalMetric):
    """Both sides of the paired identity-map energy identity.

    lhs: sum of the identity-map energies from the intermediate metric
    h = g(A., .) into g and into g(A., A.); rhs: the closed form
    int 2 Tr(A) Cosh(phi/2) dVol(g) with phi = log Det(A).  The two agree
    pointwise in exact arithmetic.
    """
    grid = g.grid
    a = _check_positive_symmetric(grid.check_field(a, rank=2))
    gm = g.matrix()
    h = gm @ a
    hinv = inv2(h)
    vol_h = np.sqrt(det(h))
    w = grid.cell_weights()
    e1 = float(np.sum(trace(hinv @ gm) * vol_h * w))
    e2 = float(np.sum(trace(hinv @ (gm @ a @ a)) * vol_h * w))
    phi = _phi_field(a)
    rhs = g.integrate(2.0 * trace(a) * np.cosh(0.5 * phi))
    return e1 + e2, rhs


def collar_and_modulus(sys, big_r, genus):
    """Collar and modulus formulas for a hyperbolic surface.

    Returns a dict with ``l2max`` (largest length of a second geodesic
    crossing the collar, arcsinh(1/sinh(sys/2))), ``L`` (conformal modulus
    of the embedded collar cylinder, (2 pi / sys) arctan(tanh R), only
    meaningful when the collar condition sinh(sys/2) sinh(2R) < 1 holds --
    reported via ``collar_valid`` rather than clamped), and ``mod_upper``
    (4 pi^2 (2 genus - 2) / sys^2).
    """
    if sys <= 0.0 or big_r <= 0.0:
        raise ValueError("systole and collar radius must be positive")
    if genus < 2:
        raise ValueError("genus must be at least 2")
    return {
        "l2max": math.asinh(1.0 / math.sinh(0.5 * sys)),
        "L": (2.0 * math.pi / sys) * math.atan(math.tanh(big_r)),
        "collar_valid": math.sinh(0.5 * sys) * math.sinh(2.0 * big_r) < 1.0,
        "mod_upper": 4.0 * math.pi**2 * (2 * genus - 2) / sys**2,
    }


def modulus_lower_via_flat(sys_flat, area_flat):
    """Bound 2 pi area / sys^2 on the modulus of an annulus.

    A degenerating systole makes the bound infinite, which is returned
    explicitly rather than clamped.
    """
    if sys_flat < 0.0 or area_flat < 0.0:
        raise ValueError("systole and area must be non-negative")
    if sys_flat == 0.0:
        return math.inf
    return 2.0 * math.pi * area_flat / sys_flat**2


def intermediate_modulus_bounds(b):
    """Modulus bounds for systole >= b^{-5/4} and area <= b.

    The formula gives 2 pi b^{7/2}; the looser figure 2 pi b^4 also
    circulates, so both are reported without adjudication.
    """
    if b <= 0.0:
        raise ValueError("b must be positive")
    return {
        "formula": 2.0 * math.pi * b ** 3.5,
        "stated": 2.0 * math.pi * b**4,
    }
