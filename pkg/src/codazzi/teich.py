"""Variation of the trace energy along quadratic deformation families.

The two-argument functional e_hat(g, h) integrates Tr(A) against the area
of the base metric.  Along the family B_t = (1 + t^2 phi0) Id + t B, with B
trace-free symmetric Codazzi and phi0 the solution of (Laplace_h - 2) phi0
= Det(B), the first and second t-derivatives have closed forms whose
finite-difference verification is the point of this module.  Evaluating
the functional with the identity map (rather than re-solving for the
one-harmonic map at each t) gives an upper envelope that touches at t = 0,
so first derivatives agree there and the finite-difference second
derivative dominates the closed-form lower bound.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse
import scipy.sparse.linalg

from .grid import ConformalMetric, Grid
from .jcalc import ID2, det, inv2, spd_sqrt, trace
from .energy import codazzi_residual, field_A

__all__ = [
    "e_hat",
    "e_hat_general",
    "phi0_solve",
    "e_hat_first_derivative",
    "first_derivative_general",
    "DeformationFamily",
    "second_derivative_lower_bound",
    "critical_sum_check",
]


def e_hat(g: ConformalMetric, h):
    """Two-argument trace energy: integral of Tr(A) against dArea_g.

    A is the positive g-self-adjoint square root with h = g(A., A.).  When
    A is Codazzi this is the critical value of the underlying variational
    problem; the Codazzi residual is the caller's concern and available
    via :func:`codazzi.energy.codazzi_residual`.
    """
    return g.integrate(trace(field_A(h, g)))


def e_hat_general(grid: Grid, base, target):
    """Trace energy of ``target`` over an arbitrary SPD base metric field.

    Needed along deformation families whose intermediate metrics are not
    conformal; reduces to :func:`e_hat` when ``base`` is e^{2 phi} Id.
    """
    base = grid.check_field(base, rank=2)
    target = grid.check_field(target, rank=2)
    a = spd_sqrt(inv2(base) @ target)
    dens = trace(a) * np.sqrt(det(base))
    return float(np.sum(dens * grid.cell_weights()))


def _check_tracefree_symmetric(b, tol=1e-10):
    b = np.asarray(b, dtype=float)
    scale = 1.0 + np.abs(b).max()
    if np.max(np.abs(trace(b))) > tol * scale:
        raise ValueError("field is not trace-free")
    if np.max(np.abs(b[..., 0, 1] - b[..., 1, 0])) > tol * scale:
        raise ValueError("field is not symmetric")
    return b


def phi0_solve(b, h: ConformalMetric):
    """Solve (Laplace_h - 2) phi0 = Det(B), zero Dirichlet boundary values.

    For trace-free symmetric B the right side is non-positive, so the
    maximum principle forces phi0 >= 0; the discrete operator is an
    M-matrix and inherits the sign.  Returns the full node field.
    """
    grid = h.grid
    if grid.periodic:
        raise ValueError("phi0_solve needs a Dirichlet chart")
    b = _check_tracefree_symmetric(grid.check_field(b, rank=2))
    rhs_full = det(b) * h.conformal_factor  # multiplied through by e^{2 phi}
    ny, nx = grid.ny, grid.nx
    mask = grid.interior(1)
    num = np.full((ny, nx), -1, dtype=int)
    num[mask] = np.arange(mask.sum())
    rows, cols, vals = [], [], []
    rhs = np.empty(mask.sum())
    cx, cy = 1.0 / grid.dx**2, 1.0 / grid.dy**2
    w = h.conformal_factor
    jj, ii = np.where(mask)
    for k, (j, i) in enumerate(zip(jj, ii)):
        rows.append(k)
        cols.append(k)
        vals.append(-2.0 * (cx + cy) - 2.0 * w[j, i])
        for j2, i2, c in ((j, i - 1, cx), (j, i + 1, cx), (j - 1, i, cy), (j + 1, i, cy)):
            if num[j2, i2] >= 0:
                rows.append(k)
                cols.append(num[j2, i2])
                vals.append(c)
        rhs[k] = rhs_full[j, i]
    mat = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(rhs.size, rhs.size))
    sol = scipy.sparse.linalg.spsolve(mat, rhs)
    out = np.zeros((ny, nx))
    out[mask] = sol
    return out


def e_hat_first_derivative(a0, bdot0, h0: ConformalMetric):
    """Closed-form t-derivative at t = 0: -integral of Tr(A0 Bdot0) dArea[h0].

    ``bdot0`` must be trace-free; ``a0`` is the Codazzi field at the base
    point of the family.
    """
    grid = h0.grid
    a0 = grid.check_field(a0, rank=2)
    bdot0 = _check_tracefree_symmetric(grid.check_field(bdot0, rank=2))
    return -h0.integrate(trace(a0 @ bdot0))


def first_derivative_general(a_t, b_t, bdot_t, area_weights):
    """General t-derivative: integral of [Tr(A)Tr(B^-1 Bdot) - Tr(A B^-1 Bdot)].

    ``area_weights`` is the nodewise area measure of the base metric at
    parameter t (conformal factor times cell weight for conformal bases).
    Valid for families with [B_t, Bdot_t] = 0, which holds along every
    quadratic family built here.
    """
    m = inv2(b_t) @ bdot_t
    dens = trace(a_t) * trace(m) - trace(a_t @ m)
    return float(np.sum(dens * area_weights))


@dataclass(frozen=True)
class DeformationFamily:
    """Quadratic family B_t = (1 + t^2 phi0) Id + t B over a conformal base.

    ``b`` is trace-free, symmetric and (up to discretization) Codazzi for
    ``h0``; ``phi0`` solves the (Laplace_h - 2) equation so that the family
    of metrics h_t = h0(B_t ., B_t .) stays within the constant-curvature
    class to second order.
    """

    h0: ConformalMetric
    b: np.ndarray = field(repr=False)
    phi0: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, b, h0: ConformalMetric):
        b = _check_tracefree_symmetric(h0.grid.check_field(b, rank=2))
        return cls(h0, b, phi0_solve(b, h0))

    def codazzi_residual(self):
        return codazzi_residual(self.b, self.h0)

    def b_t(self, t):
        scale = 1.0 + t * t * self.phi0
        out = scale[..., None, None] * ID2 + t * self.b
        if np.any(det(out) <= 0.0) or np.any(trace(out) <= 0.0):
            raise ValueError(f"family leaves the positive cone at t = {t}")
        return out

    def h_t_matrix(self, t):
        bt = self.b_t(t)
        h0m = self.h0.conformal_factor[..., None, None] * ID2
        return np.swapaxes(bt, -1, -2) @ h0m @ bt

    def e_hat_along(self, target, t):
        """Trace energy of a fixed target metric over the deformed base."""
        return e_hat_general(self.h0.grid, self.h_t_matrix(t), target)


def second_derivative_lower_bound(a0, family: DeformationFamily, target, eps=3e-3):
    """FD second derivative of the family energy and its closed-form bound.

    Returns ``(lhs_fd, rhs)``: the central second difference at t = 0 of
    e_hat along the family (identity-map envelope), and the lower bound
    2 * integral of phi0 Tr(A0) dArea[h0].  The envelope property gives
    lhs_fd >= rhs up to discretization slack, strictly positive for
    nonzero B.
    """
    grid = family.h0.grid
    a0 = grid.check_field(a0, rank=2)
    ep = family.e_hat_along(target, eps)
    e0 = family.e_hat_along(target, 0.0)
    em = family.e_hat_along(target, -eps)
    lhs = (ep - 2.0 * e0 + em) / eps**2
    rhs = family.h0.integrate(2.0 * family.phi0 * trace(a0))
    return lhs, rhs


def critical_sum_check(aplus, aminus, b, h0: ConformalMetric):
    """Pairing of A+ + A- against a trace-free Codazzi direction B.

    At a critical pair of the two-metric functional this integral vanishes
    for every admissible B; the returned scalar is the defect.
    """
    grid = h0.grid
    s = grid.check_field(aplus, rank=2) + grid.check_field(aminus, rank=2)
    b = _check_tracefree_symmetric(grid.check_field(b, rank=2))
    return h0.integrate(trace(s @ b))
