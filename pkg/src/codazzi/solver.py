"""Newton solver with continuation for one-harmonic displacement fields.

Unknown: a displacement field X on a Dirichlet chart, zero on the boundary,
such that the pullback of the target metric h through Phi(p) = p + X(p) is
a critical point of the energy with respect to the background g (see
:func:`solver_residual` for what is actually driven to zero and why).
Manufactured solutions (pullbacks of metrics with Codazzi A through known
small diffeomorphisms) make the solver testable to tight tolerances.

The Jacobian is assembled by finite differences with column coloring: the
residual at a node only sees unknowns within a fixed stencil radius, so
columns a fixed stride apart can be probed simultaneously.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .grid import ConformalMetric, Grid
from .energy import codazzi_residual, correction_G, energy_gradient, field_A
from .maps import FieldInterpolator, FoldOverError, pullback_metric
from .operators import curvature

__all__ = [
    "SolveReport",
    "SolverError",
    "CurvatureSignError",
    "residual",
    "solver_residual",
    "newton_solve",
    "continuation_solve",
]

# Stencil radius of the corrected-gradient residual: four nested first
# derivatives, each reaching two nodes at a one-sided Dirichlet boundary
# stencil.  Columns at least 2*8+1 nodes apart never collide.
_STENCIL_REACH = 8
_COLOR_STRIDE = 2 * _STENCIL_REACH + 1


class SolverError(RuntimeError):
    """Newton or continuation failed to converge."""


class CurvatureSignError(ValueError):
    """The background metric is not negatively curved where required."""


def _lap5(grid, f):
    """Compact 5-point Laplacian, zero on the boundary ring.

    Unlike nested central differences this stencil couples adjacent nodes,
    so it sees the highest-frequency (checkerboard) modes that the wide
    central-difference operators are blind to.
    """
    out = np.zeros_like(f)
    out[1:-1, 1:-1] = (
        (f[1:-1, 2:] - 2.0 * f[1:-1, 1:-1] + f[1:-1, :-2]) / grid.dx**2
        + (f[2:, 1:-1] - 2.0 * f[1:-1, 1:-1] + f[:-2, 1:-1]) / grid.dy**2
    )
    return out


@dataclass
class SolveReport:
    """Machine-readable record of a solve."""

    iterations: int = 0
    residuals: list = field(default_factory=list)
    steps: list = field(default_factory=list)
    codazzi_residual: float = 0.0

    def to_dict(self):
        return {
            "iterations": int(self.iterations),
            "residuals": [float(r) for r in self.residuals],
            "steps": [float(s) for s in self.steps],
            "codazzi_residual": float(self.codazzi_residual),
        }


def _require_negative_curvature(g):
    k = curvature(g)
    if np.max(k) >= 0.0:
        raise CurvatureSignError("background curvature must be negative everywhere")


def residual(x, g: ConformalMetric, h_interp):
    """Corrected gradient grad E - G of the pulled-back target at X.

    Vanishes (to discretization error) exactly when the pullback's A field
    is Codazzi.  This is the analytic characterization of criticality; the
    Newton iteration itself drives :func:`solver_residual` instead, because
    the triple derivative inside G amplifies off-node interpolation error
    far above useful Newton tolerances.
    """
    hp = pullback_metric(g.grid, h_interp, x)
    return energy_gradient(hp, g) - correction_G(hp, g)


def solver_residual(x, g: ConformalMetric, h_interp, stabilization=1.0):
    """Residual driven by Newton: grad E plus a checkerboard suppressor.

    The correction G of the continuum theory restores ellipticity in
    directions the energy Hessian cannot see on a closed surface; on a
    Dirichlet chart with negative curvature the second variation is already
    positive definite, so criticality is equivalent to grad E = 0.  The
    discrete central-difference Hessian is however nearly blind to
    grid-frequency (checkerboard) displacement modes; the consistent
    O(h^2) term -stabilization * dx * dy * Laplace(X) removes that spurious
    near-kernel without moving the smooth discrete solution at leading
    order.
    """
    hp = pullback_metric(g.grid, h_interp, x)
    r = energy_gradient(hp, g)
    if stabilization:
        lap = np.stack(
            [_lap5(g.grid, x[..., 0]), _lap5(g.grid, x[..., 1])], axis=-1
        )
        r = r - stabilization * g.grid.dx * g.grid.dy * lap
    return r


def _interior_index(grid: Grid):
    mask = grid.interior(1)
    return np.where(mask.ravel())[0], mask


def _pack(x, idx):
    return x.reshape(-1, 2)[idx].ravel()


def _unpack(vec, grid, idx):
    x = np.zeros((grid.ny * grid.nx, 2))
    x[idx] = vec.reshape(-1, 2)
    return x.reshape(grid.ny, grid.nx, 2)


def _residual_vec(vec, g, h_interp, idx):
    x = _unpack(vec, g.grid, idx)
    r = solver_residual(x, g, h_interp)
    return _pack(r, idx)


def _fd_jacobian(vec, g, h_interp, idx, base, eps=1e-6):
    """Colored finite-difference Jacobian of the packed residual."""
    grid = g.grid
    n = vec.size
    jac = np.zeros((n, n))
    jj, ii = np.unravel_index(idx, (grid.ny, grid.nx))
    # map packed position -> (row colour, col colour)
    for cy in range(min(_COLOR_STRIDE, grid.ny)):
        for cx in range(min(_COLOR_STRIDE, grid.nx)):
            sel = (jj % _COLOR_STRIDE == cy) & (ii % _COLOR_STRIDE == cx)
            if not np.any(sel):
                continue
            for comp in range(2):
                cols = 2 * np.where(sel)[0] + comp
                pert = vec.copy()
                pert[cols] += eps
                dr = (_residual_vec(pert, g, h_interp, idx) - base) / eps
                # attribute each row of dr to the unique nearby column
                for col, j0, i0 in zip(cols, jj[sel], ii[sel]):
                    near = (np.abs(jj - j0) <= _STENCIL_REACH) & (
                        np.abs(ii - i0) <= _STENCIL_REACH
                    )
                    rows = np.repeat(near, 2)
                    jac[rows, col] = dr[rows]
    return jac


def newton_solve(
    g: ConformalMetric,
    h,
    x0=None,
    tol=1e-8,
    max_iter=20,
    max_halvings=8,
    report=None,
):
    """Damped Newton iteration for the corrected critical-point equation.

    ``h`` may be an SPD matrix field or a prebuilt :class:`FieldInterpolator`.
    Returns ``(x, report)``; raises :class:`SolverError` if the residual
    fails to reach ``tol``.
    """
    grid = g.grid
    if grid.periodic:
        raise ValueError("the solver needs a Dirichlet chart")
    _require_negative_curvature(g)
    if not isinstance(h, FieldInterpolator):
        h = FieldInterpolator(grid, grid.check_field(h, rank=2))
    idx, _ = _interior_index(grid)
    vec = (
        np.zeros(2 * idx.size)
        if x0 is None
        else _pack(grid.check_field(x0, rank=1), idx)
    )
    if report is None:
        report = SolveReport()

    def _finish(v):
        x = _unpack(v, grid, idx)
        hp = pullback_metric(grid, h, x)
        report.codazzi_residual = codazzi_residual(field_A(hp, g), g)
        return x, report

    r = _residual_vec(vec, g, h, idx)
    rnorm = float(np.max(np.abs(r)))
    report.residuals.append(rnorm)
    for _ in range(max_iter):
        if rnorm <= tol:
            return _finish(vec)
        jac = _fd_jacobian(vec, g, h, idx, r)
        try:
            step = scipy.linalg.solve(jac, -r)
        except scipy.linalg.LinAlgError as exc:
            raise SolverError("singular Newton system") from exc
        lam = 1.0
        for _ in range(max_halvings + 1):
            try:
                r_new = _residual_vec(vec + lam * step, g, h, idx)
            except FoldOverError:
                lam *= 0.5
                continue
            if np.max(np.abs(r_new)) < rnorm:
                break
            lam *= 0.5
        else:
            raise SolverError("line search failed to reduce the residual")
        vec = vec + lam * step
        r = r_new
        rnorm = float(np.max(np.abs(r)))
        report.iterations += 1
        report.residuals.append(rnorm)
    if rnorm <= tol:
        return _finish(vec)
    raise SolverError(f"Newton stalled at residual {rnorm:.3e}")


def _blend_metric(g0, g1, t):
    return ConformalMetric(g0.grid, (1.0 - t) * g0.phi + t * g1.phi)


def continuation_solve(
    g0: ConformalMetric,
    g1: ConformalMetric,
    h0,
    h1,
    steps=10,
    tol=1e-8,
    min_step=1.0 / 1024.0,
):
    """March the solution of the corrected equation from (g0, h0) to (g1, h1).

    Backgrounds interpolate linearly in phi, targets linearly in the matrix
    (convexity keeps them SPD).  Failed Newton steps halve the continuation
    step; the march aborts when the step underflows ``min_step``.
    """
    grid = g0.grid
    h0 = grid.check_field(h0, rank=2)
    h1 = grid.check_field(h1, rank=2)
    report = SolveReport()
    x = None
    t = 0.0
    dt = 1.0 / steps
    while t < 1.0 - 1e-12:
        t_next = min(1.0, t + dt)
        g_t = _blend_metric(g0, g1, t_next)
        h_t = (1.0 - t_next) * h0 + t_next * h1
        try:
            _require_negative_curvature(g_t)
            x_new, report = newton_solve(g_t, h_t, x0=x, tol=tol, report=report)
        except (SolverError, FoldOverError, CurvatureSignError):
            dt *= 0.5
            if dt < min_step:
                raise SolverError("continuation step underflow") from None
            continue
        x = x_new
        t = t_next
        report.steps.append(t)
    return x, report
