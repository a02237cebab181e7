"""Structured-grid discretization of scalar, vector and endomorphism fields.

A :class:`Grid` is a rectangular chart with ``nx * ny`` nodes and either
periodic or Dirichlet topology.  Fields are plain numpy arrays indexed
``[j, i]`` (y slow, x fast), with trailing component axes:

* scalar field:       shape ``(ny, nx)``
* vector field:       shape ``(ny, nx, 2)``
* endomorphism field: shape ``(ny, nx, 2, 2)``

Charts are centred on the origin.  Periodic grids cover ``[-l/2, l/2)``
with spacing ``l/n``; Dirichlet grids cover ``[-l/2, l/2]`` with spacing
``l/(n-1)`` and include their boundary nodes.

All derivatives are second-order central differences, with second-order
one-sided stencils at Dirichlet boundaries (this is what ``np.gradient``
with ``edge_order=2`` provides).
"""

from dataclasses import dataclass, field

import numpy as np

PERIODIC = "periodic"
DIRICHLET = "dirichlet"


@dataclass(frozen=True)
class Grid:
    """Rectangular chart: node counts, extents and topology."""

    nx: int
    ny: int
    lx: float = 1.0
    ly: float = 1.0
    topology: str = PERIODIC

    def __post_init__(self):
        if self.nx < 8 or self.ny < 8:
            raise ValueError("grids need at least 8 nodes per axis")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError("chart extents must be positive")
        if self.topology not in (PERIODIC, DIRICHLET):
            raise ValueError(f"unknown topology {self.topology!r}")

    @property
    def periodic(self):
        return self.topology == PERIODIC

    @property
    def dx(self):
        return self.lx / self.nx if self.periodic else self.lx / (self.nx - 1)

    @property
    def dy(self):
        return self.ly / self.ny if self.periodic else self.ly / (self.ny - 1)

    @property
    def x(self):
        if self.periodic:
            return -0.5 * self.lx + self.dx * np.arange(self.nx)
        return np.linspace(-0.5 * self.lx, 0.5 * self.lx, self.nx)

    @property
    def y(self):
        if self.periodic:
            return -0.5 * self.ly + self.dy * np.arange(self.ny)
        return np.linspace(-0.5 * self.ly, 0.5 * self.ly, self.ny)

    def meshgrid(self):
        """Coordinate arrays (X, Y), each of shape (ny, nx)."""
        return np.meshgrid(self.x, self.y)

    # -- differentiation -------------------------------------------------

    def ddx(self, f):
        """d/dx along axis 1, second order."""
        f = np.asarray(f, dtype=float)
        if self.periodic:
            return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) / (2 * self.dx)
        return np.gradient(f, self.dx, axis=1, edge_order=2)

    def ddy(self, f):
        """d/dy along axis 0, second order."""
        f = np.asarray(f, dtype=float)
        if self.periodic:
            return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2 * self.dy)
        return np.gradient(f, self.dy, axis=0, edge_order=2)

    def laplace_flat(self, f):
        """Flat 5-point Laplacian d2/dx2 + d2/dy2."""
        f = np.asarray(f, dtype=float)
        if self.periodic:
            fxx = (np.roll(f, -1, 1) - 2 * f + np.roll(f, 1, 1)) / self.dx**2
            fyy = (np.roll(f, -1, 0) - 2 * f + np.roll(f, 1, 0)) / self.dy**2
            return fxx + fyy
        return self.ddx(self.ddx(f)) + self.ddy(self.ddy(f))

    # -- quadrature and masks --------------------------------------------

    def cell_weights(self):
        """Per-node quadrature weight (dx*dy, trapezoidal on Dirichlet)."""
        w = np.full((self.ny, self.nx), self.dx * self.dy)
        if not self.periodic:
            w[0, :] *= 0.5
            w[-1, :] *= 0.5
            w[:, 0] *= 0.5
            w[:, -1] *= 0.5
        return w

    def interior(self, margin=2):
        """Boolean mask excluding ``margin`` boundary rings (all-true if periodic)."""
        mask = np.ones((self.ny, self.nx), dtype=bool)
        if not self.periodic and margin > 0:
            mask[:margin, :] = False
            mask[-margin:, :] = False
            mask[:, :margin] = False
            mask[:, -margin:] = False
        return mask

    def check_field(self, f, rank=0):
        f = np.asarray(f, dtype=float)
        expected = (self.ny, self.nx) + (2,) * rank
        if f.shape != expected:
            raise ValueError(f"field shape {f.shape} does not match grid {expected}")
        return f


@dataclass(frozen=True)
class ConformalMetric:
    """Metric e^{2 phi} (dx^2 + dy^2) on a grid, phi a scalar field."""

    grid: Grid
    phi: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "phi", self.grid.check_field(self.phi))

    @classmethod
    def flat(cls, grid):
        return cls(grid, np.zeros((grid.ny, grid.nx)))

    @classmethod
    def from_function(cls, grid, fn):
        xx, yy = grid.meshgrid()
        return cls(grid, np.asarray(fn(xx, yy), dtype=float))

    @property
    def conformal_factor(self):
        """e^{2 phi}, the area element relative to the flat chart."""
        return np.exp(2.0 * self.phi)

    def matrix(self):
        """Metric tensor as an SPD field of shape (ny, nx, 2, 2)."""
        out = np.zeros((self.grid.ny, self.grid.nx, 2, 2))
        out[..., 0, 0] = self.conformal_factor
        out[..., 1, 1] = self.conformal_factor
        return out

    def phi_derivs(self):
        """(phi_x, phi_y) central-difference derivatives."""
        return self.grid.ddx(self.phi), self.grid.ddy(self.phi)

    def area(self):
        """Total area of the chart in the metric."""
        return float(np.sum(self.conformal_factor * self.grid.cell_weights()))

    def integrate(self, f):
        """Integral of a scalar field against the metric area form."""
        f = self.grid.check_field(f)
        return float(np.sum(f * self.conformal_factor * self.grid.cell_weights()))


def poincare_disk(grid, scale=1.0):
    """Hyperbolic metric phi = log(2 scale / (1 - x^2 - y^2)) on a sub-disk chart.

    The chart must stay strictly inside the unit disk.  With ``scale=1``
    the curvature is -1.
    """
    xx, yy = grid.meshgrid()
    r2 = xx**2 + yy**2
    if np.any(r2 >= 1.0):
        raise ValueError("chart leaves the unit disk")
    return ConformalMetric(grid, np.log(2.0 * scale / (1.0 - r2)))
