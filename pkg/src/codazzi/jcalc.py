"""Exact 2x2 matrix calculus with the standard complex structure J.

All functions accept numpy arrays of shape ``(..., 2, 2)`` and operate on
the trailing two axes, so that the same routines serve single matrices and
whole endomorphism fields.  Matrices are plain ``float`` arrays; symmetric
positive-definite ("SPD") arguments are validated where the mathematics
requires it.

Conventions
-----------
* ``J = [[0, -1], [1, 0]]`` is the standard complex structure.
* The (1,0)-seminorm ``sigma`` is the Frobenius norm of the J-linear part
  of a matrix (NOT the operator norm, which differs by sqrt(2) on
  conformal matrices).
* A metric ``h`` acted on by ``A`` means the bilinear form
  ``(A h)(u, v) = h(Au, Av)``, i.e. ``A^T h A`` on matrices.
"""

import numpy as np

J = np.array([[0.0, -1.0], [1.0, 0.0]])
ID2 = np.eye(2)

__all__ = [
    "J",
    "ID2",
    "trace",
    "det",
    "jlin_part",
    "sigma",
    "dsigma",
    "b_form",
    "metric_action",
    "metric_to_A",
    "spd_sqrt",
    "spd_sqrt_pair",
    "inv2",
    "is_spd",
]


def trace(a):
    """Trace over the trailing 2x2 axes."""
    a = np.asarray(a, dtype=float)
    return a[..., 0, 0] + a[..., 1, 1]


def det(a):
    """Determinant over the trailing 2x2 axes."""
    a = np.asarray(a, dtype=float)
    return a[..., 0, 0] * a[..., 1, 1] - a[..., 0, 1] * a[..., 1, 0]


def inv2(a):
    """Closed-form inverse of 2x2 matrices; raises on singular input."""
    a = np.asarray(a, dtype=float)
    d = det(a)
    if np.any(np.abs(d) < 1e-300):
        raise ValueError("singular 2x2 matrix")
    out = np.empty_like(a)
    out[..., 0, 0] = a[..., 1, 1]
    out[..., 1, 1] = a[..., 0, 0]
    out[..., 0, 1] = -a[..., 0, 1]
    out[..., 1, 0] = -a[..., 1, 0]
    return out / d[..., None, None]


def jlin_part(a):
    """J-linear component (a - J a J) / 2.

    Equals ``Tr(a)/2 * Id - Tr(aJ)/2 * J`` identically.
    """
    a = np.asarray(a, dtype=float)
    return 0.5 * (a - J @ a @ J)


def sigma(a):
    """(1,0)-seminorm sqrt(Tr(a)^2/2 + Tr(Ja)^2/2).

    Coincides with the Frobenius norm of ``jlin_part(a)`` and vanishes
    exactly on J-antilinear matrices.
    """
    a = np.asarray(a, dtype=float)
    tr = trace(a)
    trj = trace(J @ a)
    return np.sqrt(0.5 * tr**2 + 0.5 * trj**2)


def dsigma(a, b):
    """First derivative of sigma at a symmetric positive-definite ``a``.

    At such a point sigma(a) = Tr(a)/sqrt(2), so the derivative in
    direction ``b`` is Tr(b)/sqrt(2); a central-difference oracle on
    :func:`sigma` confirms the normalization.  The general (non-symmetric)
    branch is not implemented; inputs failing the symmetry/positivity
    requirement are rejected.
    """
    a = np.asarray(a, dtype=float)
    if not is_spd(a):
        raise ValueError("dsigma requires a symmetric positive-definite base point")
    return trace(np.asarray(b, dtype=float)) / np.sqrt(2.0)


def b_form(b):
    """Indefinite quadratic form Tr(b J b^T J)/2 = -Det(b)."""
    return -det(b)


def is_spd(a, tol=1e-12):
    """True when every trailing 2x2 block is symmetric positive-definite."""
    a = np.asarray(a, dtype=float)
    sym = np.abs(a[..., 0, 1] - a[..., 1, 0]) <= tol * (1.0 + np.abs(a).max())
    pos = (a[..., 0, 0] > 0) & (det(a) > 0)
    return bool(np.all(sym & pos))


def metric_action(a, h):
    """Pull back the SPD form ``h`` through ``a``: returns a^T h a.

    ``a`` must be orientation preserving (Det > 0).
    """
    a = np.asarray(a, dtype=float)
    h = np.asarray(h, dtype=float)
    if np.any(det(a) <= 0):
        raise ValueError("metric_action requires Det(a) > 0")
    at = np.swapaxes(a, -1, -2)
    return at @ h @ a


def spd_sqrt(m):
    """Principal square root of 2x2 matrices with positive spectrum.

    Uses the closed form ``(m + sqrt(Det m) Id) / sqrt(Tr m + 2 sqrt(Det m))``,
    which is exact and branch-free.  ``m`` need not be symmetric: any matrix
    similar to an SPD one (e.g. g-self-adjoint positive operators) works.
    """
    m = np.asarray(m, dtype=float)
    d = det(m)
    t = trace(m)
    if np.any(d <= 0) or np.any(t <= 0):
        raise ValueError("spd_sqrt requires positive spectrum (Tr > 0 and Det > 0)")
    s = np.sqrt(d)
    denom = np.sqrt(t + 2.0 * s)
    return (m + s[..., None, None] * ID2) / denom[..., None, None]


def metric_to_A(g, h):
    """Unique g-self-adjoint positive-definite A with h = g(A., A.).

    Both ``g`` and ``h`` are SPD bilinear forms.  A is the principal square
    root of the g-self-adjoint operator g^{-1} h, so that
    ``metric_action(A, g) == h`` holds to round-off.
    """
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    if not is_spd(g) or not is_spd(h):
        raise ValueError("metric_to_A requires SPD inputs")
    return spd_sqrt(inv2(g) @ h)


def spd_sqrt_pair(g, h):
    """Like :func:`metric_to_A` without the symmetry validation.

    Intended for node-indexed SPD fields that are symmetric by
    construction; skips the global is_spd scan for speed.
    """
    return spd_sqrt(inv2(np.asarray(g, dtype=float)) @ np.asarray(h, dtype=float))
