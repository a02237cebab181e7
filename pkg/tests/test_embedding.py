"""Immersion construction on the hyperboloid patch and its isometry group."""

import numpy as np
import pytest

from codazzi import embedding
from codazzi.grid import Grid
from codazzi.jcalc import ID2


def _patch(n, l=0.8):
    return embedding.HyperboloidPatch(Grid(n, n, l, l, "dirichlet"))


def _hessian_field(patch, scale=1.0):
    xx, yy = patch.grid.meshgrid()
    f = 2.0 + 0.3 * np.cos(3.0 * xx) * np.sin(2.0 * yy) + 0.2 * xx * yy
    return f, scale * embedding.codazzi_generator(f, patch)


def test_patch_nodes_lie_on_hyperboloid():
    p = _patch(33)
    iota = p.nodes()
    q = embedding.mdot(iota, iota)
    assert np.max(np.abs(q + 1.0)) < 1e-12
    assert np.min(iota[..., 2]) > 0.0


def test_identity_field_reproduces_hyperboloid():
    p = _patch(33)
    iota = p.nodes()
    idf = np.broadcast_to(ID2, iota.shape[:2] + (2, 2)).copy()
    x = embedding.integrate_immersion(idf, p, iota[p.base_index], sign=1)
    assert np.max(np.abs(x - iota)) < 1e-10


def test_support_function_of_hyperboloid():
    p = _patch(33)
    iota = p.nodes()
    assert np.max(np.abs(embedding.support_function(iota, p) + 1.0)) < 1e-10


def test_plaquette_defect_converges():
    def defect(n):
        q = _patch(n)
        _, a = _hessian_field(q)
        return embedding.plaquette_defect(a, q)

    assert defect(32) / defect(64) > 3.5


def test_induced_metric_error_converges():
    def err(n):
        q = _patch(n)
        _, a = _hessian_field(q)
        x = embedding.integrate_immersion(a, q, q.nodes()[q.base_index],
                                          codazzi_tol=None)
        return embedding.induced_metric_error(x, a, q)

    assert err(32) / err(64) > 3.5


def test_support_pair_sums_to_f():
    def gap(n):
        q = _patch(n)
        f, _ = _hessian_field(q)
        _, _, pp, pm = embedding.support_pair(f, q, codazzi_tol=None)
        return float(np.max(np.abs(pp + pm - f)))

    assert gap(32) / gap(64) > 3.5


def test_equivariance_under_boost():
    p = _patch(65)
    idf = np.broadcast_to(ID2, (65, 65, 2, 2)).copy()
    x = embedding.integrate_immersion(idf, p, p.nodes()[p.base_index], sign=1)
    _, res = embedding.equivariance_residual(
        x, embedding.Isometry21.boost(0.1), idf, p
    )
    assert res < 1e-6


def test_convexity_of_hyperboloid():
    p = _patch(33)
    x = p.nodes()
    spacelike, definite, side = embedding.convexity_check(x, p)
    assert spacelike and definite and side == "future"


def test_isometry_group_axioms():
    g1 = embedding.Isometry21.boost(0.3, 0.7, translation=np.array([0.1, -0.2, 0.05]))
    g2 = embedding.Isometry21.rotation(1.1, translation=np.array([0.0, 0.3, 0.1]))
    comp = g1.compose(g2)
    v = np.array([0.2, -0.1, 1.3])
    assert np.max(np.abs(comp.apply(v) - g1.apply(g2.apply(v)))) < 1e-12
    gi = g1.compose(g1.inverse())
    assert np.max(np.abs(gi.linear - np.eye(3))) < 1e-12
    assert np.max(np.abs(gi.translation)) < 1e-12


def test_isometries_preserve_minkowski_form():
    for gam in (embedding.Isometry21.boost(0.4, 1.2), embedding.Isometry21.rotation(0.9)):
        u = np.array([0.3, -0.5, 1.1])
        v = np.array([-0.2, 0.7, 0.9])
        assert embedding.mdot(gam.apply_linear(u), gam.apply_linear(v)) == pytest.approx(
            embedding.mdot(u, v), abs=1e-13
        )


def test_integrate_immersion_rejects_non_codazzi():
    p = _patch(33)
    xx, yy = p.grid.meshgrid()
    a = np.broadcast_to(ID2, (33, 33, 2, 2)).copy()
    a[..., 0, 0] += 0.4 * np.sin(3 * xx) * np.cos(2 * yy)
    with pytest.raises(embedding.PathDependenceError):
        embedding.integrate_immersion(a, p, p.nodes()[p.base_index],
                                      codazzi_tol=1e-3)
