"""Field-file, report and mesh serialization.

Field files are JSON with a grid header and row-major node payloads
(x fastest).  Reports are JSON with sorted keys so identical runs produce
byte-identical artifacts; meshes are plain CSV for plotting tools.
"""

import json

import numpy as np

from .grid import ConformalMetric, Grid

__all__ = [
    "save_field",
    "load_field",
    "write_json",
    "write_mesh_csv",
]


def _flatten_nodes(arr, ncomp):
    return [[float(v) for v in row] for row in arr.reshape(-1, ncomp)]


def save_field(path, g: ConformalMetric, h=None, endo=None, x=None):
    """Write a field file: conformal factor plus optional matrix/vector payloads."""
    grid = g.grid
    doc = {
        "grid": {
            "nx": grid.nx,
            "ny": grid.ny,
            "lx": grid.lx,
            "ly": grid.ly,
            "topology": grid.topology,
        },
        "phi": [float(v) for v in np.asarray(g.phi).ravel()],
    }
    if h is not None:
        h = grid.check_field(h, rank=2)
        doc["h"] = _flatten_nodes(
            np.stack([h[..., 0, 0], h[..., 0, 1], h[..., 1, 1]], axis=-1), 3
        )
    if endo is not None:
        endo = grid.check_field(endo, rank=2)
        doc["endo"] = _flatten_nodes(endo.reshape(grid.ny, grid.nx, 4), 4)
    if x is not None:
        x = grid.check_field(x, rank=1)
        doc["x"] = _flatten_nodes(x, 2)
    write_json(path, doc)


def load_field(path):
    """Read a field file; returns a dict with the metric and any payloads.

    Raises ValueError naming the file and offending key on malformed input.
    """
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
    try:
        gd = doc["grid"]
        grid = Grid(
            int(gd["nx"]), int(gd["ny"]), float(gd["lx"]), float(gd["ly"]),
            str(gd["topology"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"{path}: bad 'grid' header ({exc})") from None
    out = {"grid": grid}
    nnode = grid.nx * grid.ny

    def _payload(key, ncomp):
        raw = np.asarray(doc[key], dtype=float)
        if raw.shape != (nnode, ncomp) and not (ncomp == 1 and raw.shape == (nnode,)):
            raise ValueError(
                f"{path}: key '{key}' must hold {nnode} nodes of {ncomp} reals"
            )
        return raw

    try:
        phi = _payload("phi", 1).reshape(grid.ny, grid.nx)
    except KeyError:
        raise ValueError(f"{path}: missing required key 'phi'") from None
    out["g"] = ConformalMetric(grid, phi)
    if "h" in doc:
        tri = _payload("h", 3).reshape(grid.ny, grid.nx, 3)
        h = np.empty((grid.ny, grid.nx, 2, 2))
        h[..., 0, 0] = tri[..., 0]
        h[..., 0, 1] = tri[..., 1]
        h[..., 1, 0] = tri[..., 1]
        h[..., 1, 1] = tri[..., 2]
        out["h"] = h
    if "endo" in doc:
        out["endo"] = _payload("endo", 4).reshape(grid.ny, grid.nx, 2, 2)
    if "x" in doc:
        out["x"] = _payload("x", 2).reshape(grid.ny, grid.nx, 2)
    return out


def write_json(path, doc):
    """Deterministic JSON: sorted keys, fixed separators, trailing newline."""
    with open(path, "w") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2, separators=(",", ": "))
        fh.write("\n")


def write_mesh_csv(path, grid: Grid, x, phi_support):
    """Mesh rows "u,v,x1,x2,x3,phi_support", row-major with u fastest."""
    x = np.asarray(x, dtype=float)
    phi_support = np.asarray(phi_support, dtype=float)
    xx, yy = grid.meshgrid()
    with open(path, "w") as fh:
        fh.write("u,v,x1,x2,x3,phi_support\n")
        for j in range(grid.ny):
            for i in range(grid.nx):
                vals = (xx[j, i], yy[j, i], x[j, i, 0], x[j, i, 1],
                        x[j, i, 2], phi_support[j, i])
                fh.write(",".join(repr(float(v)) for v in vals) + "\n")
