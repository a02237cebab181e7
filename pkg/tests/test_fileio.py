"""Field-file round trips and deterministic serialization."""

import numpy as np
import pytest

from codazzi import fileio
from codazzi.grid import Grid, poincare_disk
from codazzi.jcalc import metric_action
from codazzi.randfields import rng_for, trig_endo, trig_spd, trig_vector


@pytest.fixture
def sample(tmp_path):
    grid = Grid(12, 10, 0.8, 0.6, "dirichlet")
    g = poincare_disk(grid)
    h = metric_action(trig_spd(grid, rng_for(1), amp=0.15), g.matrix())
    endo = trig_endo(grid, rng_for(2), amp=0.3)
    x = trig_vector(grid, rng_for(3), amp=0.2)
    return tmp_path, grid, g, h, endo, x


def test_field_roundtrip_is_exact(sample):
    tmp, grid, g, h, endo, x = sample
    path = tmp / "f.json"
    fileio.save_field(path, g, h=h, endo=endo, x=x)
    doc = fileio.load_field(path)
    assert (doc["grid"].nx, doc["grid"].ny) == (grid.nx, grid.ny)
    assert (doc["grid"].lx, doc["grid"].ly) == (grid.lx, grid.ly)
    assert doc["grid"].topology == grid.topology
    assert np.array_equal(doc["g"].phi, g.phi)
    # h is stored as its upper triangle; the reloaded field is exactly
    # symmetric, matching the original up to its own symmetry defect
    assert np.max(np.abs(doc["h"] - h)) < 1e-15
    assert np.array_equal(doc["h"][..., 0, 1], doc["h"][..., 1, 0])
    assert np.array_equal(doc["endo"], endo)
    assert np.array_equal(doc["x"], x)


def test_load_reports_missing_phi(sample, tmp_path):
    import json

    tmp, grid, g, *_ = sample
    path = tmp / "f.json"
    fileio.save_field(path, g)
    doc = json.load(open(path))
    del doc["phi"]
    json.dump(doc, open(path, "w"))
    with pytest.raises(ValueError, match="phi"):
        fileio.load_field(path)


def test_load_reports_truncated_payload(sample):
    import json

    tmp, grid, g, *_ = sample
    path = tmp / "f.json"
    fileio.save_field(path, g)
    doc = json.load(open(path))
    doc["phi"] = doc["phi"][:-1]
    json.dump(doc, open(path, "w"))
    with pytest.raises(ValueError, match="phi"):
        fileio.load_field(path)


def test_load_rejects_invalid_json(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(ValueError, match="JSON"):
        fileio.load_field(path)


def test_write_json_is_byte_deterministic(tmp_path):
    doc = {"b": [1.0, 2.5], "a": {"z": 0.1, "y": -3}}
    p1, p2 = tmp_path / "1.json", tmp_path / "2.json"
    fileio.write_json(p1, doc)
    fileio.write_json(p2, doc)
    assert p1.read_bytes() == p2.read_bytes()


def test_mesh_csv_shape_and_header(sample):
    tmp, grid, *_ = sample
    x = np.zeros((grid.ny, grid.nx, 3))
    phi = np.ones((grid.ny, grid.nx))
    path = tmp / "m.csv"
    fileio.write_mesh_csv(path, grid, x, phi)
    lines = path.read_text().splitlines()
    assert lines[0] == "u,v,x1,x2,x3,phi_support"
    assert len(lines) == 1 + grid.nx * grid.ny
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (grid.nx * grid.ny, 6)
    # row-major with u fastest: the first nx rows share the lowest v
    assert np.all(data[: grid.nx, 1] == data[0, 1])
