import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import homobl

CONFIGS = Path(os.environ.get("HOMOBL_CONFIG_DIR", Path(__file__).resolve().parents[2] / "configs"))

LAYERED = json.dumps({"tensor": {"kind": "layered", "profile": "2 + cos(2*pi*t)", "axis": 1}})


def test_layered_correctors():
    r = homobl.correctors(LAYERED, resolution=128)
    A0 = np.asarray(r["A0"])
    assert A0.shape == (2, 2)
    assert abs(A0[0, 0] - math.sqrt(3.0)) < 1e-5
    assert abs(A0[1, 1] - 2.0) < 1e-12
    chi = r["chi"][0]
    assert chi.shape == (128, 128, 1)
    assert abs(chi.mean()) < 1e-12
    # chi^1 depends on y1 only
    assert np.allclose(chi[:, 0, 0], chi[:, 77, 0])


def test_config_errors_surface_as_exceptions():
    bad = json.dumps({"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]}, "dioph": {"kappa": 0}})
    with pytest.raises(homobl.ConfigError, match="κ must be positive"):
        homobl.config_hash(bad)
    assert issubclass(homobl.ConfigError, homobl.HomoblError)


def test_hash_is_order_independent():
    a = '{"tensor": {"kind": "constant", "matrix": [[1, 0], [0, 1]]}, "sweep": {"eps": ["1/8"]}}'
    b = '{"sweep": {"eps": [0.125]}, "tensor": {"matrix": [[1, 0], [0, 1]], "kind": "constant"}}'
    assert homobl.config_hash(a) == homobl.config_hash(b)
    assert len(homobl.config_hash(a)) == 16


def test_diophantine_and_poisson():
    golden = homobl.diophantine_constant([1.0, (1 + math.sqrt(5)) / 2], truncation=50)
    assert golden["kappa_dot"] > 0
    assert homobl.diophantine_constant([3.0, 4.0], truncation=50)["kappa_dot"] < 1e-12
    v = homobl.poisson_kernel_reference(lambda t: math.cos(2 * math.pi * t), 0.5)
    assert abs(v - math.exp(-math.pi)) < 1e-10


def test_measure_is_reproducible():
    a = homobl.measure_complement([0.02, 0.08], samples=200, truncation=20, seed=3)
    b = homobl.measure_complement([0.02, 0.08], samples=200, truncation=20, seed=3)
    assert a == b
    assert a[0]["fraction"] <= a[1]["fraction"]


def test_boundary_layer_laplace_tail():
    r = homobl.boundary_layer((CONFIGS / "laplace_bl.json").read_text())
    assert r["path"] == "rational"
    assert abs(r["U_inf"][0]) < 1e-8
    assert r["decay_class"] == "exponential"


def test_run_writes_manifest(tmp_path):
    m = homobl.run("cell", str(CONFIGS / "layered.json"), str(tmp_path))
    assert m["status"] == "ok"
    assert (tmp_path / "manifest.json").exists()
    assert "correctors.json" in m["artifacts"]
