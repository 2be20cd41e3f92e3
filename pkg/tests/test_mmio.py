import json

import numpy as np
import scipy.sparse as sp

from conftest import random_descriptor
from tlbt import mmio
from tlbt.synthetic import make_synthetic
from tlbt.systems import DescriptorIndex1, GeneralizedSystem, StandardSystem


def test_dense_roundtrip_bit_exact(tmp_path, rng):
    a = rng.standard_normal((7, 4)) * 10.0 ** rng.integers(-8, 8, size=(7, 4))
    path = tmp_path / "a.mtx"
    mmio.write_matrix(path, a)
    b = mmio.read_matrix(path)
    assert np.array_equal(a, b)


def test_sparse_roundtrip_bit_exact(tmp_path, rng):
    a = sp.random(20, 20, density=0.15, random_state=3, format="csc")
    path = tmp_path / "s.mtx"
    mmio.write_matrix(path, a)
    b = mmio.read_matrix(path)
    assert sp.issparse(b)
    assert np.array_equal(a.toarray(), b.toarray())


def test_standard_system_roundtrip(tmp_path):
    s = make_synthetic("random_stable", 9, 2, 3, seed=7)
    sidecar = mmio.save_system(tmp_path, "plant", s)
    loaded, meta = mmio.load_system(sidecar)
    assert isinstance(loaded, StandardSystem)
    assert np.array_equal(loaded.A, s.A)
    assert np.array_equal(loaded.B, s.B)
    assert np.array_equal(loaded.C, s.C)
    assert meta["kind"] == "standard"


def test_generalized_system_roundtrip_with_alpha(tmp_path):
    g = make_synthetic("heat_like", 12, 1, 1, seed=2)
    sidecar = mmio.save_system(tmp_path, "gen", g, alpha=0.08)
    loaded, meta = mmio.load_system(sidecar)
    assert isinstance(loaded, GeneralizedSystem)
    assert meta["spd"] is True
    assert meta["alpha_shift"] == 0.08
    # alpha shift applied on load: A_loaded = A - 0.08 M
    assert np.allclose(loaded.A.toarray(), (g.A - 0.08 * g.M).toarray())


def test_descriptor_roundtrip(tmp_path):
    d = random_descriptor(6, 4, 1, 2, seed=5)
    sidecar = mmio.save_system(tmp_path, "dae", d)
    loaded, meta = mmio.load_system(sidecar)
    assert isinstance(loaded, DescriptorIndex1)
    assert meta["n_f"] == 6
    assert np.array_equal(np.asarray(loaded.A4.toarray() if sp.issparse(loaded.A4) else loaded.A4), d.A4)


def test_feedthrough_persisted(tmp_path):
    s = StandardSystem(
        np.array([[-1.0]]), np.array([[1.0]]), np.array([[1.0]]), D=np.array([[2.5]])
    )
    sidecar = mmio.save_system(tmp_path, "ft", s)
    loaded, _ = mmio.load_system(sidecar)
    assert np.array_equal(loaded.D, s.D)


def test_sidecar_is_sorted_json(tmp_path):
    s = make_synthetic("random_stable", 4, 1, 1, seed=0)
    sidecar = mmio.save_system(tmp_path, "plant", s)
    text = sidecar.read_text()
    payload = json.loads(text)
    assert list(payload) == sorted(payload)
