import os
import pathlib

import numpy as np
import pytest

import fptrec

GRAPHS = pathlib.Path(
    os.environ.get(
        "FPTREC_GRAPH_DIR",
        pathlib.Path(__file__).resolve().parents[2] / "data" / "graphs",
    )
)


def load(name):
    return fptrec.Graph.from_json_file(str(GRAPHS / f"{name}.json"))


def test_graph_loading():
    g = load("p3")
    assert g.size == 3
    assert g.interior_size == 1
    assert g.boundary_size == 2
    # interior vertices come first in the internal order
    assert g.ids == ["b", "a", "c"]
    assert g.horizon == 3
    assert not g.is_boundary(0)
    assert g.mu(g.index_of("b")) == 1.0
    assert g.weight(g.index_of("a"), g.index_of("b")) == 0.25


def test_exact_tensor():
    g = load("p3")
    r = fptrec.exact_fpt(g, 3)
    v = r.values()
    assert v.shape == (5, 2, 2)
    # a -> b -> c is the only length-2 path between the observed ends
    assert v[1, 0, 1] == pytest.approx(0.0625, abs=1e-15)
    # per pair, arrival and escape mass account for every walk
    total = v.sum(axis=0) + r.escape_mass()
    assert np.allclose(total, 1.0, atol=1e-12)


def test_simulation_is_seeded():
    g = load("p3")
    a = fptrec.simulate_fpt(g, samples=2000, seed=7, T=3)
    b = fptrec.simulate_fpt(g, samples=2000, seed=7, T=3)
    c = fptrec.simulate_fpt(g, samples=2000, seed=8, T=3)
    assert np.array_equal(a.values(), b.values())
    assert not np.array_equal(a.values(), c.values())
    assert a.seed == 7
    assert a.samples == 2000
    err = fptrec.frne(fptrec.exact_fpt(g, 3), a)
    assert 0.0 < err < 25.0


def test_reconstruction_from_exact_data():
    for name in ("p3", "net8", "net9"):
        g = load(name)
        T = g.horizon
        res = fptrec.reconstruct(fptrec.exact_fpt(g, T), g, T)
        truth = np.array([g.mu(i) for i in range(g.interior_size)])
        assert res["ids"] == g.ids[: g.interior_size]
        assert not res["projection_only"]
        assert res["rank"] == g.interior_size
        assert fptrec.l2rne(truth, res["mu"]) < 1e-3
        assert np.max(np.abs(res["residuals"])) < 1e-8


def test_harmonic_basis_partition_of_unity():
    g = load("net8")
    basis = fptrec.harmonic_basis(g)
    assert len(basis) == g.boundary_size
    assert np.allclose(np.sum(basis, axis=0), 1.0, atol=1e-12)


def test_assumption_report():
    rep = fptrec.check_assumptions(load("net9"))
    assert rep["substochastic"]
    assert rep["unique_continuation"]
    assert rep["eigen_margin"] > 0.0


def test_csv_round_trip(tmp_path):
    g = load("g2")
    r = fptrec.simulate_fpt(g, samples=500, seed=42, T=3)
    path = tmp_path / "r.csv"
    fptrec.write_tensor_csv(str(path), r, g)
    back = fptrec.read_tensor_csv(str(path), g)
    assert np.array_equal(back.values(), r.values())
    assert back.seed == 42
    assert back.samples == 500


def test_error_mapping():
    with pytest.raises(ValueError):
        fptrec.Graph.from_json_text("not json")
    g = load("p3")
    with pytest.raises(fptrec.ValidationError):
        fptrec.exact_fpt(g, 0)
    # ValidationError is a ValueError, so either except clause works
    assert issubclass(fptrec.ValidationError, ValueError)
    r = fptrec.exact_fpt(g, 3)
    with pytest.raises(ValueError, match="horizon"):
        fptrec.reconstruct(r, g, 5)
