import numpy as np
import pytest
import scipy.sparse as sp

from minkproj import ModelGrid, ModelVector
from minkproj.fileio import (read_grid, read_sparse_operator, write_grid,
                             write_pgm, write_report, write_residual_csv,
                             write_sparse_operator)


def test_grid_file_roundtrip_bitexact(tmp_path):
    rng = np.random.default_rng(0)
    for dims in ((3, 4), (2, 3, 4)):
        g = ModelGrid(dims)
        m = ModelVector(g, rng.standard_normal(g.N))
        path = tmp_path / "m.gmsk"
        write_grid(path, m)
        again = read_grid(path)
        assert again.grid.dims == g.dims
        assert np.array_equal(again.data, m.data)
        write_grid(tmp_path / "m2.gmsk", again)
        assert (tmp_path / "m.gmsk").read_bytes() == \
            (tmp_path / "m2.gmsk").read_bytes()


def test_grid_file_layout(tmp_path):
    g = ModelGrid((2, 2))
    write_grid(tmp_path / "t.gmsk", ModelVector(g, [1.0, 3.0, 2.0, 4.0]))
    raw = (tmp_path / "t.gmsk").read_bytes()
    assert raw[:4] == b"GMSK"
    assert int.from_bytes(raw[4:8], "little") == 2
    assert int.from_bytes(raw[8:12], "little") == 2
    assert np.frombuffer(raw[16:], dtype="<f8").tolist() == [1.0, 3.0, 2.0, 4.0]


def test_grid_file_rejects_garbage(tmp_path):
    p = tmp_path / "bad.gmsk"
    p.write_bytes(b"NOPE" + b"\x00" * 16)
    with pytest.raises(ValueError, match="magic"):
        read_grid(p)
    g = ModelGrid((2, 2))
    write_grid(tmp_path / "ok.gmsk", ModelVector(g, np.arange(4.0)))
    truncated = (tmp_path / "ok.gmsk").read_bytes()[:-8]
    (tmp_path / "trunc.gmsk").write_bytes(truncated)
    with pytest.raises(ValueError, match="truncated"):
        read_grid(tmp_path / "trunc.gmsk")


def test_sparse_operator_roundtrip(tmp_path):
    a = sp.random(7, 5, density=0.4, random_state=1, format="csr")
    path = tmp_path / "op.txt"
    write_sparse_operator(path, a)
    first = path.read_text()
    assert first.splitlines()[0] == "7 5 %d" % a.nnz
    b = read_sparse_operator(path)
    assert (a != b).nnz == 0
    write_sparse_operator(tmp_path / "op2.txt", b)
    assert first == (tmp_path / "op2.txt").read_text()


def test_sparse_operator_rejects_bad_indices(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("2 2 1\n3 0 1.0\n")
    with pytest.raises(ValueError, match="shape"):
        read_sparse_operator(p)


def test_pgm_writer(tmp_path):
    img = np.array([[0.0, 0.5], [1.0, 0.25]])
    p = tmp_path / "img.pgm"
    write_pgm(p, img)
    raw = p.read_bytes()
    assert raw.startswith(b"P5\n2 2\n255\n")
    assert list(raw[-4:]) == [0, 128, 255, 64]
    write_pgm(p, np.zeros((2, 2)))
    assert list(p.read_bytes()[-4:]) == [0, 0, 0, 0]


def test_report_and_csv(tmp_path):
    from minkproj.admm import SolveReport

    rep = SolveReport(converged=True, iterations=3,
                      primal_residuals=[1e-5, 2e-5], dual_residual=3e-6,
                      cg_iterations=12, feasibility={"F1": 1e-6},
                      wall_time=0.5,
                      history={"max_primal": [1.0, 0.1, 2e-5],
                               "dual": [0.5, 0.05, 3e-6],
                               "cg_iters": [4, 4, 4]})
    write_report(tmp_path / "report.txt", rep)
    text = (tmp_path / "report.txt").read_text()
    assert "converged true" in text
    assert "iterations 3" in text
    assert "feasibility F1" in text
    assert "wall" not in text     # deterministic by design
    write_residual_csv(tmp_path / "res.csv", rep.history)
    lines = (tmp_path / "res.csv").read_text().splitlines()
    assert lines[0] == "iteration,max_primal,dual,cg_iters"
    assert len(lines) == 4
