import json

import numpy as np

from minkproj.cli import main
from minkproj.fileio import read_grid, write_grid
from minkproj.grid import ModelGrid, ModelVector

BASE_SETS = """
sets:
  - {label: anomaly, target: u, kind: box, lower: -150, upper: 0}
  - {label: background, target: v, kind: fixed, value: 2500}
  - {label: sum-bounds, target: sum, kind: box, lower: 2350, upper: 2550}
"""


def _write_model(path, value=2450.0, dims=(4, 5)):
    g = ModelGrid(dims)
    write_grid(path, ModelVector(g, np.full(g.N, value)))
    return g


def test_check_command_ok(tmp_path, capsys):
    cfg = tmp_path / "spec.yaml"
    cfg.write_text("grid: {dims: [4, 5]}\n" + BASE_SETS)
    assert main(["check", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "p=1 q=1 r=1 s=4" in out


def test_check_command_rejects_bad_bounds(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("""
grid: {dims: [4, 5]}
sets:
  - {label: broken-box, target: u, kind: box, lower: 1, upper: 0}
  - {label: background, target: v, kind: fixed, value: 2500}
""")
    assert main(["check", "--config", str(cfg)]) != 0
    err = capsys.readouterr().err
    assert "bound" in err


def test_check_rejects_unknown_keys(tmp_path, capsys):
    cfg = tmp_path / "weird.yaml"
    cfg.write_text("grid: {dims: [4, 5]}\nbanana: 1\n" + BASE_SETS)
    assert main(["check", "--config", str(cfg)]) != 0
    assert "banana" in capsys.readouterr().err


def test_project_command_outputs(tmp_path, capsys):
    _write_model(tmp_path / "m.gmsk")
    cfg = tmp_path / "run.yaml"
    cfg.write_text("grid: {dims: [4, 5]}\ninput: m.gmsk\n" + BASE_SETS)
    out = tmp_path / "out"
    assert main(["project", "--config", str(cfg), "--out-dir", str(out),
                 "--pgm"]) == 0
    w = read_grid(out / "w.gmsk")
    u = read_grid(out / "u.gmsk")
    v = read_grid(out / "v.gmsk")
    assert np.allclose(w.data, u.data + v.data)
    assert np.allclose(v.data, 2500.0)
    report = (out / "report.txt").read_text()
    assert "converged true" in report
    assert (out / "residuals.csv").exists()
    assert (out / "w.pgm").exists()


def test_project_deterministic_reports(tmp_path):
    _write_model(tmp_path / "m.gmsk")
    cfg = tmp_path / "run.yaml"
    cfg.write_text("grid: {dims: [4, 5]}\ninput: m.gmsk\nseed: 3\n" + BASE_SETS)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["project", "--config", str(cfg),
                     "--out-dir", str(out)]) == 0
        outs.append(out)
    for fname in ("report.txt", "residuals.csv", "w.gmsk", "u.gmsk", "v.gmsk"):
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_sample_command_deterministic(tmp_path):
    cfg = tmp_path / "spec.yaml"
    cfg.write_text("grid: {dims: [4, 5]}\nsample: {offset: 2450, scale: 40}\n"
                   + BASE_SETS)
    for name in ("s1", "s2"):
        assert main(["sample", "--config", str(cfg), "--seed", "7",
                     "--out-dir", str(tmp_path / name)]) == 0
    assert (tmp_path / "s1" / "w.gmsk").read_bytes() == \
        (tmp_path / "s2" / "w.gmsk").read_bytes()


def test_generate_command_blocky(tmp_path):
    cfg = tmp_path / "gen.yaml"
    cfg.write_text("""
seed: 11
generate:
  kind: blocky-anomaly-2d
  dims: [10, 10]
  mask_fraction: 0.5
""")
    for name in ("g1", "g2"):
        assert main(["generate", "--config", str(cfg),
                     "--out-dir", str(tmp_path / name)]) == 0
    for fname in ("model.gmsk", "anomaly_true.gmsk", "truth.json", "mask.txt",
                  "data.gmsk"):
        assert (tmp_path / "g1" / fname).read_bytes() == \
            (tmp_path / "g2" / fname).read_bytes()
    truth = json.loads((tmp_path / "g1" / "truth.json").read_text())
    assert truth["kind"] == "blocky-anomaly-2d"
    model = read_grid(tmp_path / "g1" / "model.gmsk")
    anom = read_grid(tmp_path / "g1" / "anomaly_true.gmsk")
    assert np.allclose(model.data - anom.data, 2500.0)


def test_generate_video_pure_background(tmp_path):
    cfg = tmp_path / "gen.yaml"
    cfg.write_text("""
generate:
  kind: lowrank-sparse-video
  dims: [8, 6, 10]
  persons: 0
  training_frames: 4
""")
    assert main(["generate", "--config", str(cfg),
                 "--out-dir", str(tmp_path)]) == 0
    truth = json.loads((tmp_path / "truth.json").read_text())
    assert truth["support"] == []
    video = read_grid(tmp_path / "video.gmsk")
    bg = read_grid(tmp_path / "background_true.gmsk")
    assert np.array_equal(video.data, bg.data)


def test_solve_spg_command(tmp_path, capsys):
    g = _write_model(tmp_path / "m0.gmsk", value=2400.0)
    write_grid(tmp_path / "target.gmsk",
               ModelVector(g, np.full(g.N, 2475.0)))
    cfg = tmp_path / "spg.yaml"
    cfg.write_text("""
grid: {dims: [4, 5]}
input: m0.gmsk
objective: {kind: proximity, target: target.gmsk}
""" + BASE_SETS)
    out = tmp_path / "out"
    assert main(["solve-spg", "--config", str(cfg),
                 "--out-dir", str(out)]) == 0
    m = read_grid(out / "m.gmsk")
    assert np.max(np.abs(m.data - 2475.0)) < 1e-3
    assert (out / "history.csv").exists()


def test_project_datafit_command(tmp_path):
    g = _write_model(tmp_path / "m.gmsk", value=2500.0)
    d = np.full(g.N, 2450.0)
    write_grid(tmp_path / "d.gmsk", ModelVector(g, d))
    cfg = tmp_path / "df.yaml"
    cfg.write_text("""
grid: {dims: [4, 5]}
input: m.gmsk
datafit: {data: d.gmsk, kind: pointwise, lower: -0.5, upper: 0.5}
""" + BASE_SETS)
    out = tmp_path / "out"
    assert main(["project-datafit", "--config", str(cfg),
                 "--out-dir", str(out)]) == 0
    x = read_grid(out / "w.gmsk")
    assert np.max(np.abs(x.data - 2450.0)) <= 0.5 + 1e-3


def test_video_decompose_command(tmp_path):
    from minkproj.synthetic import lowrank_sparse_video

    inst = lowrank_sparse_video(dims=(8, 6, 10), rank=1, training_frames=4,
                                persons=0, seed=2)
    write_grid(tmp_path / "video.gmsk", inst["tensor"])
    cfg = tmp_path / "video.yaml"
    cfg.write_text("""
input: video.gmsk
video: {training_frames: 4, persons: 1, person_width: 2, person_height: 3}
solver: {max_iters: 300}
""")
    out = tmp_path / "out"
    assert main(["video-decompose", "--config", str(cfg),
                 "--out-dir", str(out)]) == 0
    anom = read_grid(out / "anomaly.gmsk")
    assert np.linalg.norm(anom.data) <= 1e-3 * np.linalg.norm(inst["tensor"].data)


def test_missing_input_is_clean_error(tmp_path, capsys):
    cfg = tmp_path / "run.yaml"
    cfg.write_text("grid: {dims: [4, 5]}\ninput: nope.gmsk\n" + BASE_SETS)
    assert main(["project", "--config", str(cfg),
                 "--out-dir", str(tmp_path)]) == 2
    assert "nope.gmsk" in capsys.readouterr().err
