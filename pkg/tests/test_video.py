import numpy as np
import pytest

from minkproj import (ADMMOptions, AnomalyBudgets, ModelGrid, frame_partition,
                      is_member, video_decompose)
from minkproj.synthetic import lowrank_sparse_video
from minkproj.video import build_video_spec


def test_budget_formulas_at_reference_dimensions():
    budgets = AnomalyBudgets()   # 10 persons, 12 wide, 11 tall, 4 boundaries
    assert budgets.vertical_derivative_budget() == 480
    assert budgets.horizontal_derivative_budget() == 440
    assert budgets.pixel_budget(80, 64) == 20 * 16


def test_pixel_budget_floors_non_divisible_extents():
    assert AnomalyBudgets().pixel_budget(10, 7) == 2 * 1


def test_frame_partition_blocks():
    from minkproj import Transform

    g = ModelGrid((4, 3, 5))
    parts = frame_partition(g)
    assert len(parts) == 5
    assert parts[0] == slice(0, 12) and parts[-1] == slice(48, 60)
    dy = frame_partition(g, Transform.derivative(1))
    assert dy[0] == slice(0, 8)     # 4 * (3 - 1) rows per frame
    dx = frame_partition(g, Transform.derivative(0))
    assert dx[0] == slice(0, 9)     # (4 - 1) * 3 rows per frame


def test_constant_video_has_no_anomaly():
    dims = (8, 6, 10)
    tensor = np.full(dims, 120.0)
    bg, anom, rep = video_decompose(tensor, training_frames=3,
                                    budgets=AnomalyBudgets(1, 2, 3),
                                    opts=ADMMOptions(max_iters=300))
    assert np.linalg.norm(anom.data) <= 1e-6 * np.linalg.norm(tensor)
    assert np.max(np.abs(bg.data - 120.0)) < 1e-6


def test_pure_background_decomposition():
    inst = lowrank_sparse_video(dims=(12, 9, 12), rank=2, training_frames=6,
                                persons=0, seed=1)
    tensor = inst["tensor"].to_array()
    bg, anom, rep = video_decompose(tensor, training_frames=6,
                                    budgets=AnomalyBudgets(1, 2, 3),
                                    opts=ADMMOptions(max_iters=400))
    assert np.linalg.norm(anom.data) <= 1e-4 * np.linalg.norm(tensor)
    rel = np.linalg.norm(bg.to_array() - inst["background"]) / \
        np.linalg.norm(inst["background"])
    assert rel < 1e-4


def test_small_scale_recovery():
    # one 2x6 person: 12 pixels, exactly the per-frame pixel budget at 16x12
    inst = lowrank_sparse_video(dims=(16, 12, 16), rank=2, training_frames=6,
                                persons=1, person_width=2, person_height=6,
                                seed=4)
    budgets = AnomalyBudgets(persons=1, person_width=2, person_height=6)
    bg, anom, rep = video_decompose(inst["tensor"], training_frames=6,
                                    budgets=budgets,
                                    opts=ADMMOptions(max_iters=500))
    est = np.abs(anom.to_array()) > 20.0
    true = inst["support"]
    tp = np.logical_and(est, true).sum()
    f1 = 2 * tp / (2 * tp + np.logical_and(est, ~true).sum()
                   + np.logical_and(~est, true).sum())
    assert f1 >= 0.9
    rel_bg = np.linalg.norm(bg.to_array() - inst["background"]) / \
        np.linalg.norm(inst["background"])
    assert rel_bg <= 0.05


def test_decomposition_satisfies_own_spec():
    inst = lowrank_sparse_video(dims=(12, 9, 10), rank=1, training_frames=4,
                                persons=1, person_width=2, person_height=3,
                                seed=6)
    arr = inst["tensor"].to_array()
    budgets = AnomalyBudgets(persons=1, person_width=2, person_height=3)
    means = arr.mean(axis=(0, 1))
    spec = build_video_spec(arr - means, 4, budgets, (0.0, 255.0), means)
    bg, anom, rep = video_decompose(arr, training_frames=4, budgets=budgets,
                                    opts=ADMMOptions(max_iters=800))
    u0 = bg.data - np.repeat(means, 12 * 9)
    ok, dists = is_member(spec, u0, anom.data, tol=1e-3)
    assert ok, dists


def test_too_few_frames_rejected():
    with pytest.raises(ValueError, match="training_frames"):
        video_decompose(np.zeros((4, 4, 3)), training_frames=3)


def test_generator_respects_budgets():
    inst = lowrank_sparse_video(dims=(32, 24, 20), rank=2, training_frames=8,
                                persons=2, person_width=4, person_height=6,
                                seed=0)
    budgets = AnomalyBudgets(persons=2, person_width=4, person_height=6)
    anom = inst["anomaly"]
    for f in range(20):
        frame = anom[:, :, f]
        assert (frame != 0).sum() <= budgets.pixel_budget(32, 24)
        dy = np.diff(frame, axis=1)
        assert (dy != 0).sum() <= budgets.vertical_derivative_budget()
        dx = np.diff(frame, axis=0)
        assert (dx != 0).sum() <= budgets.horizontal_derivative_budget()
