"""Deterministic synthetic instances for demos and verification.

Two families: a 2D velocity-style model (constant background, one
rectangular low-velocity anomaly) and a video-style tensor (smooth rank-2
background modulated in time, plus per-frame blocky "person" anomalies
whose sparsity respects given budgets). Everything is a pure function of
the seed, and every instance ships its ground truth.
"""

import numpy as np
import scipy.sparse as sp

from .grid import ModelGrid, vectorize


def blocky_anomaly_2d(dims=(20, 20), background=2500.0, anomaly_depth=-150.0,
                      rect=None, seed=0):
    """Constant-background model with one rectangular negative anomaly.

    ``rect`` is (z0, z1, x0, x1) in grid index ranges; by default a roughly
    centered rectangle covering about an eighth of the model is drawn from
    the seed.

    Returns a dict with the grid, the full model, the background and
    anomaly components, the boolean support mask, and the rectangle.
    """
    rng = np.random.default_rng(seed)
    n_z, n_x = dims
    grid = ModelGrid(dims)
    if rect is None:
        h = max(2, int(round(n_z * 0.4)))
        w = max(2, int(round(n_x * 0.3)))
        z0 = int(rng.integers(1, n_z - h))
        x0 = int(rng.integers(1, n_x - w))
        rect = (z0, z0 + h, x0, x0 + w)
    z0, z1, x0, x1 = rect
    anomaly = np.zeros(dims)
    anomaly[z0:z1, x0:x1] = anomaly_depth
    model = background + anomaly
    return {
        "grid": grid,
        "model": vectorize(grid, model),
        "background": np.full(grid.N, background),
        "anomaly": vectorize(grid, anomaly).data,
        "support": vectorize(grid, anomaly != 0).data.astype(bool),
        "rect": rect,
    }


def random_mask_operator(n, fraction, seed=0):
    """Row-selection operator keeping a random fraction of the entries."""
    if not 0 < fraction <= 1:
        raise ValueError("mask fraction must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    keep = np.sort(rng.choice(n, size=max(1, int(round(fraction * n))),
                              replace=False))
    data = np.ones(keep.size)
    return sp.csr_matrix((data, (np.arange(keep.size), keep)),
                         shape=(keep.size, n)), keep


def _person(rng, patch, x_slot, n_y, width, height):
    """Stamp a person-like silhouette into its own column slot of a frame.

    Three stacked blocks of distinct intensity give four vertical
    transitions per pixel column, matching the boundaries factor in the
    derivative budgets; disjoint column slots keep the per-frame counts
    exactly at persons * extent * boundaries.
    """
    lo, hi = x_slot
    x0 = int(rng.integers(lo, hi - width + 1))
    y0 = int(rng.integers(0, n_y - height + 1))
    sign = -1.0 if rng.random() < 0.5 else 1.0
    levels = sign * np.array([40.0, 55.0, 48.0])
    block_h = height // 3
    for b in range(3):
        patch[x0:x0 + width, y0 + b * block_h:y0 + (b + 1) * block_h] = levels[b]


def lowrank_sparse_video(dims=(32, 24, 40), rank=2, training_frames=8,
                         persons=2, person_width=4, person_height=6,
                         anomaly_frames=None, seed=0):
    """Rank-``rank`` background video plus per-frame blocky anomalies.

    The background is a sum of smooth spatial patterns with periodic
    temporal coefficients whose period divides ``training_frames``, so the
    trailing training window sees the full range of every pixel. Anomalies
    (absent from the training window) are ``persons`` silhouettes per
    affected frame. With ``persons`` = 0 or ``anomaly_frames`` = 0 the
    tensor is pure background.

    Returns a dict with the tensor (ModelVector on a 3D grid), the true
    background and anomaly arrays, the per-frame boolean support, and the
    generation parameters.
    """
    n_x, n_y, n_t = dims
    if person_height % 3:
        raise ValueError("person_height must be a multiple of 3")
    rng = np.random.default_rng(seed)
    grid = ModelGrid(dims)

    gx, gy = np.meshgrid(np.linspace(0, 1, n_x), np.linspace(0, 1, n_y),
                         indexing="ij")
    patterns = [np.sin(np.pi * gx) * np.cos(np.pi * gy),
                np.cos(2 * np.pi * gx) + 0.5 * gy,
                np.sin(2 * np.pi * gy) * gx]
    patterns = patterns[:rank]
    # coefficient period divides the training window, so the trailing
    # frames see the full per-pixel range of the background
    period = max(2, training_frames // 2)
    t = np.arange(n_t)
    coeffs = [20.0 * np.sin(2 * np.pi * (t + 3 * k) / period) + 10.0 * k
              for k in range(rank)]
    background = np.full(dims, 128.0)
    for pat, c in zip(patterns, coeffs):
        background += pat[:, :, None] * c[None, None, :]

    anomaly = np.zeros(dims)
    support = np.zeros(dims, dtype=bool)
    n_clean = training_frames
    if anomaly_frames is None:
        anomaly_frames = n_t - n_clean
    if persons > 0:
        slot = n_x // persons
        if slot < person_width:
            raise ValueError("persons do not fit side by side in the frame")
        for f in range(min(anomaly_frames, n_t - n_clean)):
            frame = np.zeros((n_x, n_y))
            for k in range(persons):
                _person(rng, frame, (k * slot, (k + 1) * slot), n_y,
                        person_width, person_height)
            anomaly[:, :, f] = frame
            support[:, :, f] = frame != 0
    tensor = background + anomaly
    if tensor.min() < 0.0 or tensor.max() > 255.0:
        raise ValueError("generated values leave the grayscale range; "
                         "reduce the pattern or anomaly amplitudes")
    return {
        "grid": grid,
        "tensor": vectorize(grid, tensor),
        "background": background,
        "anomaly": anomaly,
        "support": support,
        "training_frames": training_frames,
        "persons": persons,
        "person_width": person_width,
        "person_height": person_height,
    }
