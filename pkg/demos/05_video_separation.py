"""Split a video into background and moving anomalies, no trade-off knobs.

The trailing frames of the clip are known to be empty of people. From them
alone we learn per-pixel bounds and a subspace for the background; the
anomaly component gets per-frame sparsity budgets on its pixels and on both
spatial derivatives (a person silhouette of width w crossed vertically
through its intensity transitions costs about persons * w * 4 nonzero
differences). Projecting the video onto the resulting set does the whole
separation.
"""

import numpy as np

import minkproj as mp
from minkproj.synthetic import lowrank_sparse_video
from minkproj.video import AnomalyBudgets, video_decompose

inst = lowrank_sparse_video(dims=(24, 18, 24), rank=2, training_frames=8,
                            persons=2, person_width=2, person_height=6,
                            seed=1)
tensor = inst["tensor"]
budgets = AnomalyBudgets(persons=2, person_width=2, person_height=6)
print("per-frame budgets: %d pixels, %d vertical and %d horizontal edges"
      % (budgets.pixel_budget(24, 18), budgets.vertical_derivative_budget(),
         budgets.horizontal_derivative_budget()))

background, anomaly, report = video_decompose(
    tensor, training_frames=8, budgets=budgets,
    opts=mp.ADMMOptions(max_iters=500))
print("converged=%s after %d sweeps" % (report.converged, report.iterations))

bg_err = np.linalg.norm(background.to_array() - inst["background"]) \
    / np.linalg.norm(inst["background"])
est = np.abs(anomaly.to_array()) > 20.0
true = inst["support"]
tp = np.logical_and(est, true).sum()
f1 = 2 * tp / (2 * tp + np.logical_and(est, ~true).sum()
               + np.logical_and(~est, true).sum())
print("background relative error: %.4f" % bg_err)
print("anomaly support F1: %.3f" % f1)

frame = 4
print("frame %d: %d true anomaly pixels, %d recovered"
      % (frame, true[:, :, frame].sum(), est[:, :, frame].sum()))
