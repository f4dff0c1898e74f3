"""Background-anomaly separation of a video tensor by Minkowski projection.

The video (n_x, n_y, n_t) is decomposed into a background component that a
few anomaly-free trailing frames describe well, plus a sparse anomaly
component, by projecting the whole tensor onto a generalized Minkowski set:

  background (u): per-pixel box bounds over the training frames, and each
    frame restricted to the subspace spanned by the training frames;
  anomaly (v): box bounds derived as sum bounds minus background bounds,
    plus per-frame cardinality budgets on pixel values and on both in-frame
    spatial derivatives;
  sum: the recorded value range, shifted by the per-frame means.

The per-frame mean is subtracted up front to absorb global intensity drift
and restored on output, so the returned components are in original units.
There is deliberately no data-fit constraint: proximity to the input is
supplied by the projection objective itself.
"""

import numpy as np

from .admm import admm_project
from .grid import ModelGrid, ModelVector
from .operators import Transform
from .sets import box, cardinality, subspace
from .spec import MinkowskiSpec, SetDescriptor, validate


class AnomalyBudgets:
    """Per-frame sparsity budgets for the anomaly component.

    The derivative budgets follow the persons-times-extent-times-boundaries
    rule of thumb: a person silhouette about ``person_width`` pixels wide
    crossed vertically through background/head/torso/legs transitions gives
    persons * width * 4 nonzero vertical differences per frame, and
    similarly persons * height * 4 horizontal ones. The defaults
    (10 persons, 12 wide, 11 tall) give budgets of 480 and 440.

    The pixel-value budget is a fixed fraction of the frame:
    floor(n_x / 4) * floor(n_y / 4), one sixteenth of the pixels.
    """

    def __init__(self, persons=10, person_width=12, person_height=11,
                 boundaries=4):
        self.persons = int(persons)
        self.person_width = int(person_width)
        self.person_height = int(person_height)
        self.boundaries = int(boundaries)

    def pixel_budget(self, n_x, n_y):
        return (n_x // 4) * (n_y // 4)

    def vertical_derivative_budget(self):
        return self.persons * self.person_width * self.boundaries

    def horizontal_derivative_budget(self):
        return self.persons * self.person_height * self.boundaries


def frame_partition(grid, transform=None):
    """Contiguous per-frame slices of a transform output on a 3D grid.

    With time as the slowest axis every in-frame transform (identity or a
    spatial derivative) maps frames to contiguous output blocks.
    """
    if grid.ndim != 3:
        raise ValueError("frame partitions need a 3D grid")
    n_t = grid.dims[2]
    if transform is None or transform.kind == "identity":
        block = grid.N // n_t
    elif transform.kind == "derivative" and transform.axis in (0, 1):
        block = transform.output_dim(grid) // n_t
    else:
        raise ValueError("per-frame partition only for identity or in-frame "
                         "derivative transforms")
    return [slice(i * block, (i + 1) * block) for i in range(n_t)]


def build_video_spec(tensor0, training_frames, budgets, value_range,
                     frame_means):
    """Constraint collection for a mean-subtracted video tensor.

    ``tensor0`` is the mean-subtracted (n_x, n_y, n_t) array; the last
    ``training_frames`` frames are taken as anomaly-free.
    """
    n_x, n_y, n_t = tensor0.shape
    grid = ModelGrid((n_x, n_y, n_t))
    n_pix = n_x * n_y
    train = tensor0[:, :, n_t - training_frames:]

    # background bounds: per-pixel min/max over the training frames,
    # repeated for every frame
    pix_lo = train.min(axis=2)
    pix_hi = train.max(axis=2)
    bg_lo = np.tile(pix_lo.ravel(order="F"), n_t)
    bg_hi = np.tile(pix_hi.ravel(order="F"), n_t)

    # sum bounds: the recording range shifted by each frame's mean
    lo, hi = value_range
    sum_lo = np.repeat(lo - frame_means, n_pix)
    sum_hi = np.repeat(hi - frame_means, n_pix)

    # anomaly bounds: sum bounds minus background bounds
    an_lo = sum_lo - bg_hi
    an_hi = sum_hi - bg_lo

    frames_matrix = train.reshape(n_pix, training_frames, order="F")
    value_slices = frame_partition(grid)
    dy = Transform.derivative(1)   # differences along y: vertical transitions
    dx = Transform.derivative(0)   # differences along x: horizontal transitions

    descriptors = [
        SetDescriptor("u", None, box(bg_lo, bg_hi), label="background-bounds"),
        SetDescriptor("u", None,
                      subspace(frames=frames_matrix, partition=value_slices),
                      label="background-subspace"),
        SetDescriptor("v", None, box(an_lo, an_hi), label="anomaly-bounds"),
        SetDescriptor("v", None,
                      cardinality(budgets.pixel_budget(n_x, n_y),
                                  partition=value_slices),
                      label="anomaly-pixel-budget"),
        SetDescriptor("v", dy,
                      cardinality(min(budgets.vertical_derivative_budget(),
                                      n_x * (n_y - 1)),
                                  partition=frame_partition(grid, dy)),
                      label="anomaly-vertical-edges"),
        SetDescriptor("v", dx,
                      cardinality(min(budgets.horizontal_derivative_budget(),
                                      (n_x - 1) * n_y),
                                  partition=frame_partition(grid, dx)),
                      label="anomaly-horizontal-edges"),
        SetDescriptor("sum", None, box(sum_lo, sum_hi), label="sum-range"),
    ]
    return validate(MinkowskiSpec(grid, descriptors))


def video_decompose(tensor, training_frames, budgets=None,
                    value_range=(0.0, 255.0), opts=None):
    """Split a video tensor into background and anomaly components.

    Parameters
    ----------
    tensor : ModelVector on a 3D grid, or (n_x, n_y, n_t) array
        The video, with time as the last axis.
    training_frames : int
        Number of trailing anomaly-free frames used to learn the
        background bounds and subspace; must leave at least one frame.
    budgets : AnomalyBudgets, optional
    value_range : pair, optional
        Recording range of the raw values, default (0, 255) grayscale.
    opts : ADMMOptions, optional

    Returns
    -------
    (background, anomaly, report) : ModelVectors in original units (the
    per-frame means are restored onto the background) and the solve report.
    """
    if isinstance(tensor, ModelVector):
        if tensor.grid.ndim != 3:
            raise ValueError("video decomposition needs a 3D grid")
        arr = tensor.to_array()
    else:
        arr = np.asarray(tensor, dtype=float)
        if arr.ndim != 3:
            raise ValueError("video decomposition needs a 3D tensor")
    n_t = arr.shape[2]
    if not 1 <= training_frames < n_t:
        raise ValueError("need 1 <= training_frames < n_t, got %d of %d"
                         % (training_frames, n_t))
    if budgets is None:
        budgets = AnomalyBudgets()

    frame_means = arr.mean(axis=(0, 1))
    arr0 = arr - frame_means[None, None, :]
    spec = build_video_spec(arr0, training_frames, budgets, value_range,
                            frame_means)
    m0 = ModelVector(spec.grid, arr0.ravel(order="F"))
    _, u, v, report = admm_project(m0, spec, opts)
    background = ModelVector(
        spec.grid, u.data + np.repeat(frame_means, arr.shape[0] * arr.shape[1]))
    return background, v, report
