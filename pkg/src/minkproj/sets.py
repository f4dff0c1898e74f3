"""Closed-form projections onto elementary constraint sets.

Every projection here is the exact Euclidean projection (nearest point) and
is idempotent, including the non-convex ones (cardinality, rank, annulus
with a positive inner radius). Convex projections are additionally
nonexpansive and satisfy the variational inequality
``<y - P(y), z - P(y)> <= 0`` for feasible z.

Sets that act per tensor slice (cardinality budgets per video frame, a
subspace constraint applied frame by frame) take an explicit ``partition``:
a list of index ranges covering the vector. Nothing is partitioned
implicitly.
"""

import numpy as np

_CONVEX_KINDS = ("box", "fixed", "l1_ball", "l2_ball", "subspace",
                 "pointwise_datafit")


def project_box(y, lower, upper):
    """Elementwise clamp to [lower, upper]; bounds may be +-inf."""
    return np.clip(y, lower, upper)


def project_monotone_derivative(y, lower, upper):
    """Box projection in a derivative domain; an infinite bound is skipped."""
    return project_box(y, lower, upper)


def project_fixed(y, value):
    """Projection onto a single point."""
    return np.broadcast_to(np.asarray(value, dtype=float), np.shape(y)).copy()


def project_l1_ball(y, radius):
    """Euclidean projection onto the l1 ball of the given radius.

    Sort-based exact thresholding: find the soft-threshold level from the
    sorted magnitudes in O(n log n), then shrink toward zero.
    """
    if radius < 0:
        raise ValueError("l1 radius must be nonnegative")
    y = np.asarray(y, dtype=float)
    a = np.abs(y)
    if a.sum() <= radius:
        return y.copy()
    if radius == 0:
        return np.zeros_like(y)
    srt = np.sort(a)[::-1]
    cums = np.cumsum(srt) - radius
    k = np.arange(1, a.size + 1)
    idx = np.nonzero(srt > cums / k)[0][-1]
    theta = cums[idx] / (idx + 1.0)
    return np.sign(y) * np.maximum(a - theta, 0.0)


def project_l2_ball(y, radius, center=None):
    """Euclidean projection onto the l2 ball around ``center``."""
    return project_l2_annulus(y, 0.0, radius, center=center)


def project_l2_annulus(y, sigma_lower, sigma_upper, center=None):
    """Projection onto { y : sigma_lower <= ||y - center||_2 <= sigma_upper }.

    The radial scaling is exact. At the set-valued point y == center with a
    positive inner radius, the deterministic tie-break steps along the first
    coordinate axis.
    """
    if not 0 <= sigma_lower < sigma_upper:
        raise ValueError("annulus needs 0 <= sigma_lower < sigma_upper")
    y = np.asarray(y, dtype=float)
    r = y if center is None else y - center
    n = np.linalg.norm(r)
    if sigma_lower <= n <= sigma_upper:
        return y.copy()
    if n == 0.0:
        out = np.zeros_like(y)
        out[0] = sigma_lower
        return out if center is None else out + center
    scaled = r * ((sigma_upper if n > sigma_upper else sigma_lower) / n)
    return scaled if center is None else scaled + center


def _slices(n, partition):
    if partition is None:
        return [slice(0, n)]
    return list(partition)


def project_cardinality(y, k, partition=None):
    """Keep the k largest-magnitude entries per slice, zero the rest.

    Ties at the k-th magnitude keep the lowest index. With no partition the
    whole vector is one slice; ``k`` may be a scalar or one budget per slice.
    """
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    slices = _slices(y.size, partition)
    ks = np.broadcast_to(np.asarray(k, dtype=int), (len(slices),))
    for sl, ki in zip(slices, ks):
        block = y[sl]
        if not 0 <= ki <= block.size:
            raise ValueError("cardinality budget %d invalid for slice of %d"
                             % (ki, block.size))
        if ki == block.size:
            out[sl] = block
            continue
        if ki == 0:
            continue
        keep = np.argsort(-np.abs(block), kind="stable")[:ki]
        tmp = np.zeros_like(block)
        tmp[keep] = block[keep]
        out[sl] = tmp
    return out


def project_rank(y, r, shape, partition=None):
    """Truncated-SVD projection onto matrices of rank at most r.

    Each slice (the whole vector by default) is viewed as a matrix of the
    given shape in first-axis-fastest order, its top r singular triplets
    kept, and the result flattened back.
    """
    y = np.asarray(y, dtype=float)
    if not 1 <= r <= min(shape):
        raise ValueError("rank bound %d invalid for %r matrices" % (r, shape))
    out = np.empty_like(y)
    for sl in _slices(y.size, partition):
        mat = y[sl].reshape(shape, order="F")
        u, s, vt = np.linalg.svd(mat, full_matrices=False)
        s[r:] = 0.0
        out[sl] = ((u * s) @ vt).ravel(order="F")
    return out


def orthonormal_basis(frames, rel_tol=1e-12):
    """Orthonormal column basis for the span of raw training frames.

    Thin SVD of the frame matrix; directions with singular values below
    ``rel_tol`` times the largest are dropped. All-zero frames yield an
    empty basis, whose span is the single point 0.
    """
    frames = np.asarray(frames, dtype=float)
    if frames.ndim != 2:
        raise ValueError("training frames must form a 2D matrix")
    u, s, _ = np.linalg.svd(frames, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((frames.shape[0], 0))
    return np.ascontiguousarray(u[:, s > rel_tol * s[0]])


def project_subspace(y, basis, partition=None):
    """Orthogonal projection U (U^T y) onto the span of an orthonormal basis.

    With a partition, the same basis is applied independently to each slice
    (e.g. frame by frame for a video tensor).
    """
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    for sl in _slices(y.size, partition):
        out[sl] = basis @ (basis.T @ y[sl])
    return out


def project_pointwise_datafit(y, d_obs, lower, upper):
    """Projection onto { y : lower <= y - d_obs <= upper } elementwise."""
    return d_obs + np.clip(y - d_obs, lower, upper)


class ElementarySet:
    """One elementary constraint set with its closed-form projection.

    Construct through the module-level factories (:func:`box`,
    :func:`l1_ball`, ...), which validate parameters up front. ``dim`` is
    the required input dimension, or None when any length is accepted.
    """

    def __init__(self, kind, params, dim=None):
        self.kind = kind
        self.params = params
        self.dim = dim

    @property
    def convex(self):
        if self.kind == "l2_annulus":
            return self.params["sigma_lower"] == 0.0
        return self.kind in _CONVEX_KINDS

    def check_dim(self, n):
        if self.dim is not None and n != self.dim:
            raise ValueError("%s set wants vectors of length %d, got %d"
                             % (self.kind, self.dim, n))

    def project(self, y):
        y = np.asarray(y, dtype=float)
        self.check_dim(y.size)
        p = self.params
        if self.kind == "box":
            return project_box(y, p["lower"], p["upper"])
        if self.kind == "fixed":
            return project_fixed(y, p["value"])
        if self.kind == "l1_ball":
            return project_l1_ball(y, p["radius"])
        if self.kind == "l2_ball":
            return project_l2_ball(y, p["radius"], center=p["center"])
        if self.kind == "l2_annulus":
            return project_l2_annulus(y, p["sigma_lower"], p["sigma_upper"],
                                      center=p["center"])
        if self.kind == "cardinality":
            return project_cardinality(y, p["k"], partition=p["partition"])
        if self.kind == "rank":
            return project_rank(y, p["r"], p["shape"],
                                partition=p["partition"])
        if self.kind == "subspace":
            return project_subspace(y, p["basis"], partition=p["partition"])
        if self.kind == "pointwise_datafit":
            return project_pointwise_datafit(y, p["d_obs"], p["lower"],
                                             p["upper"])
        raise ValueError("unknown set kind %r" % self.kind)

    def __repr__(self):
        return "ElementarySet(%s)" % self.kind


def _bounds_pair(lower, upper):
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    if np.any(lo > hi):
        raise ValueError("lower bound exceeds upper bound")
    return lo, hi


def box(lower, upper):
    """Bound constraints; scalar or per-entry, infinities allowed."""
    lo, hi = _bounds_pair(lower, upper)
    dim = None
    if lo.ndim > 0 or hi.ndim > 0:
        dim = int(np.broadcast_shapes(lo.shape, hi.shape)[0])
    return ElementarySet("box", {"lower": lo, "upper": hi}, dim=dim)


def fixed(value):
    """A single point; bound constraints collapsed to equality."""
    val = np.asarray(value, dtype=float)
    return ElementarySet("fixed", {"value": val},
                         dim=val.size if val.ndim > 0 else None)


def l1_ball(radius):
    if radius < 0:
        raise ValueError("l1 radius must be nonnegative")
    return ElementarySet("l1_ball", {"radius": float(radius)})


def l2_ball(radius, center=None):
    if radius < 0:
        raise ValueError("l2 radius must be nonnegative")
    center = None if center is None else np.asarray(center, dtype=float)
    return ElementarySet("l2_ball", {"radius": float(radius), "center": center},
                         dim=None if center is None else center.size)


def l2_annulus(sigma_lower, sigma_upper, center=None):
    if not 0 <= sigma_lower < sigma_upper:
        raise ValueError("annulus needs 0 <= sigma_lower < sigma_upper")
    center = None if center is None else np.asarray(center, dtype=float)
    return ElementarySet("l2_annulus",
                         {"sigma_lower": float(sigma_lower),
                          "sigma_upper": float(sigma_upper), "center": center},
                         dim=None if center is None else center.size)


def _check_partition(partition):
    if partition is None:
        return None, None
    partition = [sl if isinstance(sl, slice) else slice(*sl) for sl in partition]
    stop = 0
    for sl in partition:
        if sl.start != stop:
            raise ValueError("partition slices must be contiguous and ordered")
        stop = sl.stop
    return partition, stop


def cardinality(k, partition=None):
    """At most k nonzero entries per slice (whole vector if unpartitioned)."""
    partition, dim = _check_partition(partition)
    ks = np.asarray(k, dtype=int)
    if np.any(ks < 0):
        raise ValueError("cardinality budget must be nonnegative")
    if partition is not None:
        ks_b = np.broadcast_to(ks, (len(partition),))
        for sl, ki in zip(partition, ks_b):
            if ki > sl.stop - sl.start:
                raise ValueError("cardinality budget %d exceeds slice length %d"
                                 % (ki, sl.stop - sl.start))
    return ElementarySet("cardinality", {"k": ks, "partition": partition},
                         dim=dim)


def rank_limit(r, shape, partition=None):
    """Rank at most r for the matrix view of each slice."""
    shape = tuple(int(v) for v in shape)
    if not 1 <= r <= min(shape):
        raise ValueError("rank bound %d invalid for %r matrices" % (r, shape))
    partition, dim = _check_partition(partition)
    if dim is None:
        dim = int(np.prod(shape))
    else:
        block = int(np.prod(shape))
        for sl in partition:
            if sl.stop - sl.start != block:
                raise ValueError("rank partition slices must match the matrix size")
    return ElementarySet("rank", {"r": int(r), "shape": shape,
                                  "partition": partition}, dim=dim)


def subspace(basis=None, frames=None, partition=None, orth_tol=1e-10):
    """Column span of an orthonormal basis, optionally applied per slice.

    Either pass an orthonormal ``basis`` directly or raw training ``frames``
    which are orthonormalized here.
    """
    if (basis is None) == (frames is None):
        raise ValueError("pass exactly one of basis or frames")
    if frames is not None:
        basis = orthonormal_basis(frames)
    basis = np.asarray(basis, dtype=float)
    if basis.shape[1]:
        gram = basis.T @ basis
        if np.max(np.abs(gram - np.eye(basis.shape[1]))) > orth_tol:
            raise ValueError("subspace basis is not orthonormal")
    partition, dim = _check_partition(partition)
    if dim is None:
        dim = basis.shape[0]
    else:
        for sl in partition:
            if sl.stop - sl.start != basis.shape[0]:
                raise ValueError("subspace partition slices must match the basis rows")
    return ElementarySet("subspace", {"basis": basis, "partition": partition},
                         dim=dim)


def pointwise_datafit(d_obs, lower, upper):
    """Per-entry bounds on the misfit against observed data."""
    d_obs = np.asarray(d_obs, dtype=float).ravel()
    lo, hi = _bounds_pair(lower, upper)
    return ElementarySet("pointwise_datafit",
                         {"d_obs": d_obs, "lower": lo, "upper": hi},
                         dim=d_obs.size)


def feasibility_distance(x, eset, transform=None):
    """Normalized distance ||P(Tx) - Tx|| / max(||Tx||, 1) to one set."""
    x = np.asarray(x, dtype=float).ravel()
    t = x if transform is None else transform @ x
    return float(np.linalg.norm(eset.project(t) - t)
                 / max(np.linalg.norm(t), 1.0))
