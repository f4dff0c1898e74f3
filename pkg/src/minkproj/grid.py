"""Gridded model containers and vectorization conventions.

A model lives on a regular 2D grid (n_z, n_x) or 3D grid (n_x, n_y, n_t).
Vectorization is fixed throughout the package: the first listed axis varies
fastest (Fortran order). For a 2D grid this means the n_z x n_x matrix view
and the flat vector agree via ``reshape(..., order="F")``. For 3D video
tensors the time axis is listed last, so each time slice occupies a
contiguous block of the flat vector.
"""

import numpy as np

_DEFAULT_LABELS = {2: ("z", "x"), 3: ("x", "y", "t")}


class ModelGrid:
    """Dimensions and axis ordering of a gridded model.

    Parameters
    ----------
    dims : sequence of int
        Axis extents, length 2 or 3, every extent >= 1.
    axis_labels : sequence of str, optional
        Names per axis; defaults to ("z", "x") in 2D and ("x", "y", "t")
        in 3D.
    """

    def __init__(self, dims, axis_labels=None):
        dims = tuple(int(d) for d in dims)
        if len(dims) not in (2, 3):
            raise ValueError("grid must have 2 or 3 axes, got %d" % len(dims))
        if any(d < 1 for d in dims):
            raise ValueError("grid extents must be >= 1, got %r" % (dims,))
        if axis_labels is None:
            axis_labels = _DEFAULT_LABELS[len(dims)]
        axis_labels = tuple(str(a) for a in axis_labels)
        if len(axis_labels) != len(dims):
            raise ValueError("need one label per axis")
        self.dims = dims
        self.axis_labels = axis_labels
        self.N = int(np.prod(dims))

    @property
    def ndim(self):
        return len(self.dims)

    def __eq__(self, other):
        return (isinstance(other, ModelGrid) and self.dims == other.dims
                and self.axis_labels == other.axis_labels)

    def __hash__(self):
        return hash((self.dims, self.axis_labels))

    def __repr__(self):
        return "ModelGrid(dims=%r, axis_labels=%r)" % (self.dims, self.axis_labels)


class ModelVector:
    """A flat real vector attached to a grid.

    ``data`` has length ``grid.N`` and finite entries; units are whatever
    the caller works in (velocities, grayscale values, ...).
    """

    def __init__(self, grid, data):
        data = np.asarray(data, dtype=float).ravel()
        if data.size != grid.N:
            raise ValueError("data has %d entries, grid wants %d"
                             % (data.size, grid.N))
        if not np.all(np.isfinite(data)):
            raise ValueError("model data contains non-finite entries")
        self.grid = grid
        self.data = data

    def to_array(self):
        """Multi-dimensional view of the vector, shape ``grid.dims``."""
        return self.data.reshape(self.grid.dims, order="F")

    def copy(self):
        return ModelVector(self.grid, self.data.copy())

    def __repr__(self):
        return "ModelVector(grid=%r, n=%d)" % (self.grid, self.data.size)


class StackedVector:
    """Two model components stacked as one optimization variable.

    Both parts share a single grid; total length is ``2 * grid.N``.
    """

    def __init__(self, u_part, v_part):
        if u_part.grid != v_part.grid:
            raise ValueError("stacked components must share one grid")
        self.u_part = u_part
        self.v_part = v_part
        self.grid = u_part.grid

    def to_flat(self):
        return np.concatenate([self.u_part.data, self.v_part.data])

    def sum_of(self):
        """Elementwise sum of the two components as a ModelVector."""
        return ModelVector(self.grid, self.u_part.data + self.v_part.data)


def vectorize(grid, array):
    """Flatten ``array`` (shape ``grid.dims``) into a ModelVector.

    The first axis varies fastest, so a 2x2 array [[1, 2], [3, 4]]
    becomes [1, 3, 2, 4].
    """
    array = np.asarray(array, dtype=float)
    if array.shape != grid.dims:
        raise ValueError("array shape %r does not match grid dims %r"
                         % (array.shape, grid.dims))
    return ModelVector(grid, array.ravel(order="F"))


def devectorize(m):
    """Inverse of :func:`vectorize`; returns an array of shape ``grid.dims``."""
    return m.to_array()


def matricize_2d(m):
    """Matrix view (n_z x n_x) of a 2D model vector; inverse of vectorize.

    Raises on 3D grids: rank-style constraints on 3D models are handled
    slice-wise by the caller, not by an implicit flattening.
    """
    if m.grid.ndim != 2:
        raise ValueError("matricize_2d needs a 2D grid, got %d axes"
                         % m.grid.ndim)
    return m.data.reshape(m.grid.dims, order="F")


def dematricize_2d(grid, mat):
    """Rebuild a ModelVector from its 2D matrix view."""
    mat = np.asarray(mat, dtype=float)
    if grid.ndim != 2 or mat.shape != grid.dims:
        raise ValueError("matrix shape %r does not match 2D grid %r"
                         % (mat.shape, grid.dims))
    return ModelVector(grid, mat.ravel(order="F"))


def split(x):
    """Split a StackedVector into its (u, v) components."""
    return x.u_part, x.v_part


def join(u, v):
    """Stack two components defined on the same grid."""
    return StackedVector(u, v)
