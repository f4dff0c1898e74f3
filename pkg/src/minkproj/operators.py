"""Sparse linear operators and the stacked two-component block system.

Transforms are realized as scipy CSR matrices. Per-axis first differences
use the Kronecker structure implied by the first-axis-fastest vectorization:
a derivative along axis ``a`` of a grid (n_0, ..., n_k) is

    kron(I_after, kron(D_{n_a}, I_before))

with ``I_before`` the identity over the faster axes and ``I_after`` over the
slower ones. Differences are forward, without boundary wrap, so the operator
has (n_a - 1) rows per grid line and annihilates constants along its axis.
"""

import numpy as np
import scipy.sparse as sp


class NotPositiveDefiniteError(Exception):
    """The block system lost positive definiteness.

    Happens when neither component carries an identity-transform bound
    constraint, so the stacked operator does not have full column rank.
    """


def identity_operator(n):
    return sp.identity(n, dtype=float, format="csr")


def first_difference(n):
    """Forward first-difference matrix of shape (n-1, n)."""
    if n < 2:
        raise ValueError("first differences need an extent >= 2, got %d" % n)
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], offsets=[0, 1],
                    shape=(n - 1, n), dtype=float).tocsr()


def build_derivative(grid, axis):
    """First-difference operator along one grid axis.

    (D m)[k] = m[next along axis] - m[k]; row count is N * (n_axis - 1) / n_axis.
    """
    dims = grid.dims
    if not 0 <= axis < len(dims):
        raise ValueError("axis %d out of range for %d-axis grid" % (axis, len(dims)))
    if dims[axis] < 2:
        raise ValueError("cannot difference axis %d with extent 1" % axis)
    n_before = int(np.prod(dims[:axis], dtype=int)) if axis > 0 else 1
    n_after = int(np.prod(dims[axis + 1:], dtype=int)) if axis + 1 < len(dims) else 1
    op = sp.kron(sp.identity(n_after), sp.kron(first_difference(dims[axis]),
                                               sp.identity(n_before)))
    return op.tocsr()


def build_gradient(grid):
    """Stacked first differences over all axes (anisotropic TV operator).

    Axes of extent 1 carry no variation and are skipped.
    """
    blocks = [build_derivative(grid, a) for a in range(grid.ndim)
              if grid.dims[a] >= 2]
    if not blocks:
        raise ValueError("gradient needs at least one axis of extent >= 2")
    return sp.vstack(blocks, format="csr")


def matvec(A, x):
    """Sparse product A @ x with an explicit dimension check."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size != A.shape[1]:
        raise ValueError("matvec: operator is %r, vector has %d entries"
                         % (A.shape, x.size))
    return A @ x


def rmatvec(A, y):
    """Transpose product A.T @ y with an explicit dimension check."""
    y = np.asarray(y, dtype=float).ravel()
    if y.size != A.shape[0]:
        raise ValueError("rmatvec: operator is %r, vector has %d entries"
                         % (A.shape, y.size))
    return A.T @ y


def compressed_diagonal_view(A, band_limit=None):
    """DIA-format view of ``A`` when it is banded enough, else None.

    The view reproduces CSR matvec results to within roundoff; it is an
    optimization only, never a semantic change.
    """
    coo = A.tocoo()
    if coo.nnz == 0:
        return None
    bandwidth = int(np.max(np.abs(coo.col - coo.row)))
    if band_limit is not None and bandwidth > band_limit:
        return None
    n_offsets = np.unique(coo.col - coo.row).size
    # a DIA view only pays off when few distinct diagonals are present
    if n_offsets > 2 * bandwidth + 1 or n_offsets > 64:
        return None
    return A.todia()


class Transform:
    """Specification of the linear map in front of an elementary set.

    Kinds: ``identity``, ``derivative`` (one axis), ``gradient`` (stacked
    first differences over all axes), ``matrix`` (caller-supplied sparse
    operator, e.g. a mask or blur loaded from file).
    """

    def __init__(self, kind, axis=None, matrix=None):
        if kind not in ("identity", "derivative", "gradient", "matrix"):
            raise ValueError("unknown transform kind %r" % kind)
        if kind == "derivative" and axis is None:
            raise ValueError("derivative transform needs an axis")
        if kind == "matrix" and matrix is None:
            raise ValueError("matrix transform needs an operator")
        self.kind = kind
        self.axis = axis
        self.matrix = None if matrix is None else sp.csr_matrix(matrix)

    @classmethod
    def identity(cls):
        return cls("identity")

    @classmethod
    def derivative(cls, axis):
        return cls("derivative", axis=axis)

    @classmethod
    def gradient(cls):
        return cls("gradient")

    @classmethod
    def from_matrix(cls, matrix):
        return cls("matrix", matrix=matrix)

    def realize(self, grid):
        """Concrete CSR operator for this transform on ``grid``."""
        if self.kind == "identity":
            return identity_operator(grid.N)
        if self.kind == "derivative":
            return build_derivative(grid, self.axis)
        if self.kind == "gradient":
            return build_gradient(grid)
        if self.matrix.shape[1] != grid.N:
            raise ValueError("custom operator has %d columns, grid wants %d"
                             % (self.matrix.shape[1], grid.N))
        return self.matrix

    def output_dim(self, grid):
        if self.kind == "identity":
            return grid.N
        if self.kind == "derivative":
            n = grid.dims[self.axis]
            return grid.N * (n - 1) // n
        if self.kind == "gradient":
            return sum(grid.N * (n - 1) // n for n in grid.dims if n >= 2)
        return self.matrix.shape[0]

    def __repr__(self):
        if self.kind == "derivative":
            return "Transform(derivative, axis=%d)" % self.axis
        return "Transform(%s)" % self.kind


def _symmetrized_gram(T):
    g = (T.T @ T).tocsr()
    return ((g + g.T) * 0.5).tocsr()


class BlockRow:
    """One row of the stacked operator: a transform plus its target slot.

    ``target`` is "u" (left block only), "v" (right block only) or "sum"
    (equal left and right blocks). The final coupling row is a "sum" row
    with the identity transform.
    """

    def __init__(self, target, op, label=""):
        if target not in ("u", "v", "sum"):
            raise ValueError("unknown block-row target %r" % target)
        self.target = target
        self.op = op.tocsr()
        self.gram = _symmetrized_gram(self.op)
        self.label = label
        self.rows = op.shape[0]

    def apply(self, u, v):
        if self.target == "u":
            return self.op @ u
        if self.target == "v":
            return self.op @ v
        return self.op @ (u + v)

    def rmatvec(self, y):
        """Transpose of the full (2N-column) block row applied to y."""
        t = self.op.T @ y
        z = np.zeros_like(t)
        if self.target == "u":
            return np.concatenate([t, z])
        if self.target == "v":
            return np.concatenate([z, t])
        return np.concatenate([t, t])


class BlockSystem:
    """Assembled block rows of the stacked operator and their Gram blocks.

    Row order is fixed: component-u rows, component-v rows, sum rows, then
    the (I, I) coupling row. Gram blocks are precomputed once so that the
    quadratic-step system matrix can be reassembled cheaply whenever the
    penalty weights change.
    """

    def __init__(self, grid, rows):
        self.grid = grid
        self.rows = rows
        self.n = grid.N

    @property
    def s(self):
        return len(self.rows)

    def apply(self, x):
        """Per-row products for a stacked vector of length 2N."""
        u, v = x[:self.n], x[self.n:]
        return [row.apply(u, v) for row in self.rows]

    def apply_row(self, i, x):
        return self.rows[i].apply(x[:self.n], x[self.n:])

    def rmatvec_row(self, i, y):
        return self.rows[i].rmatvec(y)

    def assemble_Q(self, rho):
        """Weighted Gram matrix sum over all block rows, as 2N x 2N CSR.

        Upper-left collects u rows and sum rows, lower-right v rows and sum
        rows, and the off-diagonal block the sum rows alone. Exactly
        symmetric by construction.
        """
        rho = np.asarray(rho, dtype=float)
        if rho.size != self.s:
            raise ValueError("need one rho per block row")
        if np.any(rho <= 0):
            raise ValueError("all rho must be positive")
        ul = None
        lr = None
        od = None
        for row, r in zip(self.rows, rho):
            g = row.gram * r
            if row.target == "u":
                ul = g if ul is None else ul + g
            elif row.target == "v":
                lr = g if lr is None else lr + g
            else:
                od = g if od is None else od + g
        if od is not None:
            ul = od if ul is None else ul + od
            lr = od if lr is None else lr + od
        zero = sp.csr_matrix((self.n, self.n))
        q = sp.bmat([[ul if ul is not None else zero, od],
                     [od, lr if lr is not None else zero]], format="csr")
        q.sum_duplicates()
        return q


def assemble_block_system(spec):
    """Build the stacked block system for a validated constraint collection.

    Rows follow the descriptor order: u sets, v sets, sum sets, then the
    identity coupling row that ties the components to their sum.
    """
    grid = spec.grid
    rows = []
    for desc in spec.u_sets:
        rows.append(BlockRow("u", desc.transform.realize(grid), desc.label))
    for desc in spec.v_sets:
        rows.append(BlockRow("v", desc.transform.realize(grid), desc.label))
    for desc in spec.sum_sets:
        rows.append(BlockRow("sum", desc.transform.realize(grid), desc.label))
    rows.append(BlockRow("sum", identity_operator(grid.N), "proximity"))
    return BlockSystem(grid, rows)
