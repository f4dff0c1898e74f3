"""File formats: binary grids, text sparse operators, PGM dumps, reports.

Grid files ("GMSK"): 4 magic bytes, little-endian u32 axis count, one u32
extent per axis, then N little-endian f64 values in vectorization order
(first axis fastest). Sparse operators are plain text: a header line
"rows cols nnz" followed by one "row col value" triple per line, 0-based.
Both formats round-trip bit-exactly.
"""

import csv

import numpy as np
import scipy.sparse as sp

from .grid import ModelGrid, ModelVector

GRID_MAGIC = b"GMSK"


def write_grid(path, m):
    """Write a ModelVector to a binary grid file."""
    with open(path, "wb") as fh:
        fh.write(GRID_MAGIC)
        fh.write(np.uint32(len(m.grid.dims)).tobytes())
        fh.write(np.asarray(m.grid.dims, dtype="<u4").tobytes())
        fh.write(np.asarray(m.data, dtype="<f8").tobytes())


def read_grid(path):
    """Read a binary grid file back into a ModelVector."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != GRID_MAGIC:
            raise ValueError("%s: bad magic %r, not a grid file" % (path, magic))
        ndims = int(np.frombuffer(fh.read(4), dtype="<u4")[0])
        if ndims not in (2, 3):
            raise ValueError("%s: unsupported axis count %d" % (path, ndims))
        dims = np.frombuffer(fh.read(4 * ndims), dtype="<u4").astype(int)
        grid = ModelGrid(dims)
        data = np.frombuffer(fh.read(8 * grid.N), dtype="<f8")
        if data.size != grid.N:
            raise ValueError("%s: truncated file" % path)
        if fh.read(1):
            raise ValueError("%s: trailing bytes after grid data" % path)
    return ModelVector(grid, data.copy())


def write_sparse_operator(path, A):
    """Write a sparse matrix as header + coordinate triples."""
    coo = sp.coo_matrix(A)
    coo.sum_duplicates()
    coo.eliminate_zeros()
    with open(path, "w") as fh:
        fh.write("%d %d %d\n" % (coo.shape[0], coo.shape[1], coo.nnz))
        for r, c, v in zip(coo.row, coo.col, coo.data):
            fh.write("%d %d %.17g\n" % (r, c, v))


def read_sparse_operator(path):
    """Read a coordinate-triple operator file into CSR."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise ValueError("%s: header must be 'rows cols nnz'" % path)
        rows, cols, nnz = (int(v) for v in header)
        ri = np.empty(nnz, dtype=int)
        ci = np.empty(nnz, dtype=int)
        vals = np.empty(nnz)
        for k in range(nnz):
            parts = fh.readline().split()
            if len(parts) != 3:
                raise ValueError("%s: bad triple on entry %d" % (path, k))
            ri[k], ci[k], vals[k] = int(parts[0]), int(parts[1]), float(parts[2])
    if nnz and (ri.max() >= rows or ci.max() >= cols or ri.min() < 0
                or ci.min() < 0):
        raise ValueError("%s: index outside the declared shape" % path)
    out = sp.csr_matrix((vals, (ri, ci)), shape=(rows, cols))
    out.eliminate_zeros()
    out.sort_indices()
    return out


def write_pgm(path, image, lo=None, hi=None):
    """Write a 2D array as a binary 8-bit PGM image.

    Values are scaled linearly from [lo, hi] (data range by default) to
    0..255; a constant image maps to 0.
    """
    image = np.asarray(image, dtype=float)
    if image.ndim != 2:
        raise ValueError("PGM dump needs a 2D array")
    lo = image.min() if lo is None else lo
    hi = image.max() if hi is None else hi
    span = hi - lo
    scaled = np.zeros_like(image) if span <= 0 else (image - lo) / span * 255.0
    pixels = np.clip(np.round(scaled), 0, 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (image.shape[1], image.shape[0]))
        fh.write(pixels.tobytes())


def write_report(path, report, extra=None):
    """Write a solve report as deterministic key-value text.

    Wall time is intentionally left out so identical runs produce identical
    files; timing is printed to the console instead.
    """
    lines = [
        "converged %s" % str(report.converged).lower(),
        "iterations %d" % report.iterations,
        "dual_residual %.17g" % report.dual_residual,
        "max_primal_residual %.17g" % max(report.primal_residuals, default=0.0),
        "cg_iterations %d" % report.cg_iterations,
        "stagnation %s" % str(report.stagnation).lower(),
    ]
    for label, dist in report.feasibility.items():
        lines.append("feasibility %s %.17g" % (label.replace(" ", "_"), dist))
    if extra:
        for key, value in extra.items():
            lines.append("%s %s" % (key, value))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_residual_csv(path, history):
    """Residual histories as CSV with one row per sweep."""
    keys = [k for k in ("max_primal", "dual", "cg_iters") if k in history]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration"] + keys)
        n = max((len(history[k]) for k in keys), default=0)
        for i in range(n):
            writer.writerow([i + 1] + ["%.17g" % history[k][i] for k in keys])


def write_history_csv(path, history):
    """Outer-solver history (f, step norm, gamma, alpha) as CSV."""
    keys = [k for k in ("f", "step_norm", "gamma", "alpha") if k in history]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration"] + keys)
        n = max((len(history[k]) for k in keys), default=0)
        for i in range(n):
            writer.writerow([i + 1] + ["%.17g" % history[k][i] for k in keys])
