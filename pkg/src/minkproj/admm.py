"""Projection onto a generalized Minkowski set by relaxed ADMM splitting.

The projection problem

    min over (u, v) of 0.5 * ||u + v - m||^2
    subject to  T_i u in D_i,  T_j v in E_j,  T_k (u + v) in F_k

is split by introducing one auxiliary vector per constraint row plus one for
the proximity term, tied to the stacked variable x = (u; v) through the
block system. Each sweep then consists of

  1. a quadratic step: solve Q x = sum_i A_i^T (rho_i y_i + v_i) with
     warm-started conjugate gradients, where Q is the weighted Gram sum of
     the block rows and is rebuilt cheaply from precomputed Gram blocks
     whenever a penalty changes;
  2. per-row relaxation x_bar_i = gamma_i A_i x + (1 - gamma_i) y_i followed
     by the proximal update y_i = prox_i(x_bar_i - v_i / rho_i), which is an
     elementary projection for constraint rows and the closed form
     (m + rho a) / (1 + rho) for the proximity row;
  3. the dual ascent v_i += rho_i (y_i - x_bar_i).

Row updates are mutually independent; the quadratic step is the only serial
phase. All reductions run in a fixed order, so repeated runs are bitwise
identical.

Penalties are adapted by residual balancing: when one row's primal residual
dominates its dual counterpart tenfold its rho doubles (and vice versa
halves), within a capped range, with the dual variable rescaled to keep the
scaled dual point fixed. Adaptation freezes after a fixed iteration so the
tail of the run is a plain fixed-penalty iteration. Relaxation factors stay
on a fixed schedule in (0, 2].
"""

import time

import numpy as np

from .grid import ModelVector
from .operators import (NotPositiveDefiniteError, assemble_block_system,
                        compressed_diagonal_view)
from .sets import feasibility_distance
from .spec import validate


class ADMMOptions:
    """Tuning knobs for the projection solver.

    Defaults: 2000 iterations, 1e-4 relative primal/dual stopping, CG to
    1e-8 relative residual, unit initial penalties and relaxation, penalty
    adaptation every 10 sweeps capped at 10x and frozen after sweep 500,
    stagnation flagged after 100 sweeps without primal-residual progress.
    """

    def __init__(self, max_iters=2000, eps_primal=1e-4, eps_dual=1e-4,
                 cg_tol=1e-8, cg_max_iters=None, rho_init=1.0, gamma_init=1.0,
                 adapt_every=10, adapt_factor_cap=10.0, adapt_freeze_iter=500,
                 stagnation_window=100):
        if min(eps_primal, eps_dual, cg_tol, rho_init) <= 0:
            raise ValueError("tolerances and rho_init must be positive")
        if not 0 < gamma_init <= 2:
            raise ValueError("relaxation factor must lie in (0, 2]")
        self.max_iters = int(max_iters)
        self.eps_primal = float(eps_primal)
        self.eps_dual = float(eps_dual)
        self.cg_tol = float(cg_tol)
        self.cg_max_iters = cg_max_iters
        self.rho_init = float(rho_init)
        self.gamma_init = float(gamma_init)
        self.adapt_every = int(adapt_every)
        self.adapt_factor_cap = float(adapt_factor_cap)
        self.adapt_freeze_iter = int(adapt_freeze_iter)
        self.stagnation_window = int(stagnation_window)


class SolveReport:
    """Outcome of one projection solve."""

    def __init__(self, converged, iterations, primal_residuals, dual_residual,
                 cg_iterations, feasibility, wall_time, stagnation=False,
                 history=None):
        self.converged = converged
        self.iterations = iterations
        self.primal_residuals = primal_residuals
        self.dual_residual = dual_residual
        self.cg_iterations = cg_iterations
        self.feasibility = feasibility
        self.wall_time = wall_time
        self.stagnation = stagnation
        self.history = history if history is not None else {}

    def __repr__(self):
        return ("SolveReport(converged=%s, iterations=%d, max_primal=%.3e, "
                "dual=%.3e)" % (self.converged, self.iterations,
                                max(self.primal_residuals, default=0.0),
                                self.dual_residual))


def conjugate_gradient(Q, b, x0, tol=1e-8, max_iters=None):
    """Solve the symmetric positive-definite system Q x = b by CG.

    Warm-started at ``x0``; stops when the residual drops below ``tol``
    times the right-hand-side norm. Residual smoothing keeps the reported
    residual history non-increasing and never worse than plain CG. Negative
    curvature aborts with :class:`NotPositiveDefiniteError`.

    Returns (x, iterations, residual_history).
    """
    b = np.asarray(b, dtype=float)
    x = np.array(x0, dtype=float)
    if max_iters is None:
        max_iters = 2 * b.size
    r = b - Q @ x
    xs = x.copy()
    rs = r.copy()
    history = [float(np.linalg.norm(rs))]
    target = tol * max(float(np.linalg.norm(b)), np.finfo(float).tiny)
    if history[0] <= target:
        return xs, 0, history
    p = r.copy()
    rr = float(r @ r)
    for k in range(1, max_iters + 1):
        qp = Q @ p
        curvature = float(p @ qp)
        if curvature <= 0.0:
            raise NotPositiveDefiniteError(
                "encountered non-positive curvature: the quadratic-step matrix "
                "is not positive definite; make sure both components carry an "
                "identity-transform bound constraint so the stacked operator "
                "has full column rank")
        alpha = rr / curvature
        x += alpha * p
        r -= alpha * qp
        # minimal-residual smoothing of the iterate actually returned
        d = r - rs
        dd = float(d @ d)
        if dd > 0.0:
            eta = min(1.0, max(0.0, -float(rs @ d) / dd))
            xs += eta * (x - xs)
            rs += eta * d
        history.append(float(np.linalg.norm(rs)))
        if history[-1] <= target:
            return xs, k, history
        rr_new = float(r @ r)
        p = r + (rr_new / rr) * p
        rr = rr_new
    return xs, max_iters, history


class ADMMState:
    """Mutable solver state: iterates, penalties and the assembled system.

    One state instance belongs to one solve; concurrent solves need
    separate instances.
    """

    def __init__(self, m, spec, opts):
        self.opts = opts
        self.spec = spec
        self.m = np.asarray(m, dtype=float).ravel()
        self.system = assemble_block_system(spec)
        n = self.system.n
        s = self.system.s
        self.x = np.concatenate([self.m, np.zeros(n)])   # u = m, v = 0
        self.y = self.system.apply(self.x)
        self.duals = [np.zeros(row.rows) for row in self.system.rows]
        self.rho = np.full(s, opts.rho_init)
        self.gamma = np.full(s, opts.gamma_init)
        self.iteration = 0
        self.cg_iterations = 0
        self.primal_residuals = np.zeros(s)
        self.dual_residual = np.inf
        self.primal_norms = np.zeros(s)        # raw, for balancing
        self.dual_norms = np.zeros(s)
        self.adapt_reference = None            # residuals at the last adaptation
        self.history = {"max_primal": [], "dual": [], "cg_iters": []}
        self._projectors = self._build_projectors(spec)
        self._refresh_Q()

    def _build_projectors(self, spec):
        projectors = [d.set.project for d in spec.descriptors]
        m = self.m

        def proximity_prox(a):
            r = self.rho[-1]
            return (m + r * a) / (1.0 + r)

        return projectors + [proximity_prox]

    def _refresh_Q(self):
        self.Q = self.system.assemble_Q(self.rho)
        stride = self.system.n // self.spec.grid.dims[-1]
        dia = compressed_diagonal_view(self.Q, band_limit=2 * stride + 1)
        self.Q_apply = dia if dia is not None else self.Q

    def rhs(self):
        """Right-hand side of the quadratic step, summed in fixed row order."""
        out = np.zeros_like(self.x)
        for i in range(self.system.s):
            out += self.system.rmatvec_row(i, self.rho[i] * self.y[i] +
                                           self.duals[i])
        return out


def x_update(state):
    """Quadratic step: warm-started CG on the current system matrix.

    Returns the number of CG iterations spent.
    """
    opts = state.opts
    x, iters, history = conjugate_gradient(
        state.Q_apply, state.rhs(), state.x, tol=opts.cg_tol,
        max_iters=opts.cg_max_iters)
    state.x = x
    state.cg_iterations += iters
    state.last_cg_history = history
    return iters


def relax_prox_dual_update(state):
    """Per-row relaxation, proximal map and dual ascent.

    Rows are independent; they are processed in order so that repeated runs
    are reproducible. Also records the per-row primal residuals and the raw
    norms used for penalty balancing.
    """
    sysm = state.system
    dual_vec = np.zeros_like(state.x)
    denom_sq = 0.0
    for i in range(sysm.s):
        ax = sysm.apply_row(i, state.x)
        g = state.gamma[i]
        xbar = g * ax + (1.0 - g) * state.y[i]
        a = xbar - state.duals[i] / state.rho[i]
        y_new = state._projectors[i](a)
        state.duals[i] = state.duals[i] + state.rho[i] * (y_new - xbar)
        adj_diff = sysm.rmatvec_row(i, y_new - state.y[i])
        dual_vec += state.rho[i] * adj_diff
        adj_dual = sysm.rmatvec_row(i, state.duals[i])
        denom_sq += float(adj_dual @ adj_dual)
        state.y[i] = y_new
        prim = float(np.linalg.norm(y_new - ax))
        state.primal_norms[i] = prim
        state.dual_norms[i] = state.rho[i] * float(np.linalg.norm(adj_diff))
        state.primal_residuals[i] = prim / max(
            float(np.linalg.norm(y_new)), float(np.linalg.norm(ax)), 1.0)
    state.dual_residual = float(np.linalg.norm(dual_vec)) / max(
        np.sqrt(denom_sq), 1.0)


def adapt_parameters(state):
    """Residual balancing of the per-row penalties.

    A row whose primal residual dominates its dual contribution tenfold gets
    its penalty doubled (capped); the opposite imbalance halves it
    (floored). A row whose relative primal residual sits above the stopping
    tolerance without having decreased since the previous adaptation also
    gets doubled: oscillation like that is how an under-penalized
    non-convex row shows up. Dual variables are rescaled so the scaled dual
    point is unchanged, and the system matrix is reassembled from the
    precomputed Gram blocks. Relaxation factors stay on their fixed
    schedule.
    """
    opts = state.opts
    cap_hi = opts.adapt_factor_cap * opts.rho_init
    cap_lo = opts.rho_init / opts.adapt_factor_cap
    reference = state.adapt_reference
    state.adapt_reference = state.primal_residuals.copy()
    changed = False
    for i in range(state.system.s):
        prim, dual = state.primal_norms[i], state.dual_norms[i]
        rho_old = state.rho[i]
        stalled = (reference is not None
                   and state.primal_residuals[i] > opts.eps_primal
                   and state.primal_residuals[i] > 0.99 * reference[i])
        if prim > 10.0 * dual or stalled:
            rho_new = min(rho_old * 2.0, cap_hi)
        elif dual > 10.0 * prim:
            rho_new = max(rho_old / 2.0, cap_lo)
        else:
            continue
        if rho_new != rho_old:
            state.rho[i] = rho_new
            state.duals[i] *= rho_new / rho_old
            changed = True
    if changed:
        state._refresh_Q()
    return changed


def admm_project(m, spec, opts=None):
    """Project a model onto the generalized Minkowski set of a spec.

    Parameters
    ----------
    m : ModelVector or array of length grid.N
        Point to project.
    spec : MinkowskiSpec
        Constraint collection; validated here if not already.
    opts : ADMMOptions, optional

    Returns
    -------
    (w, u, v, report) : the projected model w = u + v (exact sum of the
    returned components), the two components, and a :class:`SolveReport`.
    Non-convergence within the iteration budget is reported, not raised;
    a long stretch without primal-residual progress sets the stagnation
    flag, which usually points at an empty intersection.
    """
    if opts is None:
        opts = ADMMOptions()
    if not getattr(spec, "validated", False):
        validate(spec)
    grid = spec.grid
    if isinstance(m, ModelVector):
        if m.grid != grid:
            raise ValueError("model grid does not match the constraint grid")
        m = m.data
    t0 = time.perf_counter()
    state = ADMMState(m, spec, opts)
    converged = False
    best_primal = np.inf
    best_primal_iter = 0
    for it in range(1, opts.max_iters + 1):
        state.iteration = it
        cg_iters = x_update(state)
        relax_prox_dual_update(state)
        max_primal = float(np.max(state.primal_residuals))
        state.history["max_primal"].append(max_primal)
        state.history["dual"].append(state.dual_residual)
        state.history["cg_iters"].append(cg_iters)
        if max_primal <= opts.eps_primal and state.dual_residual <= opts.eps_dual:
            converged = True
            break
        if max_primal < best_primal * (1.0 - 1e-12):
            best_primal = max_primal
            best_primal_iter = it
        if it % opts.adapt_every == 0 and it <= opts.adapt_freeze_iter:
            adapt_parameters(state)
    # the run ended in a stall if the best primal residual is old news
    stagnation = (not converged and
                  state.iteration - best_primal_iter >= opts.stagnation_window)
    n = grid.N
    u = ModelVector(grid, state.x[:n].copy())
    v = ModelVector(grid, state.x[n:].copy())
    w = ModelVector(grid, u.data + v.data)
    feas = {}
    for i, desc in enumerate(spec.descriptors):
        vec = {"u": u.data, "v": v.data, "sum": w.data}[desc.target]
        op = None if desc.transform.kind == "identity" \
            else state.system.rows[i].op
        feas[desc.label] = feasibility_distance(vec, desc.set, op)
    report = SolveReport(
        converged=converged, iterations=state.iteration,
        primal_residuals=list(state.primal_residuals),
        dual_residual=state.dual_residual,
        cg_iterations=state.cg_iterations, feasibility=feas,
        wall_time=time.perf_counter() - t0, stagnation=stagnation,
        history=state.history)
    return w, u, v, report
