"""Declarative description of a generalized Minkowski constraint set.

A :class:`MinkowskiSpec` collects constraints on two additive model
components and on their sum: the feasible models are

    { m = u + v :  T_i u in D_i,  T_j v in E_j,  T_k (u + v) in F_k }

for elementary sets D/E/F behind optional linear transforms. The collection
is convex exactly when every elementary set is convex; in that case the
whole set is convex as the intersection of a sum of convex sets with convex
sets on the sum.

Descriptor order is preserved into block-row order (u sets, then v sets,
then sum sets, then the coupling row), so solver traces are reproducible.
"""

import numpy as np

from .operators import Transform
from .sets import feasibility_distance


class SpecValidationError(ValueError):
    """Raised with every violation found, not just the first."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid constraint spec:\n" +
                         "\n".join("  - " + p for p in self.problems))


class SetDescriptor:
    """One constraint: a target slot, a transform and an elementary set."""

    def __init__(self, target, transform, eset, label=""):
        if target not in ("u", "v", "sum"):
            raise ValueError("target must be 'u', 'v' or 'sum', got %r" % target)
        if transform is None:
            transform = Transform.identity()
        self.target = target
        self.transform = transform
        self.set = eset
        self.label = label or "%s:%s" % (target, eset.kind)

    def __repr__(self):
        return "SetDescriptor(%s, %r, %s)" % (self.target, self.transform,
                                              self.set.kind)


class MinkowskiSpec:
    """Validated collection of constraints on u, v and their sum.

    ``p``, ``q``, ``r`` count the u, v and sum constraints; the block system
    has ``s = p + q + r + 1`` rows including the coupling row.
    """

    def __init__(self, grid, descriptors):
        self.grid = grid
        self.u_sets = [d for d in descriptors if d.target == "u"]
        self.v_sets = [d for d in descriptors if d.target == "v"]
        self.sum_sets = [d for d in descriptors if d.target == "sum"]
        self.validated = False

    @property
    def p(self):
        return len(self.u_sets)

    @property
    def q(self):
        return len(self.v_sets)

    @property
    def r(self):
        return len(self.sum_sets)

    @property
    def s(self):
        return self.p + self.q + self.r + 1

    @property
    def descriptors(self):
        """All descriptors in block-row order (without the coupling row)."""
        return self.u_sets + self.v_sets + self.sum_sets

    @property
    def all_convex(self):
        return all(d.set.convex for d in self.descriptors)

    def __repr__(self):
        return "MinkowskiSpec(p=%d, q=%d, r=%d)" % (self.p, self.q, self.r)


def _has_identity_bound(descs):
    return any(d.transform.kind == "identity" and d.set.kind in ("box", "fixed")
               for d in descs)


def validate(spec):
    """Check a spec and return it, or raise with all violations at once.

    Each component must carry at least one identity-transform bound (box or
    fixed) set; that keeps the stacked operator at full column rank, which
    the quadratic step of the projection solver relies on. Every
    transform/set pair must agree on dimensions.
    """
    problems = []
    if spec.p == 0:
        problems.append("component u unconstrained: need at least one u set")
    elif not _has_identity_bound(spec.u_sets):
        problems.append("component u needs an identity-transform box or fixed set")
    if spec.q == 0:
        problems.append("component v unconstrained: need at least one v set")
    elif not _has_identity_bound(spec.v_sets):
        problems.append("component v needs an identity-transform box or fixed set")
    for desc in spec.descriptors:
        try:
            out_dim = desc.transform.output_dim(spec.grid)
        except ValueError as exc:
            problems.append("%s: %s" % (desc.label, exc))
            continue
        if desc.set.dim is not None and desc.set.dim != out_dim:
            problems.append("%s: transform outputs %d values but the set wants %d"
                            % (desc.label, out_dim, desc.set.dim))
    if problems:
        raise SpecValidationError(problems)
    spec.validated = True
    return spec


def is_member(spec, u, v, tol=1e-4):
    """Membership test for a candidate decomposition (u, v).

    Returns (ok, distances): ok is True when every normalized feasibility
    distance is at most ``tol``; distances maps descriptor labels to their
    distances (u against u sets, v against v sets, u + v against sum sets).
    """
    u = np.asarray(u, dtype=float).ravel()
    v = np.asarray(v, dtype=float).ravel()
    distances = {}
    for desc in spec.descriptors:
        if desc.target == "u":
            vec = u
        elif desc.target == "v":
            vec = v
        else:
            vec = u + v
        op = None if desc.transform.kind == "identity" \
            else desc.transform.realize(spec.grid)
        distances[desc.label] = feasibility_distance(vec, desc.set, op)
    ok = all(d <= tol for d in distances.values())
    return ok, distances


def sample_element(spec, seed_vector, opts=None):
    """Draw an element of the set by projecting a seed vector onto it.

    Useful for building intuition about what lives in a Minkowski-sum
    constraint: project reference models or random vectors and inspect the
    returned components.
    """
    from .admm import admm_project
    from .grid import ModelVector

    if not isinstance(seed_vector, ModelVector):
        seed_vector = ModelVector(spec.grid, seed_vector)
    w, u, v, report = admm_project(seed_vector, spec, opts)
    return u, v, report
