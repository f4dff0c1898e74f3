"""Linear inverse problems as projections with a data-fit constraint.

For a cheap linear forward operator G and observed data d, inversion is
posed as projecting an initial guess onto the intersection of the model
constraint set with a data-fit set: either per-entry bounds on the residual
G m - d, or a norm annulus sigma_l <= ||G m - d||_2 <= sigma_u. The annulus
with a positive inner radius is non-convex on purpose: the hole keeps the
solution from fitting the noise.

The data-fit set rides along as one extra constraint on the sum of the
components, so the projection machinery is reused unchanged.
"""

import numpy as np
import scipy.sparse as sp

from .admm import admm_project
from .operators import Transform
from .sets import l2_annulus, pointwise_datafit
from .spec import MinkowskiSpec, SetDescriptor, validate


class DataFitConstraint:
    """A forward operator, observations, and a fit set.

    ``kind`` is "pointwise" with per-entry bounds (lower, upper) on the
    residual, or "l2_annulus" with scalar (sigma_lower, sigma_upper) bounds
    on the residual norm.
    """

    def __init__(self, G, d_obs, kind="pointwise", lower=None, upper=None,
                 sigma_lower=None, sigma_upper=None):
        self.G = sp.csr_matrix(G)
        self.d_obs = np.asarray(d_obs, dtype=float).ravel()
        if self.G.shape[0] != self.d_obs.size:
            raise ValueError("operator has %d rows but data has %d entries"
                             % (self.G.shape[0], self.d_obs.size))
        if kind == "pointwise":
            if lower is None or upper is None:
                raise ValueError("pointwise data fit needs lower and upper")
            self.fit_set = pointwise_datafit(self.d_obs, lower, upper)
        elif kind == "l2_annulus":
            if sigma_upper is None:
                raise ValueError("annulus data fit needs sigma_upper")
            self.fit_set = l2_annulus(0.0 if sigma_lower is None else sigma_lower,
                                      sigma_upper, center=self.d_obs)
        else:
            raise ValueError("unknown data-fit kind %r" % kind)
        self.kind = kind

    def descriptor(self):
        return SetDescriptor("sum", Transform.from_matrix(self.G),
                             self.fit_set, label="datafit:%s" % self.kind)


def with_datafit(spec, dfc):
    """A new spec with the data-fit constraint appended to the sum sets."""
    extended = MinkowskiSpec(spec.grid, spec.descriptors + [dfc.descriptor()])
    return validate(extended)


def project_with_datafit(m, spec, dfc, opts=None):
    """Project an initial guess onto (model constraints) AND (data fit).

    With ``dfc`` None this is exactly a plain projection onto the model
    constraint set. An empty intersection (data inconsistent with the
    constraints) shows up as solver stagnation in the report.

    Returns (x, u, v, report) with x = u + v the recovered model.
    """
    if dfc is None:
        return admm_project(m, spec, opts)
    return admm_project(m, with_datafit(spec, dfc), opts)
