"""Project a velocity-style model onto a two-component constraint set.

The model is the sum of a fixed background (2500 m/s) and a nonpositive
anomaly no deeper than -150 m/s. On top of that, the summed model must stay
inside physical bounds and keep a small anisotropic total variation. The
projection finds the nearest model satisfying all of it at once, and hands
back the two components separately.
"""

import numpy as np

import minkproj as mp

# a 30 x 40 grid with a smooth bump that violates the constraints
grid = mp.ModelGrid((30, 40))
zz, xx = np.meshgrid(np.linspace(-1, 1, 30), np.linspace(-1, 1, 40),
                     indexing="ij")
bump = 2500.0 - 220.0 * np.exp(-4.0 * (zz ** 2 + xx ** 2))
m = mp.vectorize(grid, bump)

# its anisotropic total variation is far above what we allow
tv = float(np.abs(mp.build_gradient(grid) @ m.data).sum())
budget = 0.3 * tv
print("model TV %.0f, allowed %.0f" % (tv, budget))

spec = mp.validate(mp.MinkowskiSpec(grid, [
    mp.SetDescriptor("u", None, mp.box(-150.0, 0.0), label="anomaly-bounds"),
    mp.SetDescriptor("v", None, mp.fixed(2500.0), label="background"),
    mp.SetDescriptor("sum", None, mp.box(2350.0, 2550.0), label="sum-bounds"),
    mp.SetDescriptor("sum", mp.Transform.gradient(), mp.l1_ball(budget),
                     label="sum-tv"),
]))

w, u, v, report = mp.admm_project(m, spec)
print("converged:", report.converged, "after", report.iterations, "sweeps,",
      report.cg_iterations, "CG iterations total")
print("distance moved: %.1f" % np.linalg.norm(w.data - m.data))
print("anomaly range: [%.1f, %.1f]" % (u.data.min(), u.data.max()))
print("output TV: %.0f (budget %.0f)"
      % (np.abs(mp.build_gradient(grid) @ w.data).sum(), budget))
for label, dist in report.feasibility.items():
    print("  feasibility %-16s %.2e" % (label, dist))
