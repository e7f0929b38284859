"""A space curve with the cone property that is no lambda-curve.

Five circular and straight branches glued with matching tangents. The last
point is the midpoint of the first point and the point at t = -pi/2, which
rules out the triple inequality for every lambda < 1. The cone condition on
secants still holds for some lambda0 < 1.
"""

# %%
import math

import numpy as np

from eelkit import check_lambda_cone, check_lambda_curve, example_curve_3d, find_min_lambda

c = example_curve_3d(1e-2)
print(f"{len(c)} samples on [{c.params[0]:.4f}, {c.params[-1]:.4f}]")

# %% [markdown]
# The midpoint triple: distances (2, 1, 1), so 2 <= 1 + lambda fails below 1.

# %%
idx = [int(np.argmin(np.abs(c.params - x))) for x in (-1.5 * math.pi, -0.5 * math.pi, 1 + math.pi)]
P = c.points[idx]
print("points:", np.round(P, 12).tolist())
print("d12, d13, d23 =", [round(float(np.linalg.norm(P[a] - P[b])), 12) for a, b in ((0, 1), (0, 2), (1, 2))])

# %% [markdown]
# The exhaustive check finds an even worse triple elsewhere on the curve.

# %%
rep = check_lambda_curve(c, 0.99)
print(f"lambda=0.99: passed={rep.passed}, worst margin {rep.worst_margin:.5f} at params",
      np.round(c.params[list(rep.witness)], 4))

# %% [markdown]
# The smallest lambda for which the secant cone condition holds.

# %%
lam0 = find_min_lambda(c, "lambda_cone")
print(f"lambda0 = {lam0:.6f}; cone check at lambda0: {check_lambda_cone(c, lam0).passed}")
