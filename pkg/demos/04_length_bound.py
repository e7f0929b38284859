"""Length bound for lambda-curves with lambda < 1/d.

The total width of the projections on an eta-net never decreases and grows
by at least eta times each displacement; it is also capped by
(#net) * diameter. So length <= (#net) * diameter / eta.
"""

# %%
import math

import numpy as np

from eelkit import build_sphere_net, find_min_lambda, gradient_descent_trajectory, helix, reverse
from eelkit.rectifiability import check_width_increments, length_bound, repulsion_constants, verify_length_bound, width_profile

for lam, d in ((0.0, 2), (-1.0, 3), (0.3, 3)):
    k = repulsion_constants(lam, d)
    print(f"lambda={lam:5.2f} d={d}: eta={k.eta:.4f}, bound per unit diameter {length_bound(lam, d, 1.0):.2f}")

# %% [markdown]
# A self-expanded helix (a 0-curve) over one turn.

# %%
c = helix(1.0, None, 0.0, 2 * math.pi, 1e-2)
rep = verify_length_bound(c, 0.0)
print(rep.to_dict())

# %% [markdown]
# A reversed gradient-descent path is self-expanded; its best lambda is
# often negative, which tightens the bound.

# %%
Q = np.array([[1.0, 0.3], [0.3, 4.0]])
g = reverse(gradient_descent_trajectory(Q, [1.0, 1.0], 0.02, 120))
lam = find_min_lambda(g, "lambda_curve", tol=0.0)
rep = verify_length_bound(g, lam)
print(f"lambda*={lam:.4f}: length {rep.length:.4f} <= bound {rep.bound:.2f}")
k = repulsion_constants(lam, 2)
inc = check_width_increments(g, width_profile(g, build_sphere_net(2, k.eta)))
print(f"width increments: passed={inc.passed}, worst margin {inc.worst_margin:.3g}")
