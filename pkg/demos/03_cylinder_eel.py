"""Long eels in short cylinders.

Nested spirals of radii r/N^k, each making N^k turns, alternate downward
and upward and are joined by radial segments on the floor and the lid. The
curve stays inside a cylinder of height 2 pi mu r yet has length above 1.
The infinite eel stacks such blocks in shrinking cylinders along the z-axis;
its length is exact from the plan, but sampling it is out of reach.
"""

# %%
import math
import time

from eelkit import EelParams, SampleBudgetError, check_lambda_cone, cylinder_eel, plan_infinite_eel, polyline_length

params = EelParams.derive()
print(params.to_dict())

# %%
c = cylinder_eel(1.0, 0.0, 3, params, step=1e-2)
print(f"{len(c)} samples, length {polyline_length(c):.4f}")
print("start", c.points[0].round(6).tolist(), "end", c.points[-1].round(6).tolist())

# %% [markdown]
# Secant cone condition at 1/sqrt 5 (about nine seconds on one core).

# %%
t0 = time.perf_counter()
rep = check_lambda_cone(c, 1 / math.sqrt(5), tol=1e-6)
print(f"passed={rep.passed}, margin {rep.worst_margin:.4f}, {time.perf_counter() - t0:.1f}s")

# %% [markdown]
# The infinite eel, stage by stage. Lengths add up past k after k stages and
# the curve never leaves the unit ball; the sample count explodes because
# the innermost spiral of stage s has radius about 8^-(n_s - 1).

# %%
plan = plan_infinite_eel(5, params, step=1e-2)
for s in plan.meta["stage_info"]:
    print(f"stage {s['stage']}: r={s['r']:.5f}, spirals={s['loops_n']}, innermost radius=10^{s['innermost_radius_log10']:.1f}")
print("stage lengths", {k: round(v, 4) for k, v in plan.stage_lengths().items()})
print(f"total length {plan.length:.4f}, max norm {plan.max_norm():.4f}")
try:
    plan.sample()
except SampleBudgetError as exc:
    print("sampling refused:", exc)
