"""Planar eels: reversed gradient descent and logarithmic spirals.

In the plane every eel with lambda < 1 is expected to have finite length.
On finite data this shows up as two things: the secant at each sample
avoids the whole cone of past directions, and the length settles as the
sampling is refined.
"""

# %%
import math

import numpy as np

from eelkit import (
    SampledCurve,
    check_conical_split,
    check_lambda_cone,
    find_min_lambda,
    gradient_descent_trajectory,
    polyline_length,
    reverse,
)


def log_spiral(b, h, turns=3.0):
    th = np.arange(0.0, 2 * math.pi * turns + 1e-12, h)
    r = np.exp(b * th)
    return SampledCurve(th, np.column_stack([r * np.cos(th), r * np.sin(th)]))


# %%
Q = np.array([[1.0, 0.4], [0.4, 6.0]])
s = 0.05 / np.linalg.eigvalsh(Q)[-1]
for name, coarse, fine in (
    ("reversed GD", reverse(gradient_descent_trajectory(Q, [1.0, 1.0], s, 1500)),
     reverse(gradient_descent_trajectory(Q, [1.0, 1.0], s / 2, 3000))),
    ("log spiral b=0.5", log_spiral(0.5, 1e-2), log_spiral(0.5, 5e-3)),
):
    lam = find_min_lambda(coarse, "lambda_cone")
    split = check_conical_split(coarse, lam)
    ratio = polyline_length(coarse) / polyline_length(fine)
    print(f"{name}: lambda={lam:.4f}, cone={check_lambda_cone(coarse, lam).passed}, "
          f"split={split.passed}, length ratio step/step-half {ratio:.5f}")
