"""Universal length bound for lambda-curves with ``lambda < 1/d``.

Project the initial part of the curve on every direction of an eta-net and
add up the widths of the projections. That total never decreases, grows by at
least ``eta`` times every displacement of the curve, and cannot exceed
``(#net) * diam``, so the length is at most ``(#net) * diam / eta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .checks import CheckReport, check_lambda_curve
from .config import DEFAULT_TOL, DomainError, PreconditionError
from .curve import SampledCurve, diameter, polyline_length
from .geometry import SphereNet, build_sphere_net

__all__ = [
    "RepulsionConstants",
    "repulsion_constants",
    "length_bound",
    "WidthProfile",
    "width_profile",
    "IncrementReport",
    "check_width_increments",
    "LengthBoundReport",
    "verify_length_bound",
    "widths_to_csv",
    "write_widths_csv",
]


@dataclass(frozen=True)
class RepulsionConstants:
    delta: float
    rho: float
    eta: float
    lam: float
    d: int


def repulsion_constants(lam: float, d: int) -> RepulsionConstants:
    """``delta = sqrt(2(1 - lam))``, ``rho = delta/2``, ``eta = rho/3``; needs ``-1 <= lam < 1/d``."""
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    if not -1.0 <= lam < 1.0 / d:
        raise DomainError(f"the length bound needs -1 <= lambda < 1/d = {1.0 / d:.6g}, got {lam}")
    delta = math.sqrt(2.0 * (1.0 - lam))
    rho = delta / 2.0
    return RepulsionConstants(delta, rho, rho / 3.0, float(lam), int(d))


def length_bound(lam: float, d: int, diam: float) -> float:
    """``(#net) * diam / eta`` for the eta-net built at ``eta = repulsion_constants(lam, d).eta``."""
    if not diam > 0:
        raise DomainError(f"diameter must be positive, got {diam}")
    k = repulsion_constants(lam, d)
    net = build_sphere_net(d, k.eta)
    return len(net) * diam / k.eta


@dataclass(frozen=True)
class WidthProfile:
    params: np.ndarray
    net: SphereNet
    per_direction_widths: np.ndarray  # (samples, #net)
    total: np.ndarray  # (samples,)


def width_profile(c: SampledCurve, net: SphereNet) -> WidthProfile:
    """``W_i(t_j)`` = spread of ``<xi_i, p_k>`` over ``k <= j``.

    The spread (max minus min) is the length of the interval hull of the
    projected initial part; for a sampled continuous curve this is the
    measure of the projection itself.
    """
    if net.dim != c.dim:
        raise DomainError(f"net dimension {net.dim} does not match curve dimension {c.dim}")
    proj = c.points @ net.directions.T
    W = np.maximum.accumulate(proj, axis=0) - np.minimum.accumulate(proj, axis=0)
    return WidthProfile(c.params, net, W, W.sum(axis=1))


@dataclass(frozen=True)
class IncrementReport:
    passed: bool
    worst_margin: float
    witness: tuple[int, int]
    eta: float
    tol: float


def check_width_increments(c: SampledCurve, profile: WidthProfile, eta: float | None = None,
                           tol: float = DEFAULT_TOL) -> IncrementReport:
    """``W_F(t_k) - W_F(t_j) >= eta ||p_k - p_j||`` for all ``j < k``.

    Margin of a pair is ``W_F(t_k) - W_F(t_j) - eta ||p_k - p_j||``; ``eta``
    defaults to the net's own.
    """
    eta = profile.net.eta if eta is None else float(eta)
    P = c.points
    F = profile.total
    best, wit = math.inf, (0, 0)
    for j in range(len(c) - 1):
        marg = F[j + 1 :] - F[j] - eta * np.linalg.norm(P[j + 1 :] - P[j], axis=1)
        k = int(np.argmin(marg))
        if marg[k] < best:
            best, wit = float(marg[k]), (j, j + 1 + k)
    return IncrementReport(bool(best >= -tol), best, wit, eta, tol)


@dataclass(frozen=True)
class LengthBoundReport:
    length: float
    bound: float
    diameter: float
    net_size: int
    eta: float
    lam: float
    d: int

    @property
    def slack(self) -> float:
        return self.bound - self.length

    @property
    def passed(self) -> bool:
        return self.length <= self.bound

    def to_dict(self) -> dict:
        return {
            "lambda": self.lam,
            "d": self.d,
            "length": self.length,
            "bound": self.bound,
            "slack": self.slack,
            "diameter": self.diameter,
            "net_size": self.net_size,
            "eta": self.eta,
            "passed": self.passed,
        }


def verify_length_bound(c: SampledCurve, lam: float, d: int | None = None, tol: float = DEFAULT_TOL,
                        workers: int = 1, precheck: bool = True) -> LengthBoundReport:
    """Compare the polyline length with the universal bound at the measured diameter.

    Refuses with :class:`PreconditionError` (carrying the failing
    :class:`CheckReport`) unless the curve passes ``check_lambda_curve`` at
    ``lam``. ``precheck=False`` skips that cubic-cost test for callers who
    have already run it.
    """
    d = c.dim if d is None else int(d)
    if d != c.dim:
        raise DomainError(f"dimension {d} does not match curve dimension {c.dim}")
    k = repulsion_constants(lam, d)
    if precheck:
        report: CheckReport = check_lambda_curve(c, lam, tol, workers=workers)
        if not report.passed:
            raise PreconditionError(
                f"curve is not a lambda-curve at lambda={lam} (worst margin {report.worst_margin:.3g} "
                f"at {report.witness})",
                diagnostic=report,
            )
    diam = diameter(c.points)
    net = build_sphere_net(d, k.eta)
    bound = len(net) * diam / k.eta
    return LengthBoundReport(polyline_length(c), bound, diam, len(net), k.eta, float(lam), d)


def widths_to_csv(profile: WidthProfile) -> str:
    n = profile.per_direction_widths.shape[1]
    header = ",".join(["t"] + [f"W_{i + 1}" for i in range(n)] + ["W_F"])
    rows = [header]
    for t, W, F in zip(profile.params, profile.per_direction_widths, profile.total):
        rows.append(",".join(format(float(x), ".17g") for x in (t, *W, F)))
    return "\n".join(rows) + "\n"


def write_widths_csv(profile: WidthProfile, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(widths_to_csv(profile))
    return path
