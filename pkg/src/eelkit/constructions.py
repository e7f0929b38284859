"""Explicit curves and the constants (mu, N, M, lambda) that make them eels.

The spiral ``t -> (r cos t, r sin t, mu r t)`` is self-expanded once
``mu**2`` dominates ``sup_{t<0} -sin(t)/t``. Nesting such spirals in
cylinders of radii ``r / N**(n-k)`` and joining them with radial segments
gives long eels in a short cylinder; stacking those in cylinders that shrink
geometrically towards the origin gives a bounded eel of unbounded length.

The nested construction multiplies the loop count by ``N`` per inner
cylinder, so sample counts explode quickly. Every eel is first described by
an exact :class:`EelPlan` (analytic length, extent, sample count) and only
sampled when the plan fits the sample budget.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .config import DEFAULT_MAX_SAMPLES, DEFAULT_STEP, DomainError, PreconditionError
from .curve import SampledCurve, concatenate

__all__ = [
    "LAMBDA_EEL",
    "LEMMAS",
    "EelParams",
    "CylinderSpec",
    "SampleBudgetError",
    "EelPiece",
    "EelPlan",
    "helix_sup",
    "derive_mu",
    "derive_N",
    "derive_M",
    "helix",
    "plan_cylinder_eel",
    "plan_infinite_eel",
    "cylinder_eel",
    "infinite_eel",
    "example_curve_3d",
    "lambda_from_norm_equivalence",
    "gradient_descent_trajectory",
    "CertificationRecord",
    "certify_lemma",
]

LAMBDA_EEL = 1.0 / math.sqrt(5.0)
LEMMAS = ("helix_self_expanded", "z_axis", "small_cylinder", "radial_segment", "big_cylinder")


class SampleBudgetError(RuntimeError):
    """Sampling a plan would exceed the sample budget."""

    def __init__(self, message: str, plan: "EelPlan | None" = None):
        super().__init__(message)
        self.plan = plan


# ---------------------------------------------------------------------------
# constants


def _neg_sinc(t):
    return -np.sin(t) / t


def helix_sup(t_lo: float = -20.0) -> tuple[float, float]:
    """``(sup, argmax)`` of ``-sin(t)/t`` over ``t in (t_lo, 0)``.

    A grid locates the best bump, bounded Brent refinement polishes it. For
    ``t <= t_lo`` the function is at most ``1/|t_lo|``, far below the sup.
    """
    t = np.linspace(t_lo, -1e-6, 200_001)
    v = _neg_sinc(t)
    i = int(np.argmax(v))
    h = t[1] - t[0]
    res = minimize_scalar(lambda s: -_neg_sinc(s), bounds=(t[i] - h, min(t[i] + h, -1e-9)),
                          method="bounded", options={"xatol": 1e-13})
    return float(-res.fun), float(res.x)


def derive_mu(margin: float = 1e-6, grid: float = 1e-4) -> float:
    """Smallest ``mu`` on a ``grid`` lattice with ``mu**2 >= sup + margin``."""
    s, _ = helix_sup()
    mu = math.ceil(math.sqrt(s + margin) / grid) * grid
    mu = round(mu, 12)
    if mu * mu < s + margin:
        mu = round(mu + grid, 12)
    assert mu < 0.5
    return mu


def _check_mu(mu: float) -> None:
    if not 0.0 < mu < 0.5:
        raise DomainError(f"mu must lie in (0, 1/2), got {mu}")


def _small_cylinder_lhs(mu: float, N: int) -> float:
    x = N - 1.0
    return math.sqrt(1.0 + mu * mu * x * x) / (x * math.sqrt(1.0 + mu * mu))


def derive_N(mu: float) -> int:
    """Smallest ``N >= 2`` with ``sqrt(1 + mu^2 (N-1)^2) / ((N-1) sqrt(1+mu^2)) < 1/sqrt(5)``."""
    _check_mu(mu)
    N = 2
    while not _small_cylinder_lhs(mu, N) < LAMBDA_EEL:
        N += 1
    return N


def derive_M(mu: float) -> float:
    """``M = ceil(1 / (sqrt((1+mu^2)/5) - mu)) + 1``, so that
    ``sqrt(1+mu^2) > (mu + 1/M) sqrt(5)`` with room to spare."""
    _check_mu(mu)
    gap = math.sqrt((1.0 + mu * mu) / 5.0) - mu
    if gap <= 0:
        raise DomainError(f"no admissible M: sqrt((1+mu^2)/5) <= mu at mu={mu}")
    return float(math.ceil(1.0 / gap) + 1)


@dataclass(frozen=True)
class EelParams:
    mu: float
    N: int
    M: float
    lam: float = LAMBDA_EEL

    @property
    def alpha(self) -> float:
        return math.acos(self.lam)

    @classmethod
    def derive(cls, mu: float | None = None, lam: float = LAMBDA_EEL) -> "EelParams":
        mu = derive_mu() if mu is None else float(mu)
        return cls(mu=mu, N=derive_N(mu), M=derive_M(mu), lam=lam)

    def violations(self) -> list[str]:
        out = []
        if not 0.0 < self.mu < 0.5:
            out.append(f"mu={self.mu} outside (0, 1/2)")
            return out
        if self.mu ** 2 < helix_sup()[0]:
            out.append("mu^2 below sup(-sin t / t): spiral not self-expanded")
        if int(self.N) != self.N or self.N < 2:
            out.append(f"N={self.N} is not an integer >= 2")
        elif not _small_cylinder_lhs(self.mu, int(self.N)) < LAMBDA_EEL:
            out.append(f"N={self.N} too small for the small-cylinder inequality")
        if not self.M > 1:
            out.append(f"M={self.M} must exceed 1")
        elif not math.sqrt(1 + self.mu ** 2) > (self.mu + 1 / self.M) * math.sqrt(5):
            out.append(f"M={self.M} too small for the big-cylinder inequality")
        if not -1.0 <= self.lam < 1.0:
            out.append(f"lambda={self.lam} outside [-1, 1)")
        return out

    def validate(self) -> "EelParams":
        bad = self.violations()
        if bad:
            raise DomainError("invalid eel parameters: " + "; ".join(bad))
        return self

    def to_dict(self) -> dict:
        return {"mu": self.mu, "N": int(self.N), "M": self.M, "lambda": self.lam, "alpha": self.alpha}


@dataclass(frozen=True)
class CylinderSpec:
    """``{x^2 + y^2 <= r^2, a <= z <= b}``; construction cylinders have ``b = a + 2 pi mu r``."""

    r: float
    a: float
    b: float

    @classmethod
    def for_eel(cls, r: float, a: float, mu: float) -> "CylinderSpec":
        return cls(r, a, a + 2.0 * math.pi * mu * r)

    def contains(self, P, tol: float = 1e-9) -> np.ndarray:
        P = np.asarray(P, dtype=float)
        rad2 = P[:, 0] ** 2 + P[:, 1] ** 2
        return (rad2 <= self.r ** 2 + tol) & (P[:, 2] >= self.a - tol) & (P[:, 2] <= self.b + tol)


# ---------------------------------------------------------------------------
# helix


def helix(r: float, mu: float | None, t_lo: float, t_hi: float, step: float = DEFAULT_STEP) -> SampledCurve:
    """Samples of ``(r cos t, r sin t, mu r t)`` on ``[t_lo, t_hi]`` with
    parameter step at most ``step``. ``mu=None`` uses :func:`derive_mu`.

    A degenerate range ``t_lo == t_hi`` yields the single point at ``t_lo``.
    """
    if not r > 0 or not step > 0:
        raise DomainError("helix needs r > 0 and step > 0")
    if t_hi < t_lo:
        raise DomainError(f"empty parameter range [{t_lo}, {t_hi}]")
    mu = derive_mu() if mu is None else float(mu)
    n = max(1, math.ceil((t_hi - t_lo) / step)) if t_hi > t_lo else 0
    t = np.linspace(t_lo, t_hi, n + 1)
    P = np.column_stack([r * np.cos(t), r * np.sin(t), mu * r * t])
    return SampledCurve(t, P, {"kind": "helix", "r": r, "mu": mu})


# ---------------------------------------------------------------------------
# eel plans


@dataclass(frozen=True)
class EelPiece:
    """One analytic piece of an eel.

    ``kind`` is ``"down"``/``"up"`` (a spiral of radius ``radius`` making
    ``loops`` turns between ``z0`` and ``z1``, centred on the z-axis) or
    ``"segment"`` (straight from ``start`` to ``end``). Loop counts are exact
    integers and may be astronomically large.
    """

    kind: str
    stage: int
    radius: float
    loops: int
    start: tuple[float, float, float]
    end: tuple[float, float, float]
    samples: int
    length: float

    def sample(self) -> tuple[np.ndarray, np.ndarray]:
        """Local parameters and points, endpoints exact."""
        n = self.samples
        if self.kind == "segment":
            s = np.linspace(0.0, 1.0, n + 1)
            A, B = np.array(self.start), np.array(self.end)
            P = A[None, :] + s[:, None] * (B - A)[None, :]
            P[-1] = B
            return s, P
        T = 2.0 * math.pi * self.loops
        t = np.linspace(0.0, T, n + 1)
        z0, z1 = self.start[2], self.end[2]
        z = z0 + (z1 - z0) * (t / T)
        P = np.column_stack([self.radius * np.cos(t), self.radius * np.sin(t), z])
        P[0] = self.start
        P[-1] = self.end
        return t, P


@dataclass
class EelPlan:
    pieces: list[EelPiece]
    params: EelParams
    step: float
    meta: dict = field(default_factory=dict)

    @property
    def length(self) -> float:
        return math.fsum(p.length for p in self.pieces)

    @property
    def sample_count(self) -> int:
        """Number of samples the plan emits (shared junction points once)."""
        return 1 + sum(p.samples for p in self.pieces)

    def stage_lengths(self) -> dict[int, float]:
        out: dict[int, float] = {}
        for p in self.pieces:
            out[p.stage] = out.get(p.stage, 0.0) + p.length
        return out

    def max_norm(self) -> float:
        """Largest point norm; exact since each piece reaches its extreme
        norm at an endpoint (spirals have constant radius and monotone z)."""
        return max(max(math.hypot(*p.start), math.hypot(*p.end)) for p in self.pieces)

    def summary(self) -> dict:
        return {
            "pieces": len(self.pieces),
            "length": self.length,
            "max_norm": self.max_norm(),
            "sample_count": str(self.sample_count) if self.sample_count > 2**53 else self.sample_count,
            "step": self.step,
            **self.meta,
        }

    def sample(self, max_samples: int = DEFAULT_MAX_SAMPLES, workers: int = 1) -> SampledCurve:
        count = self.sample_count
        if count > max_samples:
            raise SampleBudgetError(
                f"plan needs {count:.3e} samples, budget is {max_samples:.3e}"
                if count < 10**300 else f"plan needs about 10^{len(str(count)) - 1} samples, budget is {max_samples:.3e}",
                plan=self,
            )
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(EelPiece.sample, self.pieces))
        else:
            parts = [p.sample() for p in self.pieces]
        pieces = [SampledCurve(t, P) for t, P in parts]
        meta = {"params": self.params.to_dict(), "step": self.step, **self.meta}
        curve = concatenate(pieces, meta=meta)
        meta["junctions"] = _junction_report(self, curve)
        return curve


def _spiral_samples(loops: int, step: float) -> int:
    return loops * max(1, math.ceil(2.0 * math.pi / step))


def _segment_samples(length: float, radius: float, step: float) -> int:
    # same spatial resolution as a spiral of the given radius
    if radius <= 0 or length <= 0:
        return 1
    return max(1, math.ceil((length / radius) / step))


def _segment(stage, A, B, radius, step) -> EelPiece:
    length = math.dist(A, B)
    return EelPiece("segment", stage, radius, 0, tuple(A), tuple(B), _segment_samples(length, radius, step), length)


def _cylinder_pieces(r, a, n, params: EelParams, step, stage=1) -> list[EelPiece]:
    mu, N = params.mu, int(params.N)
    top = a + 2.0 * math.pi * mu * r
    pieces = []
    for k in range(1, n + 1):
        loops = N ** (n - k)
        # radius r / N**(n-k) may underflow to 0 for deep nests; each
        # spiral's length is 2 pi r sqrt(1 + mu^2) whatever its depth
        rho = r * math.exp(-(n - k) * math.log(N))
        down = k % 2 == 1
        z0, z1 = (top, a) if down else (a, top)
        length = 2.0 * math.pi * r * math.sqrt(1.0 + mu * mu)
        pieces.append(EelPiece("down" if down else "up", stage, rho, loops, (rho, 0.0, z0), (rho, 0.0, z1),
                               _spiral_samples(loops, step), length))
        if k < n:
            pieces.append(_segment(stage, (rho, 0.0, z1), (N * rho, 0.0, z1), rho, step))
    return pieces


def _check_step(step: float) -> None:
    if not step > 0:
        raise DomainError(f"step must be positive, got {step}")


def _check_cylinder(r, n, params):
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    if n < 1 or n % 2 == 0:
        raise PreconditionError(f"loop count n must be an odd positive integer, got {n}")
    if not 2.0 * math.pi * params.mu * r * n > 1.0:
        raise PreconditionError(f"2 pi mu r n = {2 * math.pi * params.mu * r * n:.6g} must exceed 1")


def plan_cylinder_eel(r: float, a: float, n: int, params: EelParams, step: float = DEFAULT_STEP) -> EelPlan:
    params.validate()
    _check_step(step)
    _check_cylinder(r, n, params)
    pieces = _cylinder_pieces(r, a, n, params, step)
    return EelPlan(pieces, params, step, {"kind": "cylinder_eel", "r": r, "a": a, "n": n})


def cylinder_eel(
    r: float,
    a: float,
    n: int,
    params: EelParams,
    step: float = DEFAULT_STEP,
    max_samples: int = DEFAULT_MAX_SAMPLES,
) -> SampledCurve:
    """Eel of length > 1 inside ``Cyl(r, [a, a + 2 pi mu r])``.

    ``n`` nested spirals (odd ``k`` downward, even ``k`` upward) of radii
    ``r / N**(n-k)``, each making ``N**(n-k)`` turns, joined by radial
    segments alternately on the floor and the lid. Starts on the lid at
    radius ``r / N**(n-1)`` and ends on the floor at radius ``r``.

    Spirals are sampled with angular step at most ``step``; segments with
    the same spatial spacing as the spiral they leave.
    """
    return plan_cylinder_eel(r, a, n, params, step).sample(max_samples)


def _min_odd(r: float, mu: float) -> int:
    n = math.floor(1.0 / (2.0 * math.pi * mu * r)) + 1
    while not 2.0 * math.pi * mu * r * n > 1.0:
        n += 1
    return n if n % 2 else n + 1


def plan_infinite_eel(stages: int, params: EelParams, step: float = DEFAULT_STEP) -> EelPlan:
    """Stage ``s`` lives in ``Cyl(r_s, [a_s, a_s + 2 pi mu r_s])`` with
    ``a_s = 2**-s`` and ``r_s = 1 / (2**(s+1) (pi mu + M))``; consecutive
    stages are joined by a straight link from the floor of one cylinder to
    the start of the next."""
    params.validate()
    _check_step(step)
    if stages < 1:
        raise DomainError(f"stages must be >= 1, got {stages}")
    mu, M = params.mu, params.M
    pieces: list[EelPiece] = []
    stage_info = []
    prev_end = None
    prev_radius = None
    for s in range(1, stages + 1):
        a_s = 2.0 ** -s
        r_s = 1.0 / (2.0 ** (s + 1) * (math.pi * mu + M))
        n_s = _min_odd(r_s, mu)
        block = _cylinder_pieces(r_s, a_s, n_s, params, step, stage=s)
        if prev_end is not None:
            link = _segment(s - 1, prev_end, block[0].start, prev_radius, step)
            pieces.append(link)
            v = np.subtract(link.end, link.start)
            stage_info[-1]["link_angle_to_z_axis"] = float(math.acos(min(1.0, abs(v[2]) / np.linalg.norm(v))))
        pieces.extend(block)
        prev_end, prev_radius = block[-1].end, r_s
        a_next = 2.0 ** -(s + 1)
        r_next = 1.0 / (2.0 ** (s + 2) * (math.pi * mu + M))
        gap = a_s - (a_next + 2.0 * math.pi * mu * r_next)
        stage_info.append({
            "stage": s,
            "a": a_s,
            "r": r_s,
            "loops_n": n_s,
            "innermost_radius": r_s * math.exp(-(n_s - 1) * math.log(params.N)),
            # the radius itself underflows to 0 from stage 4 on
            "innermost_radius_log10": math.log10(r_s) - (n_s - 1) * math.log10(params.N),
            "gap_to_next": gap,
            "gap_over_M_r": gap / (M * r_s),
            "gap_condition_holds": bool(gap >= M * r_s * (1.0 - 1e-12)),
        })
    return EelPlan(pieces, params, step, {"kind": "infinite_eel", "stages": stages, "stage_info": stage_info})


def infinite_eel(
    stages: int,
    params: EelParams | None = None,
    step: float = DEFAULT_STEP,
    max_samples: int = DEFAULT_MAX_SAMPLES,
    workers: int = 1,
) -> SampledCurve:
    """First ``stages`` stages of the bounded eel of infinite length.

    Raises :class:`SampleBudgetError` when the sampled curve would exceed
    ``max_samples``; the error carries the exact plan. With the derived
    constants the first stage alone needs 55 nested spirals, so this is the
    normal outcome; use :func:`plan_infinite_eel` for analytic length and
    extent.
    """
    params = EelParams.derive() if params is None else params
    return plan_infinite_eel(stages, params, step).sample(max_samples, workers)


def _junction_report(plan: EelPlan, curve: SampledCurve) -> list[dict]:
    """Gap between the samples on either side of every junction, against
    twice the larger spatial step of the two pieces that meet there."""
    out = []
    idx = 0
    for k, p in enumerate(plan.pieces[:-1]):
        idx += p.samples
        before = curve.points[idx - 1]
        at = curve.points[idx]
        after = curve.points[idx + 1]
        gap = float(max(np.linalg.norm(at - before), np.linalg.norm(after - at)))
        speed = max(p.radius, plan.pieces[k + 1].radius) * math.sqrt(1.0 + plan.params.mu ** 2)
        bound = 2.0 * plan.step * speed
        out.append({"index": idx, "gap": gap, "bound": bound, "ok": bool(gap <= bound)})
    return out


# ---------------------------------------------------------------------------
# other fixtures


_EX3D_KNOTS = (-1.5 * math.pi, -0.5 * math.pi, 0.0, 1.0, 1.0 + 0.5 * math.pi, 1.0 + math.pi)


def _ex3d_branch(k: int, t: np.ndarray) -> np.ndarray:
    if k == 0:
        return np.column_stack([0 * t, -np.sin(t), -np.cos(t)])
    if k == 1:
        return np.column_stack([-0.5 * (1 + np.cos(2 * t)), 1 + 0 * t, 0.5 * np.sin(2 * t)])
    if k == 2:
        return np.column_stack([-1 + 0 * t, 1 + 0 * t, t])
    if k == 3:
        s = t - 1
        return np.column_stack([-1 + 0 * t, 0.5 * (1 + np.cos(2 * s)), 1 + 0.5 * np.sin(2 * s)])
    s = t - 1
    return np.column_stack([-np.sin(s), 0 * t, 1 + np.cos(s)])


def example_curve_3d(step: float = DEFAULT_STEP) -> SampledCurve:
    """Five-branch unit-speed C^1 curve on ``[-3pi/2, 1 + pi]`` whose final
    point is the midpoint of two earlier ones.

    Every branch is sampled with parameter step at most ``step`` and hits
    its end knots exactly.
    """
    _check_step(step)
    pieces = []
    for k in range(5):
        lo, hi = _EX3D_KNOTS[k], _EX3D_KNOTS[k + 1]
        t = np.linspace(lo, hi, max(1, math.ceil((hi - lo) / step)) + 1)
        t[0], t[-1] = lo, hi
        pieces.append(SampledCurve(t, _ex3d_branch(k, t)))
    junctions = []
    for k in range(1, 5):
        knot = np.array([_EX3D_KNOTS[k]])
        jump = float(np.abs(_ex3d_branch(k - 1, knot) - _ex3d_branch(k, knot)).max())
        if jump > 1e-12:
            raise AssertionError(f"branches {k - 1} and {k} disagree by {jump} at t={knot[0]}")
        junctions.append({"t": float(knot[0]), "jump": jump})
    return concatenate(pieces, meta={"kind": "example3d", "step": step, "junctions": junctions}, join_tol=1e-12)


def lambda_from_norm_equivalence(delta: float) -> float:
    """lambda for which self-expanded curves of a norm ``|.|`` with
    ``delta ||x|| <= |x| <= ||x||`` are Euclidean lambda-curves.

    With ``rho = 1 - delta**4 / 2`` this is the supremum over ``t in (0, 2/delta]``
    of ``(sqrt(1 + 2 rho t + t^2) - 1) / t``, located by a grid scan and
    refined with a bounded scalar search; the right endpoint is always
    evaluated since the ratio is increasing in ``t``.
    """
    if not 0.0 < delta <= 1.0:
        raise DomainError(f"delta must lie in (0, 1], got {delta}")
    rho = 1.0 - delta ** 4 / 2.0
    T = 2.0 / delta

    def f(t):
        return (np.sqrt(1.0 + 2.0 * rho * t + t * t) - 1.0) / t

    grid = np.linspace(T / 4096, T, 4096)
    vals = f(grid)
    i = int(np.argmax(vals))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    best = float(vals[i])
    if hi > lo:
        res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        best = max(best, float(-res.fun))
    best = max(best, float(f(T)))
    if not best < 1.0:
        raise AssertionError(f"norm-equivalence lambda {best} is not below 1")
    return best


def gradient_descent_trajectory(Q, x0, step_size: float, iters: int) -> SampledCurve:
    """Iterates ``x_{k+1} = x_k - step_size * 2 Q x_k`` of ``x -> <Qx, x>``,
    ``k = 0 .. iters``."""
    Q = np.asarray(Q, dtype=float)
    x = np.asarray(x0, dtype=float).reshape(-1)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1] or Q.shape[0] != x.shape[0]:
        raise DomainError(f"Q {Q.shape} and x0 {x.shape} are incompatible")
    if not np.allclose(Q, Q.T, rtol=0, atol=1e-12 * max(1.0, np.abs(Q).max())):
        raise DomainError("Q must be symmetric")
    ev = np.linalg.eigvalsh(Q)
    if ev[0] <= 0:
        raise DomainError(f"Q must be positive definite (smallest eigenvalue {ev[0]:.3g})")
    if not 0 < step_size < 1.0 / ev[-1]:
        raise DomainError(f"step_size must lie in (0, {1.0 / ev[-1]:.6g}), got {step_size}")
    if iters < 2:
        raise DomainError(f"iters must be >= 2, got {iters}")
    X = np.empty((iters + 1, x.shape[0]))
    X[0] = x
    A = np.eye(x.shape[0]) - 2.0 * step_size * Q
    for k in range(iters):
        X[k + 1] = A @ X[k]
    return SampledCurve(np.arange(iters + 1, dtype=float), X,
                        {"kind": "gradient_descent", "step_size": step_size, "iters": iters})


# ---------------------------------------------------------------------------
# lemma certification


@dataclass(frozen=True)
class CertificationRecord:
    lemma: str
    mu: float
    N: int
    M: float
    lam: float
    max_violation: float
    argmax: tuple[float, ...]
    grid: int
    closed_form_violation: float | None = None

    @property
    def certified(self) -> bool:
        ok = self.max_violation <= 0
        if self.closed_form_violation is not None:
            ok = ok and self.closed_form_violation <= 0
        return ok

    @property
    def slack(self) -> float:
        return -self.max_violation

    def to_dict(self) -> dict:
        out = {
            "mu": self.mu,
            "N": self.N,
            "M": self.M,
            "lambda": self.lam,
            "lemma": self.lemma,
            "max_violation": self.max_violation,
            "argmax": list(self.argmax),
            "grid": self.grid,
            "certified": self.certified,
        }
        if self.closed_form_violation is not None:
            out["closed_form_violation"] = self.closed_form_violation
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _grid_max_1d(f, lo, hi, n, refine=True):
    x = np.linspace(lo, hi, n)
    v = f(x)
    i = int(np.argmax(v))
    best, arg = float(v[i]), float(x[i])
    if refine and n > 1:
        a, b = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
        res = minimize_scalar(lambda s: -float(f(np.array([s]))[0]), bounds=(a, b), method="bounded",
                              options={"xatol": 1e-14})
        if -res.fun > best:
            best, arg = float(-res.fun), float(res.x)
    return best, (arg,)


def _grid_max_2d(f, xs, ys, workers=1, rows=64):
    """Max of ``f(X, Y)`` over the product grid, chunked over ``xs``;
    first occurrence wins ties."""

    def block(s):
        X = xs[s : s + rows, None]
        V = f(X, ys[None, :])
        j = int(np.argmax(V))
        a, b = divmod(j, V.shape[1])
        return float(V[a, b]), (float(xs[s + a]), float(ys[b]))

    starts = range(0, xs.size, rows)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(block, starts))
    else:
        results = [block(s) for s in starts]
    best, arg = -math.inf, ()
    for v, a in results:
        if v > best:
            best, arg = v, a
    return best, arg


def certify_lemma(name: str, params: EelParams, grid: int = 10_000, workers: int = 1) -> CertificationRecord:
    """Evaluate a spiral lemma's inequality as ``violation = LHS - RHS`` on a
    grid (``grid`` points per axis); ``max_violation <= 0`` certifies it at
    that resolution.

    * ``helix_self_expanded``: ``-sin(t)/t - mu^2`` for ``t in [-1/mu^2, 0)``
      (for smaller ``t`` the first term is below ``mu^2`` outright).
    * ``z_axis``: ``sin(phi) - sqrt(1+mu^2)/(mu sqrt 5)`` with ``z/r = tan(phi)``.
    * ``small_cylinder``: ``(sin th + mu u)/sqrt((N-1)^2 + 2N(1-cos th) + u^2)
      / sqrt(1+mu^2) - 1/sqrt 5`` over ``th in [0, 2pi]``, ``u = tan(phi) >= 0``.
    * ``radial_segment``: the radial-segment inequality at ``r = 1`` for
      ``x in [0, 1]``, ``tau in [0, 1/mu^2]`` (beyond that the left side is
      negative).
    * ``big_cylinder``: ``p q / M + mu - sqrt(1+mu^2)/sqrt 5`` with
      ``p = u/R`` and ``q = MR/z`` in ``[0, 1]``.

    Where a closed-form supremum is available its violation is recorded too.
    """
    if name not in LEMMAS:
        raise DomainError(f"unknown lemma {name!r}; expected one of {', '.join(LEMMAS)}")
    grid = int(grid)
    if grid < 2:
        raise DomainError(f"grid must be >= 2, got {grid}")
    mu, N, M, lam = params.mu, int(params.N), params.M, params.lam
    _check_mu(mu)
    s5 = math.sqrt(5.0)
    k = math.sqrt(1.0 + mu * mu)
    closed = None

    if name == "helix_self_expanded":
        hi = -1e-12
        best, arg = _grid_max_1d(lambda t: -np.sin(t) / t - mu * mu, -1.0 / (mu * mu), hi, grid)
    elif name == "z_axis":
        rhs = k / (mu * s5)
        best, arg = _grid_max_1d(lambda p: np.sin(p) - rhs, -0.5 * math.pi, 0.5 * math.pi, grid, refine=False)
        arg = (math.tan(arg[0]) if abs(arg[0]) < 0.5 * math.pi else math.copysign(math.inf, arg[0]),)
        closed = 1.0 - rhs
    elif name == "small_cylinder":
        th = np.linspace(0.0, 2.0 * math.pi, grid)
        u = np.tan(np.linspace(0.0, 0.5 * math.pi, grid, endpoint=False))

        def f(T, U):
            num = np.sin(T) + mu * U
            den = np.sqrt((N - 1.0) ** 2 + 2.0 * N * (1.0 - np.cos(T)) + U * U)
            return num / den / k - 1.0 / s5

        best, arg = _grid_max_2d(f, th, u, workers)
        closed = _small_cylinder_lhs(mu, N) - 1.0 / s5
    elif name == "radial_segment":
        tau = np.linspace(0.0, 1.0 / (mu * mu), grid)
        x = np.linspace(0.0, 1.0, grid)

        def f(T, X):
            lhs = -X * np.sin(T) - mu * mu * T
            rhs = lam * k * np.sqrt((X - np.cos(T)) ** 2 + np.sin(T) ** 2 + (mu * T) ** 2)
            return lhs - rhs

        best, arg = _grid_max_2d(f, tau, x, workers)
    else:  # big_cylinder
        p = np.linspace(0.0, 1.0, grid)
        best, arg = _grid_max_2d(lambda P, Q: P * Q / M + mu - k / s5, p, p, workers)
        closed = 1.0 / M + mu - k / s5

    return CertificationRecord(name, mu, N, M, lam, float(best), tuple(float(a) for a in arg), grid, closed)
