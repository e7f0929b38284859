"""Verdict engines for the curve properties.

Every checker returns a :class:`CheckReport` whose ``worst_margin`` is the
smallest signed slack over all constraints it evaluated (negative means a
violation of that size) and whose ``witness`` holds the sample indices of
the worst constraint. ``passed`` is ``worst_margin >= -tol``; ``tol`` always
relaxes the curve's obligation, so a curve that satisfies a property exactly
never fails from rounding.

Witness indices refer to these constraints:

* ``lambda_curve``: triples ``i < j < k`` with
  ``d(i, j) <= d(i, k) + lam * d(j, k)``.
* ``self_expanded``: ``d(i, j) <= d(i, k)`` for ``i < j < k``.
* ``self_contracted``: ``d(j, k) <= d(i, k)`` for ``i < j < k``.
* ``lambda_cone``: pairs ``j < i < m``, forward secant at ``i`` against the
  direction from ``i`` to ``j``. With ``secant="incoming"`` the chord
  arriving at ``i`` is used instead and ``i`` ranges up to ``m``.
* ``noncollinear``: ``i <= j < k``, directions from ``k`` to ``i`` and ``j``.
* ``conical_split``: indices ``1 <= i < m``, forward secant against the whole
  sampled initial cone (``1 <= i <= m`` for incoming secants).
* ``lyapunov``: pairs ``start <= i < k`` of the Lyapunov sequence.

Ties between equally bad constraints resolve to the lexicographically
smallest witness, and chunked work is reduced in index order, so reports are
reproducible whatever the number of workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numba
import numpy as np

from .config import DEFAULT_TOL, DegenerateSampleError, DomainError
from .curve import SampledCurve, cumulative_length, forward_secants, initial_cone
from ._kernels import cone_rows
from .geometry import GeneratedCone, cone_projection

__all__ = [
    "PROPERTIES",
    "CheckReport",
    "check_lambda_curve",
    "check_self_expanded",
    "check_self_contracted",
    "check_lambda_cone",
    "check_noncollinear",
    "check_conical_split",
    "check_lyapunov",
    "find_min_lambda",
    "run_check",
    "SECANTS",
]

PROPERTIES = (
    "lambda_curve",
    "lambda_cone",
    "self_contracted",
    "self_expanded",
    "noncollinear",
    "conical_split",
    "lyapunov",
)

#: checkers whose verdict is monotone in lambda
MONOTONE = ("lambda_curve", "lambda_cone", "noncollinear", "conical_split", "lyapunov")


@dataclass(frozen=True)
class CheckReport:
    property: str
    lam: float
    passed: bool
    worst_margin: float
    witness: tuple[int, ...]
    samples_checked: int
    tol: float
    notes: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        out = {
            "property": self.property,
            "lambda": self.lam,
            "passed": self.passed,
            "worst_margin": self.worst_margin,
            "witness": list(self.witness),
            "samples_checked": self.samples_checked,
            "tol": self.tol,
        }
        if self.notes:
            out["notes"] = list(self.notes)
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "CheckReport":
        return cls(
            property=data["property"],
            lam=float(data["lambda"]),
            passed=bool(data["passed"]),
            worst_margin=float(data["worst_margin"]),
            witness=tuple(int(i) for i in data["witness"]),
            samples_checked=int(data["samples_checked"]),
            tol=float(data["tol"]),
            notes=tuple(data.get("notes", ())),
        )


class _Worst:
    """Running minimum of (margin, witness) with lexicographic tie-break."""

    def __init__(self):
        self.margin = math.inf
        self.witness: tuple[int, ...] = ()

    def offer(self, margin: float, witness: tuple[int, ...]) -> None:
        if margin < self.margin or (margin == self.margin and witness < self.witness):
            self.margin = float(margin)
            self.witness = tuple(int(i) for i in witness)


def _map_ordered(fn: Callable, items: Sequence, workers: int) -> Iterable:
    if workers <= 1 or len(items) <= 1:
        return map(fn, items)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@contextmanager
def _numba_threads(workers: int):
    old = numba.get_num_threads()
    numba.set_num_threads(max(1, min(int(workers), numba.config.NUMBA_NUM_THREADS)))
    try:
        yield
    finally:
        numba.set_num_threads(old)


def _report(prop, lam, worst: _Worst, c: SampledCurve, tol, notes=()) -> CheckReport:
    return CheckReport(
        property=prop,
        lam=float(lam),
        passed=bool(worst.margin >= -tol),
        worst_margin=worst.margin,
        witness=worst.witness,
        samples_checked=len(c),
        tol=float(tol),
        notes=tuple(notes),
    )


def _check_lambda(lam: float) -> None:
    if not -1.0 <= lam < 1.0:
        raise DomainError(f"lambda must lie in [-1, 1), got {lam}")


def _distances(P: np.ndarray) -> np.ndarray:
    diff = P[:, None, :] - P[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def _chunks(lo: int, hi: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(s + size, hi)) for s in range(lo, hi, size)]


# ---------------------------------------------------------------------------
# metric (triple) conditions


def check_lambda_curve(c: SampledCurve, lam: float, tol: float = DEFAULT_TOL, workers: int = 1) -> CheckReport:
    """Exhaustive triple test of ``d(i,j) <= d(i,k) + lam * d(j,k)``, ``i < j < k``.

    Margin of a triple is ``d(i,k) + lam * d(j,k) - d(i,j)``. Cost is cubic in
    the number of samples.
    """
    _check_lambda(lam)
    c.require_injective()
    D = _distances(c.points)
    n = len(c)

    def middle(j: int):
        M = D[:j, j + 1 :] + lam * D[j, j + 1 :][None, :] - D[:j, j][:, None]
        flat = int(np.argmin(M))
        i, k = divmod(flat, M.shape[1])
        return float(M[i, k]), (i, j, j + 1 + k)

    worst = _Worst()
    for margin, wit in _map_ordered(middle, range(1, n - 1), workers):
        worst.offer(margin, wit)
    return _report("lambda_curve", lam, worst, c, tol)


def check_self_expanded(c: SampledCurve, tol: float = DEFAULT_TOL) -> CheckReport:
    """``d(i,j) <= d(i,k)`` for all ``i < j < k``.

    For a fixed anchor ``i`` this is monotonicity of ``d(i, .)`` after ``i``,
    so the worst triple per anchor comes from a suffix minimum; the test is
    exhaustive at quadratic cost.
    """
    P = c.points
    worst = _Worst()
    for i in range(len(c) - 2):
        r = np.linalg.norm(P[i + 1 :] - P[i], axis=1)
        suffix_min = np.minimum.accumulate(r[::-1])[::-1][1:]
        marg = suffix_min - r[:-1]
        j = int(np.argmin(marg))
        k = j + 1 + int(np.argmax(r[j + 1 :] == suffix_min[j]))
        worst.offer(float(marg[j]), (i, i + 1 + j, i + 1 + k))
    return _report("self_expanded", 0.0, worst, c, tol)


def check_self_contracted(c: SampledCurve, tol: float = DEFAULT_TOL) -> CheckReport:
    """``d(j,k) <= d(i,k)`` for all ``i < j < k`` (distance to each later
    anchor is non-increasing along the past)."""
    P = c.points
    worst = _Worst()
    for k in range(2, len(c)):
        col = np.linalg.norm(P[:k] - P[k], axis=1)
        suffix_max = np.maximum.accumulate(col[::-1])[::-1][1:]
        marg = col[:-1] - suffix_max
        i = int(np.argmin(marg))
        j = i + 1 + int(np.argmax(col[i + 1 :] == suffix_max[i]))
        worst.offer(float(marg[i]), (i, j, k))
    return _report("self_contracted", 0.0, worst, c, tol)


# ---------------------------------------------------------------------------
# secant (cone) conditions


SECANTS = ("forward", "incoming")


def _apex_directions(c: SampledCurve, secant: str, steps: int = 1) -> tuple[np.ndarray, int]:
    """Unit direction attached to each apex, as rows of a ``(m+1, d)`` array,
    and the end of the apex range (apexes run from 1).

    ``forward``: chord from sample ``i`` towards ``i + 1`` (apexes ``1..m-1``).
    ``incoming``: chord from ``i - 1`` into sample ``i`` (apexes ``1..m``); this
    is the variant the triple inequality controls exactly on samples.
    """
    if secant not in SECANTS:
        raise DomainError(f"secant must be one of {SECANTS}, got {secant!r}")
    Q = forward_secants(c, steps=steps if secant == "forward" else 1)
    pad = np.full((1, c.dim), np.nan)
    if secant == "forward":
        return np.vstack([Q, pad]), c.m
    return np.vstack([pad, Q]), c.m + 1


def check_lambda_cone(
    c: SampledCurve,
    lam: float,
    tol: float = DEFAULT_TOL,
    secant_steps: int = 1,
    workers: int = 1,
    secant: str = "forward",
) -> CheckReport:
    """Secant at apex ``i`` makes angle >= ``acos(lam)`` with every past direction.

    Margin of a pair ``(j, i)`` is ``lam - <q_i, (p_j - p_i)/||p_j - p_i||>``,
    ``q_i`` the one-step forward chord by default. ``secant_steps > 1``
    averages the forward chords towards the next samples;
    ``secant="incoming"`` uses the chord arriving at ``i`` instead.
    """
    _check_lambda(lam)
    P = c.points
    if c.m < 1:
        return _report("lambda_cone", lam, _Worst(), c, tol)
    Q, hi = _apex_directions(c, secant, secant_steps)
    with _numba_threads(workers):
        best, arg = cone_rows(np.ascontiguousarray(P), np.ascontiguousarray(Q), float(lam), 1, hi)
    bad = np.nonzero(arg < 0)[0]
    if bad.size:
        i = int(bad[0]) + 1
        raise DegenerateSampleError(f"samples {-int(arg[bad[0]]) - 1} and {i} coincide")
    worst = _Worst()
    if best.size:
        # witness ordered (past index, apex index)
        for r in np.nonzero(best == best.min())[0]:
            worst.offer(float(best[r]), (int(arg[r]), int(r) + 1))
    notes = []
    if secant != "forward":
        notes.append(f"{secant} secants")
    if secant_steps != 1 and secant == "forward":
        notes.append(f"secants averaged over {secant_steps} steps")
    return _report("lambda_cone", lam, worst, c, tol, notes)


def check_noncollinear(c: SampledCurve, lam: float, tol: float = DEFAULT_TOL, workers: int = 1) -> CheckReport:
    """``<u_i, u_j> > -lam`` for the unit directions from apex ``k`` back to
    samples ``i <= j < k``. Margin is ``<u_i, u_j> + lam``.

    The inequality is strict; a margin of exactly zero (reached for instance
    by segments at ``lam = -1``) is reported as a pass with a note.
    """
    _check_lambda(lam)
    c.require_injective()
    P = c.points

    def apex(k: int):
        U = P[:k] - P[k]
        U /= np.linalg.norm(U, axis=1, keepdims=True)
        G = np.triu(U @ U.T) + np.tril(np.full((k, k), np.inf), -1)
        flat = int(np.argmin(G))
        i, j = divmod(flat, k)
        return float(min(G[i, j], 1.0)) + lam, (i, j, k)

    worst = _Worst()
    for margin, wit in _map_ordered(apex, range(1, len(c)), workers):
        worst.offer(margin, wit)
    notes = []
    if math.isfinite(worst.margin) and abs(worst.margin) <= tol:
        notes.append("strict inequality met only with equality at the witness")
    return _report("noncollinear", lam, worst, c, tol, notes)


def check_conical_split(c: SampledCurve, lam: float, tol: float = DEFAULT_TOL, workers: int = 1,
                        secant: str = "forward") -> CheckReport:
    """Open cone of half-angle ``acos(lam)`` around the secant meets the
    sampled initial cone only at the apex.

    Equivalently ``max {<q_i, u> : u in K(t_i), ||u|| = 1} <= lam``; the
    maximum comes from the conic projection of ``q_i``. Margin is
    ``lam - max``; the witness is the apex index. ``secant`` is as in
    :func:`check_lambda_cone`.
    """
    _check_lambda(lam)
    P = c.points
    if c.m < 1:
        return _report("conical_split", lam, _Worst(), c, tol)
    Q, hi = _apex_directions(c, secant)

    def apex(i: int):
        V = P[:i] - P[i]
        n = np.linalg.norm(V, axis=1)
        keep = n > 0
        K = GeneratedCone(V[keep] / n[keep, None], dim=c.dim)
        proj = cone_projection(K, Q[i])
        return lam - proj.cos, (i,), proj.converged

    worst = _Worst()
    unconverged = []
    for margin, wit, ok in _map_ordered(apex, range(1, hi), workers):
        worst.offer(margin, wit)
        if not ok:
            unconverged.append(wit[0])
    notes = []
    if unconverged:
        notes.append(f"projection did not converge at {len(unconverged)} apex(es); generator maximum used")
    if secant != "forward":
        notes.append(f"{secant} secants")
    return _report("conical_split", lam, worst, c, tol, notes)


def check_lyapunov(c: SampledCurve, lam: float, start_index: int = 0, tol: float = DEFAULT_TOL) -> CheckReport:
    """``V(i) = ||p_i - p_s|| + lam * length(s, i)`` is non-decreasing for ``i >= s``.

    Margin of a pair ``i < k`` is ``V(k) - V(i)``.
    """
    _check_lambda(lam)
    if not 0 <= start_index < max(c.m, 1):
        raise DomainError(f"start_index must lie in [0, {c.m}), got {start_index}")
    P = c.points[start_index:]
    L = cumulative_length(c)[start_index:] - cumulative_length(c)[start_index]
    V = np.linalg.norm(P - P[0], axis=1) + lam * L
    worst = _Worst()
    if V.shape[0] >= 2:
        prefix_max = np.maximum.accumulate(V)[:-1]
        marg = V[1:] - prefix_max
        k = int(np.argmin(marg))
        i = int(np.argmax(V[: k + 1] == prefix_max[k]))
        worst.offer(float(marg[k]), (start_index + i, start_index + k + 1))
    return _report("lyapunov", lam, worst, c, tol)


# ---------------------------------------------------------------------------
# dispatch and lambda search


def run_check(c: SampledCurve, prop: str, lam: float = 0.0, tol: float = DEFAULT_TOL, **kwargs) -> CheckReport:
    prop = prop.replace("-", "_")
    if prop == "lambda_curve":
        return check_lambda_curve(c, lam, tol, **kwargs)
    if prop == "lambda_cone":
        return check_lambda_cone(c, lam, tol, **kwargs)
    if prop == "noncollinear":
        return check_noncollinear(c, lam, tol, **kwargs)
    if prop == "conical_split":
        return check_conical_split(c, lam, tol, **kwargs)
    if prop == "lyapunov":
        return check_lyapunov(c, lam, tol=tol, **kwargs)
    if prop == "self_expanded":
        return check_self_expanded(c, tol)
    if prop == "self_contracted":
        return check_self_contracted(c, tol)
    raise DomainError(f"unknown property {prop!r}; expected one of {', '.join(PROPERTIES)}")


def find_min_lambda(
    c: SampledCurve,
    checker: str,
    tol: float = DEFAULT_TOL,
    bisect_tol: float = 1e-6,
    **kwargs,
) -> float:
    """Smallest ``lam`` in ``[-1, 1)`` at which ``checker`` passes, to ``bisect_tol``.

    Only meaningful for checkers that are monotone in ``lam``. Returns
    ``math.inf`` when the check still fails at ``1 - bisect_tol``.
    """
    checker = checker.replace("-", "_")
    if checker not in MONOTONE:
        raise DomainError(f"{checker!r} is not monotone in lambda")

    def ok(lam: float) -> bool:
        return run_check(c, checker, lam, tol, **kwargs).passed

    lo, hi = -1.0, 1.0 - bisect_tol
    if ok(lo):
        return lo
    if not ok(hi):
        return math.inf
    while hi - lo > bisect_tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi
