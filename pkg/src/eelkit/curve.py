"""Sampled curves: length, secants, initial cones, reversal, CSV exchange.

A :class:`SampledCurve` is the discrete stand-in for a map ``gamma: I -> R^d``:
a strictly increasing parameter grid with one point per parameter. Every
verdict computed from it holds at the sampled resolution only.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from .config import DegenerateSampleError, DomainError
from .geometry import GeneratedCone

__all__ = [
    "SampledCurve",
    "CurveFormatError",
    "segment_lengths",
    "cumulative_length",
    "polyline_length",
    "forward_secant",
    "backward_secant",
    "forward_secants",
    "initial_cone",
    "reverse",
    "concatenate",
    "diameter",
    "to_csv",
    "from_csv",
    "write_csv",
    "read_csv",
]


class CurveFormatError(ValueError):
    """Malformed polyline CSV input."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


@dataclass(frozen=True, eq=False)
class SampledCurve:
    """Parameter grid ``params`` (shape ``(m+1,)``) and ``points`` (shape ``(m+1, d)``).

    ``meta`` carries free-form construction metadata (parameters, constants,
    diagnostics); it plays no role in any check.
    """

    params: np.ndarray
    points: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.array(self.params, dtype=float).reshape(-1)
        P = np.array(self.points, dtype=float)
        if P.ndim == 1:
            P = P[:, None]
        if P.ndim != 2 or P.shape[0] != t.shape[0]:
            raise DomainError(f"params {t.shape} and points {P.shape} do not match")
        if t.shape[0] == 0:
            raise DomainError("a curve needs at least one sample")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(P))):
            raise DomainError("curve samples must be finite")
        if np.any(np.diff(t) <= 0):
            raise DomainError("params must be strictly increasing")
        t.setflags(write=False)
        P.setflags(write=False)
        object.__setattr__(self, "params", t)
        object.__setattr__(self, "points", P)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def m(self) -> int:
        """Index of the last sample."""
        return self.points.shape[0] - 1

    def __len__(self) -> int:
        return self.points.shape[0]

    def subcurve(self, start: int, stop: int) -> "SampledCurve":
        """Samples ``start .. stop`` inclusive."""
        return SampledCurve(self.params[start : stop + 1], self.points[start : stop + 1], dict(self.meta))

    def is_injective(self) -> bool:
        return np.unique(self.points, axis=0).shape[0] == len(self)

    def require_injective(self) -> None:
        if not self.is_injective():
            _, idx, counts = np.unique(self.points, axis=0, return_index=True, return_counts=True)
            first = int(idx[np.argmax(counts > 1)])
            raise DegenerateSampleError(f"curve samples are not injective (point {first} repeats)")


def segment_lengths(c: SampledCurve) -> np.ndarray:
    return np.linalg.norm(np.diff(c.points, axis=0), axis=1)


def cumulative_length(c: SampledCurve) -> np.ndarray:
    """``L[i]`` = polyline length from sample 0 to sample ``i``."""
    return np.concatenate([[0.0], np.cumsum(segment_lengths(c))])


def polyline_length(c: SampledCurve, from_index: int = 0, to_index: int | None = None) -> float:
    """Length of the polyline through samples ``from_index .. to_index``.

    For a polyline the supremum over partitions in the definition of length
    is attained by its own vertices.
    """
    to_index = c.m if to_index is None else to_index
    if not 0 <= from_index <= to_index <= c.m:
        raise DomainError(f"index range [{from_index}, {to_index}] outside [0, {c.m}]")
    seg = np.diff(c.points[from_index : to_index + 1], axis=0)
    return float(np.linalg.norm(seg, axis=1).sum())


def forward_secant(c: SampledCurve, i: int) -> np.ndarray:
    """Unit chord from sample ``i`` to sample ``i + 1``."""
    if not 0 <= i < c.m:
        raise DomainError(f"forward secant needs 0 <= i < {c.m}, got {i}")
    v = c.points[i + 1] - c.points[i]
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DegenerateSampleError(f"samples {i} and {i + 1} coincide")
    return v / n


def backward_secant(c: SampledCurve, i: int) -> np.ndarray:
    """Unit chord from sample ``i`` to sample ``i - 1``."""
    if not 0 < i <= c.m:
        raise DomainError(f"backward secant needs 0 < i <= {c.m}, got {i}")
    v = c.points[i - 1] - c.points[i]
    n = np.linalg.norm(v)
    if n == 0.0:
        raise DegenerateSampleError(f"samples {i - 1} and {i} coincide")
    return v / n


def forward_secants(c: SampledCurve, steps: int = 1) -> np.ndarray:
    """All forward secants, shape ``(m, d)``.

    With ``steps > 1`` the chords towards the next ``steps`` samples are
    normalized and averaged (fewer near the end of the curve), which smooths
    the direction estimate on jagged samples.
    """
    P = c.points
    D = np.diff(P, axis=0)
    n = np.linalg.norm(D, axis=1)
    if np.any(n == 0.0):
        i = int(np.argmax(n == 0.0))
        raise DegenerateSampleError(f"samples {i} and {i + 1} coincide")
    Q = D / n[:, None]
    if steps <= 1:
        return Q
    acc = np.zeros_like(Q)
    for s in range(1, steps + 1):
        V = P[s:] - P[:-s]
        V = V / np.linalg.norm(V, axis=1, keepdims=True)
        acc[: V.shape[0]] += V
    acc /= np.linalg.norm(acc, axis=1, keepdims=True)
    return acc


def initial_cone(c: SampledCurve, i: int) -> GeneratedCone:
    """Cone generated by the directions from sample ``i`` back to every
    distinct earlier sample (the sampled ``K(t_i)``). Empty at ``i = 0``."""
    if not 0 <= i <= c.m:
        raise DomainError(f"index {i} outside [0, {c.m}]")
    if i == 0:
        return GeneratedCone(np.zeros((0, c.dim)), dim=c.dim)
    past = np.unique(c.points[:i], axis=0)
    V = past - c.points[i]
    n = np.linalg.norm(V, axis=1)
    keep = n > 0
    return GeneratedCone(V[keep] / n[keep, None], dim=c.dim)


def reverse(c: SampledCurve) -> SampledCurve:
    """Time reversal ``t -> -t``."""
    return SampledCurve(-c.params[::-1], c.points[::-1], dict(c.meta))


def concatenate(curves: Iterable[SampledCurve], meta: dict | None = None, join_tol: float = 1e-12) -> SampledCurve:
    """Join curves end to start into one curve with a monotone parameter.

    Each curve's parameters are shifted so it starts where the previous one
    ended; a shared junction point appears once.
    """
    curves = list(curves)
    if not curves:
        raise DomainError("nothing to concatenate")
    params = [curves[0].params]
    points = [curves[0].points]
    end_t = curves[0].params[-1]
    end_p = curves[0].points[-1]
    for k, c in enumerate(curves[1:], start=1):
        gap = float(np.linalg.norm(c.points[0] - end_p))
        if gap > join_tol * max(1.0, float(np.abs(end_p).max())):
            raise DomainError(f"curve {k} does not start where curve {k - 1} ends (gap {gap:.3g})")
        t = c.params - c.params[0] + end_t
        params.append(t[1:])
        points.append(c.points[1:])
        end_t, end_p = t[-1], c.points[-1]
    return SampledCurve(np.concatenate(params), np.concatenate(points), meta or {})


def diameter(points, chunk: int = 2048) -> float:
    """Largest pairwise distance.

    Candidate pairs come blockwise from Gram products of the centered
    points; the winner of each block is then measured directly, so
    cancellation in the Gram form does not leak into the result.
    """
    P = np.asarray(points, dtype=float)
    P = P - P.mean(axis=0)
    sq = np.einsum("ij,ij->i", P, P)
    best = 0.0
    for s in range(0, P.shape[0], chunk):
        B = P[s : s + chunk]
        D2 = sq[s : s + chunk, None] + sq[None, s:] - 2.0 * (B @ P[s:].T)
        i, j = np.unravel_index(int(np.argmax(D2)), D2.shape)
        best = max(best, float(np.linalg.norm(B[i] - P[s + j])))
    return best


# ---------------------------------------------------------------------------
# CSV polyline format: header ``t,x1,...,xd``, 17 significant digits, LF


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def to_csv(c: SampledCurve) -> str:
    header = ",".join(["t"] + [f"x{k + 1}" for k in range(c.dim)])
    rows = [header]
    for t, p in zip(c.params, c.points):
        rows.append(",".join([_fmt(t)] + [_fmt(x) for x in p]))
    return "\n".join(rows) + "\n"


def write_csv(c: SampledCurve, path) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(to_csv(c))
    return path


def from_csv(text: str) -> SampledCurve:
    lines = io.StringIO(text).read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CurveFormatError("empty input", line=1)
    header = [h.strip() for h in lines[0].split(",")]
    d = len(header) - 1
    if d < 1 or header[0] != "t" or header[1:] != [f"x{k + 1}" for k in range(d)]:
        raise CurveFormatError(f"expected header 't,x1,...,xd', got {lines[0]!r}", line=1)
    data = np.empty((len(lines) - 1, d + 1))
    for n, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != d + 1:
            raise CurveFormatError(f"expected {d + 1} fields, got {len(fields)}", line=n)
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise CurveFormatError(str(exc), line=n) from None
        if not all(math.isfinite(x) for x in row):
            raise CurveFormatError("non-finite value", line=n)
        data[n - 2] = row
    if data.shape[0] == 0:
        raise CurveFormatError("no samples", line=2)
    bad = np.nonzero(np.diff(data[:, 0]) <= 0)[0]
    if bad.size:
        raise CurveFormatError("parameter column is not strictly increasing", line=int(bad[0]) + 3)
    return SampledCurve(data[:, 0], data[:, 1:])


def read_csv(path) -> SampledCurve:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        text = fh.read()
    if "\r" in text:
        raise CurveFormatError("CRLF line endings are not allowed; use LF")
    return from_csv(text)
