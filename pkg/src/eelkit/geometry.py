"""Vector, cone and spherical-net primitives.

Conventions
-----------
Points and directions are plain ``numpy`` arrays of shape ``(d,)``; lists of
directions are arrays of shape ``(k, d)``. Cone objects are small frozen
dataclasses holding read-only arrays.

Strict inequalities cannot be realized in floating point, so every boolean
test here comes with a ``*_margin`` companion returning the signed slack,
and the boolean form compares that slack against an explicit ``tol``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, lsq_linear, nnls

from .config import DEFAULT_TOL, UNIT_TOL, DomainError

__all__ = [
    "as_point",
    "as_unit",
    "normalize",
    "AxisCone",
    "GeneratedCone",
    "SphereNet",
    "PointednessResult",
    "ConeProjection",
    "aperture_set",
    "cone_aperture",
    "axis_cone_margin",
    "axis_cone_contains",
    "polar_margin",
    "polar_contains",
    "enlarge_cone",
    "cone_projection",
    "cone_projection_cos",
    "zero_in_convex_hull",
    "pointedness_test",
    "build_sphere_net",
    "random_unit_vectors",
]


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def as_point(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 1:
        raise DomainError(f"a point must be a nonempty 1-D vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise DomainError("point coordinates must be finite")
    return p


def as_unit(v, unit_tol: float = UNIT_TOL) -> np.ndarray:
    """Validate that ``v`` has unit Euclidean norm up to ``unit_tol``."""
    v = as_point(v)
    if abs(np.linalg.norm(v) - 1.0) > unit_tol:
        raise DomainError(f"expected a unit vector, got norm {np.linalg.norm(v)!r}")
    return v


def normalize(v, axis: int = -1) -> np.ndarray:
    """Scale vectors to unit length. Zero vectors raise."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=axis, keepdims=True)
    if np.any(n == 0):
        raise DomainError("cannot normalize a zero vector")
    return v / n


def _directions(S) -> np.ndarray:
    S = np.asarray(S, dtype=float)
    if S.ndim == 1:
        S = S[None, :]
    return S


# ---------------------------------------------------------------------------
# aperture


def aperture_set(S) -> float:
    """Infimum of ``<u1, u2>`` over all ordered pairs of ``S`` (self-pairs included)."""
    S = _directions(S)
    if S.shape[0] == 0:
        raise DomainError("aperture of an empty set is undefined")
    gram = S @ S.T
    return float(min(gram.min(), 1.0))


def cone_aperture(K: "GeneratedCone") -> float:
    """Angular aperture (radians) of the generator set of ``K``.

    This is the aperture of the generators, not of the full cone; for
    finitely generated cones in dimension >= 3 the two can differ.
    """
    if K.is_trivial:
        raise DomainError("aperture of the trivial cone {0} is undefined")
    return float(math.acos(max(-1.0, min(1.0, aperture_set(K.generators)))))


# ---------------------------------------------------------------------------
# open cones C_x(v, alpha)


@dataclass(frozen=True)
class AxisCone:
    """Open cone ``apex + {u : <u, axis> > ||u|| cos(half_angle)} ∪ {apex}``."""

    apex: np.ndarray
    axis: np.ndarray
    half_angle: float

    def __post_init__(self):
        apex = as_point(self.apex)
        axis = as_unit(self.axis, unit_tol=1e-9)
        if apex.shape != axis.shape:
            raise DomainError("apex and axis must share a dimension")
        if not 0.0 < self.half_angle < math.pi:
            raise DomainError(f"half_angle must lie in (0, pi), got {self.half_angle}")
        object.__setattr__(self, "apex", _frozen(apex))
        object.__setattr__(self, "axis", _frozen(axis))

    @property
    def dim(self) -> int:
        return self.apex.shape[0]


def axis_cone_margin(C: AxisCone, p) -> float:
    """Normalized slack ``<u, axis>/||u|| - cos(alpha)`` with ``u = p - apex``.

    Positive means strictly inside. The apex itself returns ``+inf``.
    """
    u = as_point(p) - C.apex
    n = np.linalg.norm(u)
    if n == 0.0:
        return math.inf
    return float(u @ C.axis / n - math.cos(C.half_angle))


def axis_cone_contains(C: AxisCone, p, tol: float = DEFAULT_TOL) -> bool:
    """Membership in the open cone; a point counts as inside only if its
    normalized margin exceeds ``tol`` (or it is within ``tol`` of the apex)."""
    u = as_point(p) - C.apex
    if np.linalg.norm(u) <= tol:
        return True
    return axis_cone_margin(C, p) > tol


# ---------------------------------------------------------------------------
# finitely generated cones


@dataclass(frozen=True)
class GeneratedCone:
    """Closed convex cone of nonnegative combinations of unit generators.

    An empty generator list stands for ``{0}``; ``dim`` must then be given.
    """

    generators: np.ndarray
    dim: int | None = None

    def __post_init__(self):
        G = np.asarray(self.generators, dtype=float)
        if G.size == 0:
            if self.dim is None:
                raise DomainError("an empty cone needs an explicit dimension")
            G = np.zeros((0, self.dim))
        G = _directions(G)
        dim = G.shape[1] if self.dim is None else self.dim
        if G.shape[1] != dim:
            raise DomainError("generator dimension does not match dim")
        norms = np.linalg.norm(G, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise DomainError("cone generators must be unit vectors")
        object.__setattr__(self, "generators", _frozen(G))
        object.__setattr__(self, "dim", int(dim))

    @classmethod
    def from_vectors(cls, V, dim: int | None = None) -> "GeneratedCone":
        """Build from arbitrary nonzero vectors (normalized here)."""
        V = np.asarray(V, dtype=float)
        if V.size == 0:
            return cls(np.zeros((0, dim or 0)), dim=dim)
        return cls(normalize(_directions(V)), dim=dim)

    @property
    def is_trivial(self) -> bool:
        return self.generators.shape[0] == 0

    def __len__(self) -> int:
        return self.generators.shape[0]


def polar_margin(K: GeneratedCone, v) -> float:
    """``-max_g <v, g>``; nonnegative iff ``v`` lies in the polar cone."""
    if K.is_trivial:
        return math.inf
    return float(-(K.generators @ as_point(v)).max())


def polar_contains(K: GeneratedCone, v, tol: float = DEFAULT_TOL) -> bool:
    """``v ∈ K°`` i.e. ``<v, g> <= tol`` for every generator."""
    return polar_margin(K, v) >= -tol


def _orthonormal_complement(g: np.ndarray) -> np.ndarray:
    """Rows spanning the hyperplane orthogonal to unit ``g``."""
    d = g.shape[0]
    # QR of [g | I] gives an orthonormal basis whose first column is ±g
    q, _ = np.linalg.qr(np.column_stack([g, np.eye(d)]))
    return q[:, 1:d].T


def enlarge_cone(K: GeneratedCone, delta: float, density: float | None = None) -> GeneratedCone:
    """Finitely generated cone containing ``(K ∩ S^{d-1}) + B_delta``.

    Each generator ``g`` is replaced by directions circumscribing the circular
    cone of half-angle ``asin(delta)`` around ``g`` (the conic hull of
    ``g + B_delta``). Since any unit element of ``K`` plus a ``delta`` ball is
    a nonnegative combination of such balls, containment carries over to all
    of ``K``. In the plane this is exact: two tangent directions per generator.
    In dimension 3 a circumscribed polygon with edge spacing at most
    ``density`` (default ``delta/2``) is used, and above that a circumscribed
    hypercube.
    """
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if K.is_trivial:
        raise DomainError("cannot enlarge the trivial cone")
    d = K.dim
    beta = math.asin(delta)
    density = delta / 2 if density is None else density
    out = []
    for g in K.generators:
        if d == 1:
            out.append(g)
            continue
        basis = _orthonormal_complement(g)
        if d == 2:
            t = math.tan(beta)
            offsets = np.array([[t], [-t]])
        elif d == 3:
            # circumscribed regular m-gon around the circle of radius tan(beta)
            m = max(8, math.ceil(2 * math.pi * math.sin(beta) / density))
            rad = math.tan(beta) / math.cos(math.pi / m)
            ang = 2 * math.pi * np.arange(m) / m
            offsets = rad * np.column_stack([np.cos(ang), np.sin(ang)])
        else:
            t = math.tan(beta)
            offsets = t * np.array(list(itertools.product((-1.0, 1.0), repeat=d - 1)))
        dirs = g[None, :] + offsets @ basis
        out.append(normalize(dirs))
    return GeneratedCone(np.vstack(out), dim=d)


# ---------------------------------------------------------------------------
# conic projection


@dataclass(frozen=True)
class ConeProjection:
    cos: float
    projection: np.ndarray
    converged: bool


def _kkt_ok(G: np.ndarray, q: np.ndarray, coef: np.ndarray, tol: float = 1e-10) -> bool:
    """Optimality of ``coef`` for ``min ||G^T x - q||, x >= 0``: the residual
    has no ascent direction along any generator and is orthogonal to the
    active ones. Rounding in the residual grows with the coefficient mass, so
    the tolerance does too."""
    grad = G @ (q - G.T @ coef)
    tol = tol * max(1.0, float(np.abs(coef).sum()))
    return bool(np.all(grad <= tol) and np.all(np.abs(grad[coef > 0]) <= tol))


def _refine_face(G: np.ndarray, q: np.ndarray, coef: np.ndarray) -> np.ndarray:
    """Grow the active face while the residual still leans on a generator.

    NNLS tolerances are absolute in the coefficients, so faces whose
    projection needs huge coefficients (near-antipodal generators spanning a
    half-space) are missed. Here each candidate face is projected through an
    orthonormal basis, which is insensitive to coefficient size, and kept only
    if its coefficients are nonnegative.
    """
    active = coef > 0
    best = G.T @ coef
    if active.any():
        face = _face_projection(G[active], q)
        if face is not None and np.linalg.norm(q - face) <= np.linalg.norm(q - best):
            best = face
    for _ in range(G.shape[1]):
        r = q - best
        rn = np.linalg.norm(r)
        if rn <= 1e-15:
            break
        pull = np.where(active, -np.inf, G @ r / rn)
        i = int(np.argmax(pull))
        if pull[i] <= 1e-12:
            break
        trial = active.copy()
        trial[i] = True
        p = _face_projection(G[trial], q)
        if p is None or np.linalg.norm(q - p) >= rn:
            break
        active, best = trial, p
    return best


def _face_projection(F: np.ndarray, q: np.ndarray) -> np.ndarray | None:
    """Projection of ``q`` onto span of the rows of ``F`` if it lies in their
    cone, else None. Rank-deficient faces are rejected."""
    if F.shape[0] > F.shape[1]:
        return None
    Qb, R = np.linalg.qr(F.T)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag.min() <= 1e-14 * diag.max():
        return None
    x = np.linalg.solve(R, Qb.T @ q)
    if np.any(x < 0):
        return None
    return Qb @ (Qb.T @ q)


def cone_projection(K: GeneratedCone, q, maxiter: int | None = None, atol: float = 1e-12) -> ConeProjection:
    """Largest ``<q, u>`` over unit ``u`` in ``K``, with the projection of ``q``.

    The Euclidean projection ``P`` of ``q`` onto ``K`` is obtained by
    nonnegative least squares on the generator matrix. When ``P != 0`` the
    maximum equals ``||P||`` (for unit ``q``); when ``P = 0`` every generator
    has ``<q, g> <= 0`` and the maximum is attained at a generator. If the
    active-set iteration does not converge the generator maximum is returned
    with ``converged=False``.
    """
    if K.is_trivial:
        raise DomainError("projection onto the trivial cone is undefined")
    q = as_point(q)
    G = K.generators
    gen_max = float((G @ q).max())
    if gen_max <= 0.0:
        return ConeProjection(gen_max, np.zeros_like(q), True)
    maxiter = 100 * G.shape[0] if maxiter is None else maxiter
    try:
        coef, _ = nnls(G.T, q, maxiter=maxiter, atol=atol)
    except RuntimeError:
        coef = None
    if coef is None or not _kkt_ok(G, q, coef):
        # some scipy releases return a non-optimal nnls point while reporting
        # a zero residual; bounded-variable least squares is slower but sound
        res = lsq_linear(G.T, q, bounds=(0.0, np.inf), method="bvls", tol=1e-14)
        coef = np.maximum(res.x, 0.0)
        if not _kkt_ok(G, q, coef, 1e-8):
            return ConeProjection(gen_max, np.zeros_like(q), False)
    p = _refine_face(G, q, coef)
    pn = float(np.linalg.norm(p))
    if pn <= atol:
        return ConeProjection(gen_max, p, True)
    cos = float(q @ p / pn)
    # the projection can only improve on the best generator
    return ConeProjection(max(cos, gen_max), p, True)


def cone_projection_cos(K: GeneratedCone, q) -> float:
    return cone_projection(K, q).cos


# ---------------------------------------------------------------------------
# pointedness (0 in conv Sigma?)


def _zero_in_hull_enumerate(X: np.ndarray, tol: float) -> bool:
    k, d = X.shape
    for size in range(1, min(k, d + 1) + 1):
        for idx in itertools.combinations(range(k), size):
            P = X[list(idx)]
            A = np.vstack([P.T, np.ones(size)])
            if np.linalg.matrix_rank(A, tol=1e-10) < size:
                continue
            b = np.zeros(d + 1)
            b[-1] = 1.0
            w, *_ = np.linalg.lstsq(A, b, rcond=None)
            if np.all(w >= -tol) and np.linalg.norm(A @ w - b) <= 1e-9:
                return True
    return False


def _zero_in_hull_lp(X: np.ndarray) -> bool:
    k, d = X.shape
    A_eq = np.vstack([X.T, np.ones(k)])
    b_eq = np.zeros(d + 1)
    b_eq[-1] = 1.0
    res = linprog(np.zeros(k), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * k, method="highs")
    return res.status == 0


def zero_in_convex_hull(X, tol: float = 1e-12, enumerate_limit: int = 12) -> bool:
    """Decide ``0 ∈ conv(X)``.

    Up to ``enumerate_limit`` points the decision is exact: every affinely
    independent subset of size at most ``d + 1`` (Carathéodory) is solved for
    barycentric weights. Larger sets go through a feasibility LP.
    """
    X = _directions(X)
    if X.shape[0] == 0:
        return False
    if X.shape[0] <= enumerate_limit:
        return _zero_in_hull_enumerate(X, tol)
    return _zero_in_hull_lp(X)


@dataclass(frozen=True)
class PointednessResult:
    """``pointed`` is ``0 ∉ conv(Sigma)``; ``precondition_ok`` tells whether
    every pair satisfied ``<x, x'> >= -lambda``."""

    pointed: bool
    precondition_ok: bool
    min_inner: float
    diagnostic: str


def pointedness_test(Sigma, lam: float, d: int | None = None, tol: float = DEFAULT_TOL) -> PointednessResult:
    """Is ``Sigma`` contained in an open half-sphere?

    When all pairwise inner products are at least ``-lam`` and
    ``lam < 1/d`` this must come out true. A failing pairwise bound is
    reported through ``precondition_ok`` rather than raised.
    """
    X = _directions(Sigma)
    if X.shape[0] == 0:
        raise DomainError("Sigma must be nonempty")
    d = X.shape[1] if d is None else d
    if d < 2:
        raise DomainError("dimension must be at least 2")
    if not lam < 1.0 / d:
        raise DomainError(f"lambda = {lam} violates lambda < 1/d = {1.0 / d}")
    min_inner = aperture_set(X)
    ok = min_inner >= -lam - tol
    pointed = not zero_in_convex_hull(X)
    if ok:
        diag = "pairwise bound holds"
    else:
        diag = f"pairwise bound fails: min <x, x'> = {min_inner:.6g} < -lambda = {-lam:.6g}"
    return PointednessResult(pointed, ok, min_inner, diag)


# ---------------------------------------------------------------------------
# eta-nets on the sphere


@dataclass(frozen=True)
class SphereNet:
    """Finite direction set with ``max_i <v, xi_i> > eta`` for every unit ``v``."""

    directions: np.ndarray
    eta: float

    def __post_init__(self):
        D = _directions(self.directions)
        if D.shape[0] == 0:
            raise DomainError("a net needs at least one direction")
        if not 0.0 < self.eta < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {self.eta}")
        object.__setattr__(self, "directions", _frozen(normalize(D)))

    @property
    def dim(self) -> int:
        return self.directions.shape[1]

    def __len__(self) -> int:
        return self.directions.shape[0]

    def coverage(self, V) -> np.ndarray:
        """Best inner product with the net, per row of ``V``."""
        return (_directions(V) @ self.directions.T).max(axis=1)

    def validate(self, n_samples: int = 100_000, seed: int = 0) -> float:
        """Worst ``max_i <v, xi_i> - eta`` over random unit ``v`` (positive = covered)."""
        rng = np.random.default_rng(seed)
        worst = math.inf
        for start in range(0, n_samples, 20_000):
            V = random_unit_vectors(rng, min(20_000, n_samples - start), self.dim)
            worst = min(worst, float(self.coverage(V).min()))
        return worst - self.eta


def random_unit_vectors(rng: np.random.Generator, n: int, d: int) -> np.ndarray:
    V = rng.standard_normal((n, d))
    return V / np.linalg.norm(V, axis=1, keepdims=True)


def _icosahedron():
    p = (1 + math.sqrt(5)) / 2
    V = np.array(
        [[-1, p, 0], [1, p, 0], [-1, -p, 0], [1, -p, 0],
         [0, -1, p], [0, 1, p], [0, -1, -p], [0, 1, -p],
         [p, 0, -1], [p, 0, 1], [-p, 0, -1], [-p, 0, 1]],
        dtype=float,
    )
    F = np.array(
        [[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
         [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
         [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
         [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]]
    )
    return normalize(V), F


def _subdivide(V: np.ndarray, F: np.ndarray):
    verts = [v for v in V]
    cache: dict[tuple[int, int], int] = {}

    def mid(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            m = verts[a] + verts[b]
            verts.append(m / np.linalg.norm(m))
            cache[key] = len(verts) - 1
        return cache[key]

    out = []
    for a, b, c in F:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        out += [[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]
    return np.array(verts), np.array(out)


def _covering_angle(V: np.ndarray, F: np.ndarray) -> float:
    """Largest spherical circumradius over the faces of a triangulated sphere."""
    A, B, C = V[F[:, 0]], V[F[:, 1]], V[F[:, 2]]
    n = np.cross(B - A, C - A)
    n /= np.linalg.norm(n, axis=1, keepdims=True)
    n *= np.sign(np.einsum("ij,ij->i", n, A + B + C))[:, None]
    return float(np.arccos(np.clip(np.einsum("ij,ij->i", n, A), -1, 1)).max())


def _circle_net(eta: float) -> np.ndarray:
    # worst nearest-direction angle of K equispaced directions is pi / K
    K = math.floor(math.pi / math.acos(eta)) + 1
    ang = 2 * math.pi * np.arange(K) / K
    return np.column_stack([np.cos(ang), np.sin(ang)])


def _icosphere_net(eta: float) -> np.ndarray:
    V, F = _icosahedron()
    target = math.acos(eta)
    while _covering_angle(V, F) >= target:
        V, F = _subdivide(V, F)
    return V


def _cube_grid_net(d: int, eta: float) -> np.ndarray:
    # a cube-face point w has ||w|| >= 1, so a grid point within distance
    # h*sqrt(d-1)/2 of it is within angle asin(h*sqrt(d-1)/2)
    limit = math.sqrt(1 - eta * eta)
    K = 2
    while (2 / (K - 1)) * math.sqrt(d - 1) / 2 >= limit:
        K += 1
    ticks = np.linspace(-1.0, 1.0, K)
    pts = []
    for axis in range(d):
        for sign in (-1.0, 1.0):
            for rest in itertools.product(ticks, repeat=d - 1):
                p = list(rest)
                p.insert(axis, sign)
                pts.append(p)
    P = np.unique(np.array(pts), axis=0)
    return normalize(P)


def build_sphere_net(d: int, eta: float) -> SphereNet:
    """Directions such that every unit vector has inner product > ``eta`` with one of them.

    ``d = 2``: equally spaced directions; ``d = 3``: icosphere vertices,
    subdivided until the spherical covering radius drops below
    ``acos(eta)``; ``d >= 4``: normalized grid on the faces of the cube.
    """
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    if d < 2:
        raise DomainError(f"dimension must be at least 2, got {d}")
    if d == 2:
        D = _circle_net(eta)
    elif d == 3:
        D = _icosphere_net(eta)
    else:
        D = _cube_grid_net(d, eta)
    return SphereNet(D, eta)
