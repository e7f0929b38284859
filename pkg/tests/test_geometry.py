import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eelkit.config import DomainError
from eelkit.geometry import (
    AxisCone,
    GeneratedCone,
    SphereNet,
    aperture_set,
    axis_cone_contains,
    axis_cone_margin,
    build_sphere_net,
    cone_aperture,
    cone_projection,
    cone_projection_cos,
    enlarge_cone,
    normalize,
    pointedness_test,
    polar_contains,
    random_unit_vectors,
    zero_in_convex_hull,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def vec_sets(d, lo=1, hi=8):
    return arrays(float, st.tuples(st.integers(lo, hi), st.just(d)), elements=finite).filter(
        lambda V: np.all(np.linalg.norm(V, axis=1) > 1e-3)
    )


def rotation(rng, d):
    Q, R = np.linalg.qr(rng.normal(size=(d, d)))
    return Q * np.sign(np.diag(R))


# ---------------------------------------------------------------- aperture


def test_aperture_of_orthogonal_pair():
    assert aperture_set([[1, 0], [0, 2]]) == pytest.approx(0.0)
    K = GeneratedCone.from_vectors([[1, 0], [0, 1]])
    assert cone_aperture(K) == pytest.approx(math.pi / 2)


def test_aperture_of_trivial_cone_raises():
    with pytest.raises(DomainError):
        cone_aperture(GeneratedCone(np.zeros((0, 2)), dim=2))


@given(vec_sets(3), st.integers(0, 2**31 - 1))
def test_aperture_rotation_invariant(V, seed):
    R = rotation(np.random.default_rng(seed), 3)
    assert aperture_set(V @ R.T) == pytest.approx(aperture_set(V), abs=1e-9)


@given(vec_sets(2, lo=2))
def test_aperture_shrinks_when_adding_directions(V):
    assert aperture_set(V) <= aperture_set(V[:-1]) + 1e-12


# ---------------------------------------------------------------- axis cones


def test_axis_cone_membership():
    C = AxisCone(np.zeros(2), [1.0, 0.0], math.pi / 4)
    assert axis_cone_contains(C, [1.0, 0.5])
    assert not axis_cone_contains(C, [0.0, 1.0])
    # the apex belongs to the open cone by convention
    assert axis_cone_contains(C, [0.0, 0.0])
    assert axis_cone_margin(C, [1.0, 1.0]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("angle", [0.0, math.pi, -0.1])
def test_axis_cone_rejects_bad_angle(angle):
    with pytest.raises(DomainError):
        AxisCone(np.zeros(2), [1.0, 0.0], angle)


def test_axis_cone_rejects_non_unit_axis():
    with pytest.raises(DomainError):
        AxisCone(np.zeros(2), [2.0, 0.0], 0.5)


# ---------------------------------------------------------------- cones


def test_generated_cone_requires_unit_generators():
    with pytest.raises(DomainError):
        GeneratedCone(np.array([[2.0, 0.0]]))
    K = GeneratedCone.from_vectors([[2.0, 0.0]])
    assert np.allclose(K.generators, [[1.0, 0.0]])


def test_generated_cone_is_read_only():
    K = GeneratedCone.from_vectors([[1.0, 1.0]])
    with pytest.raises(ValueError):
        K.generators[0, 0] = 3.0


def test_polar_cone():
    K = GeneratedCone.from_vectors([[1, 0], [0, 1]])
    assert polar_contains(K, [-1, -1])
    assert polar_contains(K, [-1, 0])
    assert not polar_contains(K, [1, -1])
    assert polar_contains(GeneratedCone(np.zeros((0, 2)), dim=2), [5, 5])


@given(vec_sets(3), arrays(float, 3, elements=finite))
def test_projection_dominates_sampled_cone(V, q):
    if np.linalg.norm(q) < 1e-3:
        return
    q = q / np.linalg.norm(q)
    K = GeneratedCone.from_vectors(V)
    cos = cone_projection_cos(K, q)
    G = K.generators
    # sample the cone: all unit nonnegative combinations over random weights
    w = np.random.default_rng(0).exponential(size=(2000, len(G)))
    U = normalize(w @ G)
    ok = np.linalg.norm(w @ G, axis=1) > 1e-9
    sampled = float((U[ok] @ q).max()) if ok.any() else -1.0
    assert cos >= max(sampled, float((G @ q).max())) - 1e-7
    assert cos <= 1 + 1e-12


def test_projection_onto_quadrant():
    K = GeneratedCone.from_vectors([[1, 0], [0, 1]])
    assert cone_projection_cos(K, normalize(np.array([1.0, 1.0]))) == pytest.approx(1.0)
    assert cone_projection_cos(K, np.array([1.0, -1.0]) / math.sqrt(2)) == pytest.approx(1 / math.sqrt(2))
    res = cone_projection(K, np.array([-1.0, -1.0]) / math.sqrt(2))
    assert res.cos == pytest.approx(-1 / math.sqrt(2))
    assert np.allclose(res.projection, 0)


@pytest.mark.parametrize("d", [2, 3, 4])
@pytest.mark.parametrize("delta", [0.05, 0.3])
def test_enlarged_cone_contains_ball(d, delta):
    rng = np.random.default_rng(d)
    K = GeneratedCone.from_vectors(rng.normal(size=(3, d)))
    E = enlarge_cone(K, delta)
    G = K.generators
    for _ in range(200):
        u = normalize(rng.exponential(size=len(G)) @ G)
        z = rng.normal(size=d)
        x = u + delta * rng.uniform() ** (1 / d) * z / np.linalg.norm(z)
        assert cone_projection_cos(E, normalize(x)) >= 1 - 1e-9


def test_enlarge_cone_domain():
    K = GeneratedCone.from_vectors([[1.0, 0.0]])
    for delta in (0.0, 1.0):
        with pytest.raises(DomainError):
            enlarge_cone(K, delta)


# ---------------------------------------------------------------- pointedness


def test_zero_in_hull():
    assert zero_in_convex_hull([[1, 0], [-1, 0]])
    assert not zero_in_convex_hull([[1, 0], [0, 1]])
    assert zero_in_convex_hull([[1, 0], [-0.5, 0.8], [-0.5, -0.8]])


@given(vec_sets(3, lo=2, hi=12))
@settings(max_examples=60)
def test_zero_in_hull_exact_and_lp_agree(V):
    V = normalize(V)
    assert zero_in_convex_hull(V, enumerate_limit=100) == zero_in_convex_hull(V, enumerate_limit=0)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_pairwise_bound_gives_half_sphere(d):
    rng = np.random.default_rng(d)
    lam = 0.9 / d
    hits = 0
    for _ in range(300):
        X = random_unit_vectors(rng, int(rng.integers(2, 8)), d)
        res = pointedness_test(X, lam)
        if res.precondition_ok:
            hits += 1
            assert res.pointed
    assert hits > 0


def test_pointedness_domain():
    with pytest.raises(DomainError):
        pointedness_test([[1.0, 0.0]], 0.5)
    res = pointedness_test([[1, 0], [-1, 0.01]], 0.3)
    assert not res.precondition_ok
    assert "fails" in res.diagnostic


# ---------------------------------------------------------------- nets


@pytest.mark.parametrize("d,eta", [(2, 0.9), (2, math.sqrt(2) / 6), (3, 0.5), (3, 0.95), (4, 0.4)])
def test_sphere_net_covers(d, eta):
    net = build_sphere_net(d, eta)
    assert net.dim == d
    assert net.validate(n_samples=20_000, seed=1) > 0


def test_sphere_net_domain():
    for args in ((1, 0.5), (2, 0.0), (2, 1.0)):
        with pytest.raises(DomainError):
            build_sphere_net(*args)
    with pytest.raises(DomainError):
        SphereNet(np.zeros((0, 2)), 0.5)


def test_projection_onto_near_antipodal_pair():
    # the pair spans the half-plane y >= 0; reaching it needs coefficients near 1e8
    K = GeneratedCone.from_vectors([[-1, 1e-8, 0], [1, 0, 0]])
    q = np.ones(3) / math.sqrt(3)
    assert cone_projection_cos(K, q) == pytest.approx(math.sqrt(2 / 3), abs=1e-7)
