import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from eelkit.config import DegenerateSampleError, DomainError
from eelkit.curve import (
    CurveFormatError,
    SampledCurve,
    backward_secant,
    concatenate,
    cumulative_length,
    diameter,
    forward_secant,
    forward_secants,
    from_csv,
    initial_cone,
    polyline_length,
    read_csv,
    reverse,
    to_csv,
    write_csv,
)

coords = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@st.composite
def curves(draw, min_size=2, max_size=30):
    d = draw(st.integers(1, 4))
    n = draw(st.integers(min_size, max_size))
    P = draw(arrays(float, (n, d), elements=coords))
    gaps = draw(arrays(float, n, elements=st.floats(1e-3, 10)))
    return SampledCurve(np.cumsum(gaps), P)


def test_construction_validates():
    with pytest.raises(DomainError):
        SampledCurve([0, 0], [[0, 0], [1, 1]])
    with pytest.raises(DomainError):
        SampledCurve([0, 1], [[0, 0]])
    with pytest.raises(DomainError):
        SampledCurve([], np.zeros((0, 2)))
    with pytest.raises(DomainError):
        SampledCurve([0, 1], [[0, np.nan], [1, 1]])
    c = SampledCurve([0, 1, 2], [0.0, 1.0, 3.0])
    assert c.dim == 1 and c.m == 2 and len(c) == 3


def test_samples_are_read_only():
    c = SampledCurve([0, 1], [[0, 0], [1, 1]])
    with pytest.raises(ValueError):
        c.points[0, 0] = 1.0


def test_injectivity():
    c = SampledCurve([0, 1, 2], [[0, 0], [1, 0], [0, 0]])
    assert not c.is_injective()
    with pytest.raises(DegenerateSampleError):
        c.require_injective()


def test_length_of_square():
    c = SampledCurve(range(5), [[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]])
    assert polyline_length(c) == pytest.approx(4.0)
    assert polyline_length(c, 1, 3) == pytest.approx(2.0)
    assert cumulative_length(c)[-1] == pytest.approx(4.0)
    with pytest.raises(DomainError):
        polyline_length(c, 3, 1)


@given(curves())
def test_length_at_least_chord_and_additive(c):
    L = polyline_length(c)
    assert L >= np.linalg.norm(c.points[-1] - c.points[0]) - 1e-9
    k = c.m // 2
    assert polyline_length(c, 0, k) + polyline_length(c, k, c.m) == pytest.approx(L, rel=1e-12, abs=1e-9)


@given(curves())
def test_reverse_is_involution(c):
    r = reverse(reverse(c))
    assert np.array_equal(r.points, c.points)
    assert np.allclose(r.params, c.params)
    assert polyline_length(reverse(c)) == pytest.approx(polyline_length(c))


def test_secants():
    c = SampledCurve([0, 1, 2], [[0, 0], [2, 0], [2, 3]])
    assert np.allclose(forward_secant(c, 0), [1, 0])
    assert np.allclose(backward_secant(c, 2), [0, -1])
    assert np.allclose(forward_secants(c), [[1, 0], [0, 1]])
    with pytest.raises(DomainError):
        forward_secant(c, 2)
    with pytest.raises(DomainError):
        backward_secant(c, 0)
    dup = SampledCurve([0, 1, 2], [[0, 0], [0, 0], [1, 0]])
    with pytest.raises(DegenerateSampleError):
        forward_secants(dup)


def test_averaged_secants_are_unit():
    t = np.linspace(0, 3, 40)
    c = SampledCurve(t, np.column_stack([np.cos(t), np.sin(t)]))
    Q = forward_secants(c, steps=3)
    assert np.allclose(np.linalg.norm(Q, axis=1), 1)
    assert np.allclose(Q[-1], forward_secants(c)[-1])


def test_initial_cone():
    c = SampledCurve(range(4), [[0, 0], [1, 0], [0, 0.5], [2, 2]])
    assert initial_cone(c, 0).is_trivial
    K = initial_cone(c, 3)
    assert len(K) == 3
    assert np.allclose(np.linalg.norm(K.generators, axis=1), 1)


def test_concatenate():
    a = SampledCurve([0, 1], [[0, 0], [1, 0]])
    b = SampledCurve([5, 6, 7], [[1, 0], [1, 1], [1, 2]])
    c = concatenate([a, b])
    assert len(c) == 4
    assert np.allclose(c.params, [0, 1, 2, 3])
    with pytest.raises(DomainError):
        concatenate([a, SampledCurve([0, 1], [[2, 0], [3, 0]])])
    with pytest.raises(DomainError):
        concatenate([])


@given(arrays(float, st.tuples(st.integers(1, 40), st.integers(1, 4)), elements=coords))
@settings(max_examples=50)
def test_diameter_matches_pairwise(P):
    brute = max(np.linalg.norm(p - q) for p in P for q in P)
    assert diameter(P, chunk=7) == pytest.approx(brute, rel=1e-9, abs=1e-6)


@given(curves())
def test_csv_round_trip_is_bit_exact(c):
    back = from_csv(to_csv(c))
    assert np.array_equal(back.params, c.params)
    assert np.array_equal(back.points, c.points)


def test_csv_file_round_trip(tmp_path):
    c = SampledCurve([0.1, 0.2], [[math.pi, 1 / 3], [2.0, -1e-300]])
    path = write_csv(c, tmp_path / "c.csv")
    assert path.read_bytes().startswith(b"t,x1,x2\n")
    back = read_csv(path)
    assert np.array_equal(back.points, c.points)


@pytest.mark.parametrize(
    "text,line",
    [
        ("", 1),
        ("s,x1\n0,1\n", 1),
        ("t,x1\n0,1,2\n", 2),
        ("t,x1\n0,abc\n", 2),
        ("t,x1\n0,inf\n", 2),
        ("t,x1\n", 2),
        ("t,x1\n0,1\n1,2\n1,3\n", 4),
    ],
)
def test_csv_errors_report_line(text, line):
    with pytest.raises(CurveFormatError) as exc:
        from_csv(text)
    assert exc.value.line == line


def test_crlf_rejected(tmp_path):
    p = tmp_path / "c.csv"
    p.write_bytes(b"t,x1\r\n0,1\r\n")
    with pytest.raises(CurveFormatError):
        read_csv(p)


@given(curves(min_size=3))
def test_reversed_forward_secant_is_negated_backward(c):
    if not np.all(np.linalg.norm(np.diff(c.points, axis=0), axis=1) > 0):
        return
    r = reverse(c)
    for i in range(1, c.m):
        # forward at mirrored index i runs from c's sample m-i to m-i-1
        assert np.allclose(forward_secant(r, i), backward_secant(c, c.m - i))
        assert np.allclose(forward_secant(r, c.m - 1 - i), -forward_secant(c, i))


def test_helix_arclength():
    from eelkit import helix

    c = helix(1.0, 0.47, 0.0, 2 * math.pi, 1e-3)
    assert polyline_length(c) == pytest.approx(2 * math.pi * math.sqrt(1 + 0.47**2), abs=1e-2)
    assert polyline_length(c) == pytest.approx(6.9423, abs=1e-2)
