import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from corpus import build_corpus
from eelkit import SampledCurve, build_sphere_net, find_min_lambda, helix, polyline_length
from eelkit.config import DomainError, PreconditionError
from eelkit.rectifiability import (
    check_width_increments,
    length_bound,
    repulsion_constants,
    verify_length_bound,
    width_profile,
    widths_to_csv,
    write_widths_csv,
)


def test_repulsion_constants():
    k = repulsion_constants(0.0, 2)
    assert k.delta == pytest.approx(math.sqrt(2))
    assert k.eta == pytest.approx(math.sqrt(2) / 6)
    with pytest.raises(DomainError):
        repulsion_constants(0.5, 2)
    with pytest.raises(DomainError):
        repulsion_constants(0.0, 1)
    with pytest.raises(DomainError):
        repulsion_constants(-1.5, 3)


def test_length_bound_values():
    assert length_bound(0.0, 2, 1.0) == pytest.approx(12.727922061357857)
    assert length_bound(-1.0, 3, 1.0) == pytest.approx(36.0)
    assert length_bound(0.0, 2, 3.0) == pytest.approx(3 * length_bound(0.0, 2, 1.0))
    with pytest.raises(DomainError):
        length_bound(0.0, 2, 0.0)


@given(st.floats(-1, 0.49), st.floats(-1, 0.49))
@settings(max_examples=30, deadline=None)
def test_length_bound_grows_with_lambda(a, b):
    lo, hi = sorted((a, b))
    assert length_bound(lo, 2, 1.0) <= length_bound(hi, 2, 1.0) + 1e-9


def test_width_profile_of_segment():
    c = SampledCurve(range(3), [[0, 0], [1, 0], [2, 0]])
    net = build_sphere_net(2, 0.5)
    prof = width_profile(c, net)
    assert np.allclose(prof.total, prof.total[-1] * np.array([0, 0.5, 1]))
    assert np.all(np.diff(prof.total) >= 0)


def test_width_profile_dimension_mismatch():
    c = SampledCurve(range(2), [[0, 0, 0], [1, 0, 0]])
    with pytest.raises(DomainError):
        width_profile(c, build_sphere_net(2, 0.5))


@pytest.mark.parametrize("n", [0, 15, 40, 60])
def test_width_increments_match_brute_force(n):
    c = build_corpus()[n]
    if len(c) > 40:
        c = c.subcurve(0, 39)
    net = build_sphere_net(c.dim, 0.4)
    rep = check_width_increments(c, width_profile(c, net))
    ref = oracles.width_increment_margin(c.points, net.directions, 0.4)
    assert rep.worst_margin == pytest.approx(ref, abs=1e-9)


def test_width_increments_can_fail():
    # going back over covered ground adds no width
    c = SampledCurve(range(3), [[0, 0], [1, 0], [0.5, 0]])
    rep = check_width_increments(c, width_profile(c, build_sphere_net(2, 0.5)))
    assert not rep.passed
    assert rep.witness == (1, 2)


def test_verify_length_bound_on_helix():
    c = helix(1.0, 0.4661, 0.0, 2 * math.pi, 0.05)
    rep = verify_length_bound(c, 0.0)
    assert rep.passed and rep.slack > 0
    assert rep.length == pytest.approx(polyline_length(c))
    d = rep.to_dict()
    assert d["net_size"] == rep.net_size and d["passed"]


def test_verify_length_bound_refuses_non_lambda_curves():
    c = SampledCurve(range(4), [[0, 0], [2, 0], [1, 0.1], [3, 0.2]])
    with pytest.raises(PreconditionError) as exc:
        verify_length_bound(c, 0.0)
    assert not exc.value.diagnostic.passed
    # without the precheck the comparison still runs
    assert verify_length_bound(c, 0.0, precheck=False).bound > 0


def test_verify_length_bound_dimension():
    c = SampledCurve(range(3), [[0, 0], [1, 0], [2, 0]])
    with pytest.raises(DomainError):
        verify_length_bound(c, 0.0, d=3)


def test_width_increments_for_lambda_curves():
    checked = 0
    for c in build_corpus():
        lam = find_min_lambda(c, "lambda_curve", tol=0.0)
        if not lam < 1 / c.dim:
            continue
        k = repulsion_constants(lam, c.dim)
        prof = width_profile(c, build_sphere_net(c.dim, k.eta))
        assert check_width_increments(c, prof).passed
        assert prof.total[-1] <= len(prof.net) * verify_length_bound(c, lam, precheck=False).diameter + 1e-9
        checked += 1
    assert checked > 50


def test_widths_csv(tmp_path):
    c = helix(1.0, 0.4661, 0.0, 1.0, 0.5)
    prof = width_profile(c, build_sphere_net(3, 0.5))
    text = widths_to_csv(prof)
    lines = text.splitlines()
    assert lines[0].startswith("t,W_1,") and lines[0].endswith(",W_F")
    assert len(lines) == len(c) + 1
    path = write_widths_csv(prof, tmp_path / "w.csv")
    assert path.read_text() == text
