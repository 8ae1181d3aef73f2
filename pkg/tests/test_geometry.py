import math

import numpy as np
from numpy.testing import assert_allclose
import pytest
from hypothesis import given, settings, strategies as st

from dfo_kit.geometry import (
    ADD,
    GOOD,
    REPLACE_BAD,
    REPLACE_FAR,
    GeometrySet,
    apply_action,
    geometry_action,
    lambda_poisedness,
    orthogonal_direction,
    orthogonal_index_set,
    shift_on_success,
)
from dfo_kit.models import GeometryError

C30, S30 = math.cos(math.pi / 6), 0.5


def gs(*cols):
    d = len(cols[0])
    return GeometrySet(d, cols, [0.0] * len(cols), 0.0)


@pytest.mark.parametrize("delta", [1e-3, 1.0, 250.0])
def test_scaled_identity_is_one_poised(delta, backend):
    rep = lambda_poisedness(GeometrySet.coordinate(3, delta, [0, 0, 0], 0), delta)
    assert rep.lam == pytest.approx(1.0, abs=1e-12)


def test_sixty_degree_set(backend):
    rep = lambda_poisedness(gs([1.0, 0.0], [0.5, math.sqrt(3) / 2]), 1.0)
    assert rep.lam == pytest.approx(2 / math.sqrt(3), abs=1e-12)
    assert_allclose(rep.coeffs[:, 0], [1.0, -1 / math.sqrt(3)], atol=1e-12)
    assert_allclose(rep.coeffs[:, 1], [0.0, 2 / math.sqrt(3)], atol=1e-12)


def test_thirty_degree_set_and_argmax(backend):
    rep = lambda_poisedness(gs([1.0, 0.0], [C30, S30]), 1.0)
    assert rep.lam == pytest.approx(2.0, abs=1e-12)
    assert rep.argmax_index == 0  # tie with index 1
    assert_allclose(rep.argmax_point, [0.5, -C30], atol=1e-12)
    # l_i*(s*) = lam
    assert rep.coeffs[:, 0] @ rep.argmax_point == pytest.approx(2.0, abs=1e-10)


def test_poisedness_errors():
    with pytest.raises(ValueError):
        lambda_poisedness(gs([1.0, 0.0]), 1.0)
    with pytest.raises(GeometryError):
        lambda_poisedness(gs([1.0, 0.0], [2.0, 0.0]), 1.0)


@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_poisedness_matches_brute_force(d):
    rng = np.random.default_rng(d)
    Y = rng.standard_normal((d, d))
    Y /= np.linalg.norm(Y, axis=0).max()
    rep = lambda_poisedness(GeometrySet(d, list(Y.T), np.zeros(d), 0.0), 1.0)
    U = rng.standard_normal((10_000, d))
    U *= (rng.random(10_000) ** (1 / d) / np.linalg.norm(U, axis=1))[:, None]
    brute = np.abs(U @ rep.coeffs).max()
    assert brute <= rep.lam * (1 + 1e-12)
    assert brute >= rep.lam * (0.9 if d <= 2 else 0.75)


def test_action_add():
    act = geometry_action(gs([1.0, 0.0]), 1.0, 1.5, np.array([0.0, 0.8]))
    assert act.kind == ADD and not act.needs_eval
    assert_allclose(act.point, [0.0, 0.8])


def test_action_add_substitutes_degenerate_trial():
    act = geometry_action(gs([1.0, 0.0]), 1.0, 1.5, np.zeros(2))
    assert act.kind == ADD and act.needs_eval
    assert_allclose(act.point, [0.0, 1.0], atol=1e-12)
    act = geometry_action(gs([1.0, 0.0]), 1.0, 1.5, np.array([0.5, 0.0]))
    assert act.needs_eval and abs(act.point @ [1.0, 0.0]) < 1e-12


def test_action_replace_far():
    act = geometry_action(gs([0.6, 0.0], [0.0, 2.0]), 1.0, 1.5, np.array([-0.3, 0.4]))
    assert act.kind == REPLACE_FAR and act.index == 1
    assert_allclose(act.point, [-0.3, 0.4])


def test_action_replace_bad():
    act = geometry_action(gs([1.0, 0.0], [C30, S30]), 1.0, 1.5, np.array([0.1, 0.0]))
    assert act.kind == REPLACE_BAD and act.index == 0 and act.needs_eval
    assert_allclose(act.point, [0.5, -C30], atol=1e-12)
    assert act.lam == pytest.approx(2.0)


def test_action_good():
    act = geometry_action(GeometrySet.coordinate(2, 1.0, [0, 0], 0), 1.0, 1.5, np.array([0.1, 0.0]))
    assert act.kind == GOOD and act.lam == pytest.approx(1.0)


def test_apply_action_requires_value():
    g = gs([1.0, 0.0])
    act = geometry_action(g, 1.0, 1.5, np.array([0.0, 1.0]))
    with pytest.raises(ValueError):
        apply_action(g, act)
    apply_action(g, act, 7.0)
    assert len(g) == 2 and g.values[-1] == 7.0


def test_shift_examples():
    g = GeometrySet(2, [[1.0, 0.0]], [5.0], 3.0)
    out = shift_on_success(g, np.array([0.0, 1.0]), 1.0)
    assert len(out) == 1
    assert_allclose(out.points[0], [0.0, -1.0])
    assert out.values == [3.0] and out.center_value == 1.0

    s = np.array([0.2, -0.1])
    out = shift_on_success(GeometrySet(2, [], [], 3.0), s, 1.0)
    assert_allclose(out.points[0], -s)

    a, b = np.array([2.0, 0.0]), np.array([0.0, 1.0])
    out = shift_on_success(GeometrySet(2, [a, b], [4.0, 5.0], 3.0), s, 1.0)
    assert_allclose(out.points[0], b - s)
    assert_allclose(out.points[1], -s)
    assert out.values == [5.0, 3.0]


def test_geometry_set_invariants():
    with pytest.raises(ValueError):
        GeometrySet(2, [[1.0, 0.0]], [], 0.0)
    with pytest.raises(ValueError):
        GeometrySet(1, [[1.0], [2.0]], [0, 0], 0.0)
    g = GeometrySet(2, [[1.0, 0.0], [0.0, 3.0]], [0, 0], 0)
    assert g.furthest() == 1
    assert GeometrySet(2, [[3.0, 0.0], [0.0, 3.0]], [0, 0], 0).furthest() == 0


def test_orthogonal_direction():
    u = orthogonal_direction(np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]), 3)
    assert_allclose(u, [0.0, 0.0, 1.0], atol=1e-12)
    assert_allclose(orthogonal_direction(np.zeros((2, 0)), 2), [1.0, 0.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 10), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_replace_bad_point_is_orthogonal_and_grows_index_set(d, seed, delta):
    rng = np.random.default_rng(seed)
    Y = rng.standard_normal((d, d))
    Y *= delta * rng.uniform(0.3, 1.0, d) / np.linalg.norm(Y, axis=0)
    g = GeometrySet(d, list(Y.T), np.zeros(d), 0.0)
    if np.linalg.cond(Y) > 1e6:
        return
    before = len(orthogonal_index_set(g, delta))
    act = geometry_action(g, delta, 1 + 1e-8, np.zeros(d))
    if act.kind == GOOD:
        return
    assert act.kind == REPLACE_BAD
    assert np.linalg.norm(act.point) == pytest.approx(delta, rel=1e-12)
    for j, y in enumerate(g.points):
        if j != act.index:
            assert abs(y @ act.point) <= 1e-9 * delta * np.linalg.norm(y)
    apply_action(g, act, 0.0)
    assert len(orthogonal_index_set(g, delta)) > before


def test_full_orthogonal_index_set_is_one_poised():
    Q = np.linalg.qr(np.random.default_rng(0).standard_normal((5, 5)))[0] * 0.3
    g = GeometrySet(5, list(Q.T), np.zeros(5), 0.0)
    assert orthogonal_index_set(g, 0.3) == list(range(5))
    assert lambda_poisedness(g, 0.3).lam == pytest.approx(1.0, abs=1e-12)
