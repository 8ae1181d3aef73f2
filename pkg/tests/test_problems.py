import math

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal
import pytest
from hypothesis import given, settings, strategies as st

from dfo_kit.models import interp_linear_model
from dfo_kit.problems import (
    BudgetExhausted,
    Oracle,
    adversarial_instance,
    adversarial_lhs,
    make_problem,
    oracle_eval,
)

SPECS = [
    {"family": "quadratic", "n": 5, "eigenvalues": [0.5, 20], "rotate_seed": 3},
    {"family": "rosenbrock", "n": 4},
    {"family": "logsumexp", "n": 6, "mu": 0.3, "seed": 2},
]


def test_quadratic_identity():
    p = make_problem({"family": "quadratic", "n": 2, "eigenvalues": [1, 1]})
    x = np.array([0.3, -2.0])
    assert p.lipschitz_L == 1.0 and p.lower_bound == 0.0
    assert p(x) == pytest.approx(0.5 * x @ x)
    assert_allclose(p.grad(x), x)


def test_quadratic_spread_gradient_at_e1():
    p = make_problem({"family": "quadratic", "n": 4, "eigenvalues": [1, 10]})
    assert p.lipschitz_L == 10.0
    e1 = np.eye(4)[0]
    assert_allclose(p.grad(e1), e1 * 1.0)
    e4 = np.eye(4)[3]
    assert_allclose(p.grad(e4), e4 * 10.0)
    h = 1e-6
    fd = np.array([(p(e1 + h * e) - p(e1 - h * e)) / (2 * h) for e in np.eye(4)])
    assert_allclose(fd, p.grad(e1), atol=1e-8)


def test_rosenbrock_minimizer():
    p = make_problem({"family": "rosenbrock", "n": 2})
    assert p(np.ones(2)) == 0.0
    assert_array_equal(p.grad(np.ones(2)), np.zeros(2))


def test_dim_alias_and_errors():
    assert make_problem({"family": "quadratic", "dim": 3}).dim == 3
    with pytest.raises(ValueError):
        make_problem({"family": "cubic", "n": 2})
    with pytest.raises(ValueError):
        make_problem({"family": "quadratic", "n": 0})


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s["family"])
def test_gradient_matches_central_differences(spec):
    p = make_problem(spec)
    rng = np.random.default_rng(0)
    for _ in range(100):
        x = rng.uniform(-1.5, 1.5, p.dim)
        g = p.grad(x)
        h = 1e-6
        fd = np.array([(p(x + h * e) - p(x - h * e)) / (2 * h) for e in np.eye(p.dim)])
        assert np.linalg.norm(fd - g) <= 1e-6 * max(1.0, np.linalg.norm(g))


@pytest.mark.parametrize("spec", SPECS, ids=lambda s: s["family"])
def test_lipschitz_and_lower_bound_on_samples(spec):
    p = make_problem(spec)
    rng = np.random.default_rng(1)
    R = min(p.region_radius, 3.0)
    for _ in range(300):
        x, y = rng.uniform(-R, R, (2, p.dim))
        assert np.linalg.norm(p.grad(x) - p.grad(y)) <= p.lipschitz_L * np.linalg.norm(x - y) * (1 + 1e-12)
        assert p(x) >= p.lower_bound - 1e-12


def test_oracle_exact_and_counting():
    p = make_problem({"family": "quadratic", "n": 2, "eigenvalues": [1, 1]})
    o = Oracle(p)
    assert oracle_eval(o, [3.0, 4.0]) == 12.5
    assert o.call_count == 1


def test_oracle_bounded_noise_and_replay():
    p = make_problem({"family": "quadratic", "n": 2, "eigenvalues": [1, 1]})
    o = Oracle(p, eps_f=0.01, noise_seed=9)
    v1 = o([3.0, 4.0])
    v2 = o([3.0, 4.0])
    assert 12.49 <= v1 <= 12.51
    assert v1 == v2 and o.call_count == 2


def test_noise_never_leaves_band():
    p = make_problem({"family": "logsumexp", "n": 3})
    o = Oracle(p, eps_f=1e-8, noise_seed=5)
    X = np.random.default_rng(2).standard_normal((100_000, 3)) * 10
    worst = max(abs(o(x) - p(x)) for x in X)
    assert worst <= 1e-8


def test_oracle_rejects_nonfinite_and_respects_budget():
    p = make_problem({"family": "quadratic", "n": 2})
    o = Oracle(p, budget=1)
    with pytest.raises(ValueError):
        o([np.nan, 0.0])
    assert o.call_count == 0
    o([0.0, 0.0])
    with pytest.raises(BudgetExhausted):
        o([0.0, 0.0])
    assert o.call_count == 1


def test_adversarial_hand_values():
    inst = adversarial_instance(2, eps=0.2)
    # 1/1.2 + 0.2/(1.44 * (1 - 0.4/1.2)) = 1.0416666...
    assert inst.target_lambda == pytest.approx(math.sqrt(1.0 + 1.0 / 24.0), abs=1e-12)
    assert inst.target_lambda == pytest.approx(1.02062, abs=1e-5)
    assert inst.predicted_error() == pytest.approx(0.5 * math.sqrt(2.5), abs=1e-12)
    vals = [inst.phi(inst.Y[:, j]) for j in range(2)]
    g = interp_linear_model(0.0, vals, inst.Y).g
    assert np.linalg.norm(g) == pytest.approx(0.79057, abs=1e-5)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 10), st.floats(1.001, 3.0))
def test_adversarial_instance_invariants(n, lam):
    inst = adversarial_instance(n, lam)
    assert abs(adversarial_lhs(inst.eps_star, n) - lam * lam) <= 1e-10
    assert_allclose(np.linalg.norm(inst.Y, axis=0), 1.0, rtol=1e-12)
    assert_allclose(inst.Y @ inst.Y, inst.A, atol=1e-12)
    assert inst.predicted_error() >= inst.lower_bound() - 1e-8


def test_adversarial_limit_and_errors():
    inst = adversarial_instance(5, 1.0 + 1e-9)
    # near zero the equation reads Lambda^2 = 1 + (n-1) eps^2 + O(eps^3)
    assert inst.eps_star == pytest.approx(math.sqrt(2e-9 / 4), rel=1e-3)
    assert_allclose(inst.Y, np.eye(5), atol=1e-4)
    assert inst.predicted_error() == pytest.approx(0.5 * math.sqrt(5), rel=1e-4)
    with pytest.raises(ValueError):
        adversarial_instance(1, 1.5)
    with pytest.raises(ValueError):
        adversarial_instance(3, 0.9)
