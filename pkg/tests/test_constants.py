import math

import pytest

from dfo_kit.harness.constants import c1, c1_bar, c2, compute_constants, eps_threshold, model_kappas


def test_c1_example():
    assert c1(0.1, 1.0, 1.0, 1.0, 3.0, 2.0) == pytest.approx(1 / (20 / 3 + 2))
    assert c1(0.1, 1.0, 1.0, 1.0, 3.0, 2.0) == pytest.approx(0.115385, abs=1e-6)


def test_c2_example():
    assert c2(0.1, 1.0, 2.0, 1.0) == pytest.approx(0.025)


def test_threshold_example():
    assert eps_threshold(1e-6, 0.5, 0.5, 0.025, 0.1) == pytest.approx(math.sqrt(2e-6 / 3.125e-5))
    assert eps_threshold(1e-6, 0.5, 0.5, 0.025, 0.1) == pytest.approx(0.25298, abs=1e-5)


def test_noisy_c1_is_smaller():
    assert c1_bar(0.1, 1.0, 1.0, 1.0, 3.0, 2.0, 0.0) == c1(0.1, 1.0, 1.0, 1.0, 3.0, 2.0)
    assert c1_bar(0.1, 1.0, 1.0, 1.0, 3.0, 2.0, 0.5) < c1(0.1, 1.0, 1.0, 1.0, 3.0, 2.0)


def test_compute_constants_explicit_kappas():
    cs = compute_constants(dict(eta1=0.1, eta2=1, kappa_bhm=1, kappa_fcd=1, kappa_ef=3, kappa_eg=2))
    assert cs.C1 == pytest.approx(0.115385, abs=1e-6)
    assert cs.C2 == pytest.approx(0.05)
    assert cs.eps_threshold == 0.0 and cs.theoretical_K_eps is None


def _log_term(gamma, C, eps, delta0):
    return max(0, math.ceil(math.log(C * eps / delta0) / math.log(gamma) - 1e-12))


@pytest.mark.parametrize("kbhm", [0.5, 1.0, 3.0])
def test_iteration_bound_matches_expanded_form(kbhm):
    p = dict(algorithm="alg1", n=4, L=2.0, eta1=0.2, eta2=0.7, gamma=0.6, kappa_bhm=kbhm, eps=1e-2,
             phi0=3.0, phi_star=0.5, delta0=1.0)
    cs = compute_constants(p)
    keg = math.sqrt(4) * 2.0
    kef = keg + (2.0 + kbhm) / 2
    m = max(0.7, kbhm, 2 * kef / 0.8) + keg
    expanded = 4 * kbhm * m**2 / (0.36 * 0.2 * 0.7 * min(0.7, kbhm)) * 2.5 / 1e-4
    assert cs.theoretical_K_eps == pytest.approx(expanded + _log_term(0.6, 1 / m, 1e-2, 1.0), rel=1e-12)
    assert cs.theoretical_N_eps == pytest.approx(6 * cs.theoretical_K_eps)


def test_noisy_and_geometry_bounds():
    p = dict(algorithm="alg2", n=3, L=1.0, eps_f=1e-6, tau=0.5, eps=0.5, phi0=2.0, phi_star=0.0, delta0=1.0)
    cs = compute_constants(p)
    S = 2.0 / (0.5 * cs.C2 * (0.5 * cs.C1_bar * 0.5) ** 2)
    K = 2 * S + _log_term(0.5, cs.C1_bar, 0.5, 1.0)
    assert cs.successful_bound == pytest.approx(S)
    assert cs.theoretical_K_eps == pytest.approx(K)
    assert cs.theoretical_N_eps == pytest.approx(9 * K)


def test_subspace_bounds():
    theta = 243 / 443
    p = dict(algorithm="alg4", n=20, q=5, L=1.0, eps=1e-2, phi0=1.0, phi_star=0.0, delta0=1.0)
    cs = compute_constants(p)
    assert cs.C1_hat == pytest.approx(math.sqrt(5 / 200) * cs.C1)
    base = 2 * 1.0 / (cs.C2 * (0.5 * cs.C1_hat * 1e-2) ** 2) + _log_term(0.5, cs.C1_hat, 1e-2, 1.0)
    assert cs.theoretical_K_eps == pytest.approx(2 * theta / (2 * theta - 1) ** 2 * base)
    assert cs.theoretical_N_eps == pytest.approx(21 * cs.theoretical_K_eps + 6)
    p["algorithm"] = "alg3"
    assert compute_constants(p).theoretical_N_eps == pytest.approx(7 * compute_constants(p).theoretical_K_eps)


def test_model_kappas():
    assert model_kappas("alg1", 4, 1.0) == (3.0, 2.0)
    assert model_kappas("alg1", 4, 1.0, delta_choice="delta_eq_Delta_over_sqrt_d")[1] == pytest.approx(1.0)
    assert model_kappas("alg3", 16, 1.0, q=4)[1] == pytest.approx(1.0)
    assert model_kappas("alg2", 4, 1.0)[1] == pytest.approx(2 * math.sqrt(4 * (1.5625 - 1) + 2))
    with pytest.raises(ValueError):
        model_kappas("alg4", 4, 1.0)


@pytest.mark.parametrize("bad", [dict(eta1=1.0), dict(gamma=0.0), dict(tau=1.0), dict(eta2=-1.0),
                                 dict(kappa_fcd=2.0), dict(eps_f=-1.0)])
def test_out_of_range(bad):
    p = dict(kappa_ef=3, kappa_eg=2)
    p.update(bad)
    with pytest.raises(ValueError):
        compute_constants(p)
    with pytest.raises(ValueError):
        compute_constants(dict(eta1=0.1))
