"""Constants and worst-case complexity bounds of the trust-region analysis.

All formulas take the fraction-of-Cauchy-decrease constant ``kappa_fcd`` and
the model Hessian bound ``kappa_bhm`` explicitly; the drivers use
``kappa_fcd = 1`` (Cauchy point) and ``H = 0``.
"""
from dataclasses import asdict, dataclass
import math
from typing import Mapping, Optional

from ..models import fl_constants
from ..subspace import HAAR_THETA

__all__ = [
    "ConstantSet",
    "c1",
    "c1_bar",
    "c2",
    "c1_hat",
    "eps_threshold",
    "model_kappas",
    "unsuccessful_log_term",
    "compute_constants",
    "DEFAULTS",
]

DEFAULTS = dict(eta1=0.1, eta2=1.0, gamma=0.5, kappa_bhm=1.0, kappa_fcd=1.0, tau=0.5, eps_f=0.0, delta0=1.0)


def _check_ranges(eta1, eta2, gamma, kappa_bhm, kappa_fcd, tau=0.5):
    if not 0 < eta1 < 1:
        raise ValueError("eta1 must lie in (0, 1)")
    if not 0 < gamma < 1:
        raise ValueError("gamma must lie in (0, 1)")
    if not 0 < tau < 1:
        raise ValueError("tau must lie in (0, 1)")
    if not (eta2 > 0 and kappa_bhm > 0 and 0 < kappa_fcd <= 1):
        raise ValueError("need eta2 > 0, kappa_bhm > 0 and kappa_fcd in (0, 1]")


def c1(eta1, eta2, kappa_bhm, kappa_fcd, kappa_ef, kappa_eg):
    """Radius-to-gradient ratio below which an iteration must succeed."""
    return 1.0 / (max(eta2, kappa_bhm, 2.0 * kappa_ef / ((1.0 - eta1) * kappa_fcd)) + kappa_eg)


def c1_bar(eta1, eta2, kappa_bhm, kappa_fcd, kappa_ef, kappa_eg, eps_f):
    """Noisy-oracle variant of :func:`c1` (``2 kappa_ef`` becomes ``2 kappa_ef + 4 eps_f``)."""
    return 1.0 / (max(eta2, kappa_bhm, (2.0 * kappa_ef + 4.0 * eps_f) / ((1.0 - eta1) * kappa_fcd)) + kappa_eg)


def c2(eta1, eta2, kappa_bhm, kappa_fcd):
    """Decrease per successful iteration is at least ``C2 Delta_k^2``."""
    return 0.5 * eta1 * eta2 * kappa_fcd * min(eta2 / kappa_bhm, 1.0)


def c1_hat(C1, n, q):
    """Subspace analogue of ``C1`` for alignment level ``q / (10 n)``."""
    return math.sqrt(q / (10.0 * n)) * C1


def eps_threshold(eps_f, gamma, tau, C2, C1_bar):
    """Smallest gradient tolerance the noisy analysis covers."""
    return math.sqrt(2.0 * eps_f / (gamma**2 * tau * C2 * C1_bar**2))


def unsuccessful_log_term(gamma, C1, eps, delta0):
    """``ceil(log_gamma(C1 eps / Delta0))`` clipped at zero."""
    return max(0, math.ceil(math.log(C1 * eps / delta0) / math.log(gamma) - 1e-12))


def model_kappas(algorithm, n, L, q=None, lambda_threshold=None, delta_choice="delta_eq_Delta", kappa_bhm=1.0):
    """``(kappa_ef, kappa_eg)`` of the models built by ``algorithm``.

    ``alg1`` forward differences in R^n; ``alg3`` in the subspace; ``alg2``
    and ``alg4`` linear interpolation on ``lambda_threshold``-poised sets
    (default ``1 + 1/d``) using the looser form of the bound.
    """
    d = n if algorithm in ("alg1", "alg2") else q
    if d is None:
        raise ValueError(f"{algorithm} needs the subspace dimension q")
    ratio = 1.0 if delta_choice == "delta_eq_Delta" else 1.0 / math.sqrt(d)
    if algorithm == "alg1":
        cert = fl_constants("fd_full", d, L, ratio, kappa_bhm=kappa_bhm)
    elif algorithm == "alg3":
        cert = fl_constants("fd_subspace", d, L, ratio, kappa_bhm=kappa_bhm)
    elif algorithm in ("alg2", "alg4"):
        lam = 1.0 + 1.0 / d if lambda_threshold is None else lambda_threshold
        cert = fl_constants("interpolation", d, L, lam, kappa_bhm=kappa_bhm)
    else:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    return cert.kappa_ef, cert.kappa_eg


@dataclass(frozen=True)
class ConstantSet:
    """Constants of the analysis for one parameter choice.

    ``theoretical_K_eps`` and ``theoretical_N_eps`` are ``None`` unless the
    algorithm, ``eps``, ``phi0`` and ``phi_star`` were supplied. For the
    subspace drivers they bound the expectations of ``K_eps`` and ``N_eps``.
    """

    C1: float
    C1_bar: float
    C2: float
    eps_threshold: float
    kappa_ef: float
    kappa_eg: float
    tau: float
    theoretical_K_eps: Optional[float] = None
    theoretical_N_eps: Optional[float] = None
    C1_hat: Optional[float] = None
    successful_bound: Optional[float] = None

    def as_dict(self):
        return asdict(self)


def _complexity(algorithm, C1, C1b, C2, p):
    eps, gamma, tau, eps_f = p["eps"], p["gamma"], p["tau"], p["eps_f"]
    gap = p["phi0"] - p["phi_star"]
    if gap < 0:
        raise ValueError("phi0 must not be below phi_star")
    shrink = (1.0 - tau) if eps_f > 0 else 1.0
    n, q = p["n"], p.get("q")
    C = C1b if eps_f > 0 else C1
    if algorithm in ("alg3", "alg4"):
        C = c1_hat(C, n, q)
    s_max = gap / (shrink * C2 * (gamma * C * eps) ** 2)
    log_term = unsuccessful_log_term(gamma, C, eps, p["delta0"])
    K = 2.0 * s_max + log_term
    if algorithm == "alg1":
        N = (n + 2) * K
    elif algorithm == "alg2":
        # 3n calls per success or shrink, as stated for the linear basis
        N = 3 * n * K
    else:
        theta = HAAR_THETA
        K = 2.0 * theta / (2.0 * theta - 1.0) ** 2 * K
        N = (q + 2) * K if algorithm == "alg3" else (4 * q + 1) * K + q + 1
    return K, N, s_max


def compute_constants(params: Mapping):
    """Evaluate every constant and bound for ``params``.

    ``params`` holds the hyperparameters (``eta1``, ``eta2``, ``gamma``,
    ``kappa_bhm``, ``kappa_fcd``, ``tau``, ``eps_f``; defaults in
    :data:`DEFAULTS`) and either explicit ``kappa_ef`` and ``kappa_eg`` or
    ``algorithm``, ``n``, ``L`` (plus ``q``, ``lambda_threshold``,
    ``delta_choice``) to derive them. The complexity bounds additionally
    need ``algorithm``, ``n``, ``eps``, ``phi0``, ``phi_star`` and ``delta0``.
    """
    p = dict(DEFAULTS)
    p.update({k: v for k, v in params.items() if v is not None})
    eta1, eta2, gamma = float(p["eta1"]), float(p["eta2"]), float(p["gamma"])
    kbhm, kfcd, tau, eps_f = float(p["kappa_bhm"]), float(p["kappa_fcd"]), float(p["tau"]), float(p["eps_f"])
    _check_ranges(eta1, eta2, gamma, kbhm, kfcd, tau)
    if eps_f < 0:
        raise ValueError("eps_f must be non-negative")
    algorithm = p.get("algorithm")
    if "kappa_eg" in p and "kappa_ef" in p:
        kef, keg = float(p["kappa_ef"]), float(p["kappa_eg"])
    elif algorithm is not None and "n" in p and "L" in p:
        kef, keg = model_kappas(algorithm, int(p["n"]), float(p["L"]), p.get("q"), p.get("lambda_threshold"),
                                p.get("delta_choice", "delta_eq_Delta"), kbhm)
    else:
        raise ValueError("need kappa_ef and kappa_eg, or algorithm, n and L")
    if not (kef > 0 and keg >= 0):
        raise ValueError("need kappa_ef > 0 and kappa_eg >= 0")

    C1 = c1(eta1, eta2, kbhm, kfcd, kef, keg)
    C1b = c1_bar(eta1, eta2, kbhm, kfcd, kef, keg, eps_f)
    C2 = c2(eta1, eta2, kbhm, kfcd)
    thr = eps_threshold(eps_f, gamma, tau, C2, C1b)
    out = dict(C1=C1, C1_bar=C1b, C2=C2, eps_threshold=thr, kappa_ef=kef, kappa_eg=keg, tau=tau)
    if algorithm in ("alg3", "alg4") and "n" in p and p.get("q") is not None:
        out["C1_hat"] = c1_hat(C1, int(p["n"]), int(p["q"]))
    if algorithm is not None and all(k in p for k in ("n", "eps", "phi0", "phi_star")):
        p["n"] = int(p["n"])
        p["eps"] = float(p["eps"])
        if not p["eps"] > 0:
            raise ValueError("eps must be positive")
        K, N, s_max = _complexity(algorithm, C1, C1b, C2, p)
        out.update(theoretical_K_eps=K, theoretical_N_eps=N, successful_bound=s_max)
    return ConstantSet(**out)
