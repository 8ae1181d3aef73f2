"""Trust-region subproblem: Cauchy point and truncated-CG refinement.

Every emitted step carries the fraction-of-Cauchy-decrease certificate with
``kappa_fcd = 1``::

    m(0) - m(s) >= 0.5 * ||g|| * min(||g|| / ||H||, Delta)
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels

__all__ = ["Model", "Step", "CauchyDecreaseError", "cauchy_point", "solve_trs", "cauchy_bound", "clip_hessian"]

_CERT_RTOL = 1e-12


class CauchyDecreaseError(ArithmeticError):
    """A computed step violated the Cauchy-decrease certificate."""


@dataclass
class Model:
    """Quadratic model ``m(s) = f0 + g.s + 0.5 s.H.s`` centred at the iterate."""

    f0: float
    g: np.ndarray
    H: Optional[np.ndarray] = None
    kappa_bhm: float = 1.0

    def __post_init__(self):
        self.g = np.asarray(self.g, dtype=float)
        d = self.g.shape[0]
        self.H = np.zeros((d, d)) if self.H is None else np.asarray(self.H, dtype=float)
        if self.H.shape != (d, d):
            raise ValueError(f"Hessian shape {self.H.shape} does not match gradient length {d}")
        if not np.allclose(self.H, self.H.T, rtol=0, atol=1e-12 * max(1.0, np.abs(self.H).max(initial=0))):
            raise ValueError("model Hessian must be symmetric")
        if self.hess_norm() > self.kappa_bhm * (1.0 + 1e-12):
            raise ValueError("model Hessian norm exceeds kappa_bhm; clip it with clip_hessian")

    @property
    def dim(self):
        return self.g.shape[0]

    @property
    def g_norm(self):
        return float(np.linalg.norm(self.g))

    def hess_norm(self):
        if not np.any(self.H):
            return 0.0
        return float(np.linalg.norm(self.H, 2))

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        return self.f0 + float(self.g @ s) + 0.5 * float(s @ (self.H @ s))

    def decrease(self, s):
        """``m(0) - m(s)`` evaluated directly."""
        s = np.asarray(s, dtype=float)
        return -(float(self.g @ s) + 0.5 * float(s @ (self.H @ s)))


@dataclass(frozen=True)
class Step:
    s: np.ndarray
    predicted_decrease: float

    @property
    def norm(self):
        return float(np.linalg.norm(self.s))


def clip_hessian(H, kappa_bhm):
    """Symmetrize ``H`` and clip its spectrum to ``[-kappa_bhm, kappa_bhm]``."""
    H = np.asarray(H, dtype=float)
    H = 0.5 * (H + H.T)
    w, V = np.linalg.eigh(H)
    w = np.clip(w, -kappa_bhm, kappa_bhm)
    H = (V * w) @ V.T
    return 0.5 * (H + H.T)


def cauchy_bound(model, delta):
    """Right-hand side ``0.5 ||g|| min(||g||/||H||, Delta)`` of the certificate."""
    gn = model.g_norm
    hn = model.hess_norm()
    ratio = np.inf if hn == 0.0 else gn / hn
    return 0.5 * gn * min(ratio, delta)


def _certify(model, delta, step):
    bound = cauchy_bound(model, delta)
    if step.predicted_decrease < bound * (1.0 - _CERT_RTOL) - 1e-300:
        raise CauchyDecreaseError(
            f"step decrease {step.predicted_decrease!r} below Cauchy bound {bound!r}"
        )
    if step.norm > delta * (1.0 + 1e-12):
        raise CauchyDecreaseError(f"step norm {step.norm!r} exceeds radius {delta!r}")
    return step


def cauchy_point(model, delta):
    """Minimize the model along ``-g`` within the ball of radius ``delta``."""
    if not delta > 0:
        raise ValueError("trust-region radius must be positive")
    s, _ = _kernels.cauchy_step(model.g, model.H, float(delta))
    return _certify(model, delta, Step(s, model.decrease(s)))


def solve_trs(model, delta, refine=True, rtol=1e-10):
    """Approximate trust-region step.

    With ``refine=False`` this is the Cauchy point. Otherwise a Steihaug-Toint
    truncated CG run (at most ``dim`` iterations) is tried and kept only if it
    does at least as well as the Cauchy point.
    """
    cp = cauchy_point(model, delta)
    if not refine or not np.any(model.H):
        return cp
    s = _kernels.steihaug_cg(model.g, model.H, float(delta), model.dim, rtol)
    nrm = float(np.linalg.norm(s))
    if nrm > delta:
        s = s * (delta / nrm)
    dec = model.decrease(s)
    if dec < cp.predicted_decrease:
        return cp
    return _certify(model, delta, Step(s, dec))
