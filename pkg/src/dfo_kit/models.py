"""Fully-linear model construction from oracle values.

Three builders are provided: forward finite differences in the full space,
forward finite differences restricted to a subspace ``x + Q v``, and linear
interpolation on a displacement set. :func:`fl_constants` returns the
matching fully-linear constants.
"""
from dataclasses import dataclass
import math

import numpy as np

from .trs import Model

__all__ = [
    "GeometryError",
    "FullyLinearCert",
    "TOL_SING",
    "fd_gradient",
    "fd_subspace_gradient",
    "interp_linear_model",
    "fl_constants",
    "interpolation_gradient_bound",
]

TOL_SING = 1e8
FL_MODES = ("fd_full", "fd_subspace", "interpolation")


class GeometryError(np.linalg.LinAlgError):
    """Interpolation set is singular or too ill-conditioned to build a model."""


@dataclass(frozen=True)
class FullyLinearCert:
    """Fully-linear constants for a model on ``B(x, delta)``.

    The certified gradient error is ``kappa_eg * delta + noise_term``; the
    additive term is non-zero only for interpolation with a noisy oracle.
    """

    kappa_ef: float
    kappa_eg: float
    delta: float
    mode: str
    L_eff: float
    kappa_bhm: float
    noise_term: float = 0.0

    @property
    def gradient_error_bound(self):
        return self.kappa_eg * self.delta + self.noise_term

    @property
    def value_error_bound(self):
        return self.kappa_ef * self.delta**2


def _orthonormal_check(U, name, tol=1e-10):
    U = np.asarray(U, dtype=float)
    k = U.shape[1]
    if np.max(np.abs(U.T @ U - np.eye(k)), initial=0.0) > tol:
        raise ValueError(f"{name} must have orthonormal columns")
    return U


def fd_gradient(oracle, x, delta, basis=None, full_output=False):
    """Forward-difference gradient ``sum_i (f(x + delta u_i) - f(x)) / delta * u_i``.

    Uses exactly ``n + 1`` oracle calls. ``basis`` is an ``n x n`` orthogonal
    matrix whose columns are the ``u_i`` (identity by default). With
    ``full_output`` the centre value ``f(x)`` is returned as well.
    """
    if not delta > 0:
        raise ValueError("finite-difference step must be positive")
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    U = np.eye(n) if basis is None else _orthonormal_check(basis, "basis")
    fx = oracle(x)
    diffs = np.array([(oracle(x + delta * U[:, i]) - fx) / delta for i in range(n)])
    g = U @ diffs
    return (g, fx) if full_output else g


def fd_subspace_gradient(oracle, x, Q, delta, basis=None, full_output=False):
    """Reduced gradient of ``v -> f(x + Q v)`` at ``v = 0`` by forward differences.

    Uses ``q + 1`` oracle calls and returns a vector in ``R^q``.
    """
    if not delta > 0:
        raise ValueError("finite-difference step must be positive")
    Q = _orthonormal_check(Q, "Q")
    q = Q.shape[1]
    U = np.eye(q) if basis is None else _orthonormal_check(basis, "basis")
    x = np.asarray(x, dtype=float)
    fx = oracle(x)
    diffs = np.array([(oracle(x + delta * (Q @ U[:, i])) - fx) / delta for i in range(q)])
    g = U @ diffs
    return (g, fx) if full_output else g


def interp_linear_model(f_center, f_points, Y, H=None, kappa_bhm=1.0, tol_sing=TOL_SING):
    """Linear interpolation model on the columns of ``Y``.

    Solves ``Y^T g = f_points - f_center``. Raises :class:`GeometryError` if
    ``Y`` is singular or its condition number exceeds ``tol_sing``.
    """
    Y = np.asarray(Y, dtype=float)
    rhs = np.asarray(f_points, dtype=float) - float(f_center)
    d = Y.shape[0]
    if Y.ndim != 2 or Y.shape[1] != d or rhs.shape != (d,):
        raise ValueError(f"need a square displacement matrix and {d} values, got {Y.shape} and {rhs.shape}")
    cond = np.linalg.cond(Y)
    if not np.isfinite(cond) or cond > tol_sing:
        raise GeometryError(f"interpolation set is near-singular (cond={cond:.3g})")
    g = np.linalg.solve(Y.T, rhs)
    resid = np.linalg.norm(Y.T @ g - rhs)
    scale = np.linalg.norm(Y, 2) * np.linalg.norm(g) + np.linalg.norm(rhs)
    if resid > 1e-10 * max(scale, np.finfo(float).tiny):
        raise GeometryError(f"interpolation solve residual too large ({resid:.3g})")
    return Model(f0=float(f_center), g=g, H=H, kappa_bhm=kappa_bhm)


def interpolation_gradient_bound(d, L, lam, delta, eps_f=0.0, halved=False):
    """Gradient-error bound for linear interpolation on a ``lam``-poised set.

    Exact oracle: ``sqrt(d) L delta sqrt(d (lam^2 - 1) + 2)``, or half of it
    with ``halved=True`` (the constant the proof actually delivers). With
    noise the bound is ``sqrt(d(lam^2-1)+2) (sqrt(d) L delta / 2 + 2 sqrt(d) eps_f lam / delta)``.
    """
    w = math.sqrt(d * (lam * lam - 1.0) + 2.0)
    if eps_f > 0:
        return w * (0.5 * math.sqrt(d) * L * delta + math.sqrt(d) * 2.0 * eps_f * lam / delta)
    c = 0.5 if halved else 1.0
    return c * math.sqrt(d) * L * delta * w


def fl_constants(mode, d, L, lam_or_ratio, eps_f=0.0, delta=1.0, kappa_bhm=1.0):
    """Fully-linear constants for a model-building mode.

    Parameters
    ----------
    mode : {"fd_full", "fd_subspace", "interpolation"}
    d : int
        Model dimension (``n`` or ``q``).
    L : float
        Gradient Lipschitz constant used for the certificate.
    lam_or_ratio : float
        ``delta_fd / Delta`` for the finite-difference modes, poisedness
        ``Lambda`` for interpolation.
    eps_f, delta, kappa_bhm : float
        Oracle noise level, trust-region radius and model Hessian bound.
    """
    if mode not in FL_MODES:
        raise ValueError(f"unknown fully-linear mode {mode!r}")
    if d < 1 or L < 0 or delta <= 0 or eps_f < 0:
        raise ValueError("fl_constants needs d >= 1, L >= 0, delta > 0, eps_f >= 0")
    noise_term = 0.0
    if mode == "fd_full":
        ratio = float(lam_or_ratio)
        h = ratio * delta
        if eps_f == 0.0 or (L > 0 and h >= 2.0 * math.sqrt(eps_f / L)):
            kappa_eg = math.sqrt(d) * L * ratio
        else:
            kappa_eg = math.sqrt(d) * L * ratio / 2.0
            noise_term = 2.0 * math.sqrt(d) * eps_f / h
    elif mode == "fd_subspace":
        ratio = float(lam_or_ratio)
        kappa_eg = math.sqrt(d) * L * ratio / 2.0
        if eps_f > 0:
            noise_term = 2.0 * math.sqrt(d) * eps_f / (ratio * delta)
    else:
        lam = float(lam_or_ratio)
        if lam < 1.0:
            raise ValueError("poisedness constant Lambda must be >= 1")
        w = math.sqrt(d * (lam * lam - 1.0) + 2.0)
        if eps_f == 0.0:
            kappa_eg = math.sqrt(d) * L * w
        else:
            kappa_eg = 0.5 * math.sqrt(d) * L * w
            noise_term = w * math.sqrt(d) * 2.0 * eps_f * lam / delta
    kappa_ef = kappa_eg + (L + kappa_bhm) / 2.0
    return FullyLinearCert(
        kappa_ef=kappa_ef,
        kappa_eg=kappa_eg,
        delta=float(delta),
        mode=mode,
        L_eff=float(L),
        kappa_bhm=float(kappa_bhm),
        noise_term=noise_term,
    )
