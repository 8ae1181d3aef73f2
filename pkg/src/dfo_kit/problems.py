"""Test objectives, counted zeroth-order oracles and the poisedness lower-bound instance.

A :class:`Problem` carries the analytic gradient and a Lipschitz constant of
the gradient; these are ground truth for the harness only. Solvers see a
:class:`Oracle`, which returns (possibly noisy) function values and counts
every call.
"""
from dataclasses import dataclass, field
import math
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .streams import make_stream

__all__ = [
    "Problem",
    "Oracle",
    "BudgetExhausted",
    "AdversarialInstance",
    "make_problem",
    "oracle_eval",
    "adversarial_instance",
    "adversarial_lhs",
    "FAMILIES",
]

FAMILIES = ("quadratic", "rosenbrock", "logsumexp")


class BudgetExhausted(RuntimeError):
    """Raised by an oracle asked for more evaluations than its budget allows."""


@dataclass(frozen=True)
class Problem:
    """Smooth objective with analytic gradient.

    Attributes
    ----------
    name : str
    dim : int
    eval : callable
        ``x -> phi(x)``.
    grad : callable
        ``x -> grad phi(x)``; used only by the harness.
    lipschitz_L : float
        Lipschitz constant of the gradient. For families that are not
        globally L-smooth (Rosenbrock) it is valid on ``region_radius``.
    lower_bound : float
        ``phi*``; may be ``-inf``.
    region_radius : float
        Half-width of the box ``||x||_inf <= region_radius`` on which
        ``lipschitz_L`` is valid (``inf`` for globally smooth problems).
    x_default : ndarray or None
        Conventional starting point for the family.
    """

    name: str
    dim: int
    eval: Callable[[np.ndarray], float]
    grad: Callable[[np.ndarray], np.ndarray]
    lipschitz_L: float
    lower_bound: float = -math.inf
    region_radius: float = math.inf
    x_default: Optional[np.ndarray] = None
    minimizer: Optional[np.ndarray] = None

    def __call__(self, x):
        return self.eval(x)

    def in_region(self, x, radius=0.0):
        """True if the ball ``B(x, radius)`` lies in the validity box of ``L``."""
        return float(np.max(np.abs(x))) + radius <= self.region_radius


# ---------------------------------------------------------------------------
# families


def _quadratic(n, eigenvalues=(1.0, 1.0), rotate_seed=None):
    lo, hi = float(min(eigenvalues)), float(max(eigenvalues))
    if lo < 0:
        raise ValueError("quadratic eigenvalues must be non-negative")
    lam = np.linspace(lo, hi, n) if n > 1 else np.array([hi])
    if rotate_seed is None:
        A = np.diag(lam)
    else:
        rng = make_stream(int(rotate_seed), "quadratic-rotation")
        Q, R = np.linalg.qr(rng.standard_normal((n, n)))
        Q = Q * np.sign(np.diag(R))
        A = (Q * lam) @ Q.T
        A = 0.5 * (A + A.T)

    def f(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * float(x @ (A @ x))

    def g(x):
        return A @ np.asarray(x, dtype=float)

    return Problem(
        name="quadratic",
        dim=n,
        eval=f,
        grad=g,
        lipschitz_L=hi,
        lower_bound=0.0,
        x_default=np.ones(n) / math.sqrt(n),
        minimizer=np.zeros(n),
    )


def _rosenbrock(n, region_radius=2.0):
    if n < 2:
        raise ValueError("rosenbrock needs n >= 2")
    R = float(region_radius)

    def f(x):
        x = np.asarray(x, dtype=float)
        return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))

    def g(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        t = x[1:] - x[:-1] ** 2
        out[:-1] += -400.0 * x[:-1] * t - 2.0 * (1.0 - x[:-1])
        out[1:] += 200.0 * t
        return out

    # Gershgorin bound on the Hessian over the box ||x||_inf <= R:
    # diagonal |1200 x_i^2 - 400 x_{i+1} + 2| + 200, two off-diagonals |400 x|.
    L = 1200.0 * R**2 + 400.0 * R + 2.0 + 200.0 + 2 * 400.0 * R
    x_default = np.array([-1.2 if i % 2 == 0 else 1.0 for i in range(n)])
    return Problem(
        name="rosenbrock",
        dim=n,
        eval=f,
        grad=g,
        lipschitz_L=L,
        lower_bound=0.0,
        region_radius=R,
        x_default=x_default,
        minimizer=np.ones(n),
    )


def _logsumexp(n, terms=None, mu=1.0, seed=0):
    k = int(terms) if terms is not None else n
    rng = make_stream(int(seed), "logsumexp-rows")
    B = rng.standard_normal((k, n)) / math.sqrt(n)
    A = np.vstack([B, -B])
    mu = float(mu)

    def _probs(x):
        z = A @ np.asarray(x, dtype=float) / mu
        zmax = z.max()
        w = np.exp(z - zmax)
        return z, zmax, w

    def f(x):
        _, zmax, w = _probs(x)
        return float(mu * (zmax + math.log(w.sum())))

    def g(x):
        _, _, w = _probs(x)
        return A.T @ (w / w.sum())

    # Hessian = A^T (diag(p) - p p^T) A / mu  <=  ||A||^2 / mu
    L = float(np.linalg.norm(A, 2) ** 2 / mu)
    return Problem(
        name="logsumexp",
        dim=n,
        eval=f,
        grad=g,
        lipschitz_L=L,
        lower_bound=mu * math.log(2 * k),
        x_default=np.ones(n) / math.sqrt(n),
        minimizer=np.zeros(n),
    )


def make_problem(spec):
    """Build a :class:`Problem` from a descriptor.

    ``spec`` is a mapping with ``family`` (one of ``FAMILIES``) and ``n``,
    (alias ``dim``), plus family options: ``eigenvalues`` and ``rotate_seed`` for
    ``quadratic``; ``region_radius`` for ``rosenbrock``; ``terms``, ``mu``
    and ``seed`` for ``logsumexp``.
    """
    spec = dict(spec)
    family = spec.pop("family", None)
    n = int(spec.pop("n", spec.pop("dim", 0)))
    if family not in FAMILIES:
        raise ValueError(f"unknown problem family {family!r}; expected one of {FAMILIES}")
    if n < 1:
        raise ValueError(f"problem dimension must be >= 1, got {n}")
    builder = {"quadratic": _quadratic, "rosenbrock": _rosenbrock, "logsumexp": _logsumexp}[family]
    return builder(n, **spec)


# ---------------------------------------------------------------------------
# oracle


@dataclass
class Oracle:
    """Counted zeroth-order oracle.

    With ``eps_f == 0`` the oracle returns ``problem.eval(x)`` unchanged.
    Otherwise it adds a deterministic perturbation in ``[-eps_f, eps_f]``
    keyed by ``(noise_seed, bit pattern of x)``, so repeated queries of the
    same point agree.
    """

    problem: Problem
    eps_f: float = 0.0
    noise_seed: int = 0
    budget: Optional[int] = None
    call_count: int = field(default=0, init=False)

    def __post_init__(self):
        if self.eps_f < 0:
            raise ValueError("eps_f must be non-negative")

    @property
    def exact(self):
        return self.eps_f == 0.0

    def remaining(self):
        return None if self.budget is None else self.budget - self.call_count

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if not np.all(np.isfinite(x)):
            raise ValueError("oracle queried at a non-finite point")
        if self.budget is not None and self.call_count >= self.budget:
            raise BudgetExhausted(f"oracle budget of {self.budget} evaluations exhausted")
        self.call_count += 1
        phi = self.problem.eval(x)
        if self.eps_f == 0.0:
            return phi
        u = _kernels.noise_unit(self.noise_seed, x)
        val = phi + self.eps_f * (2.0 * u - 1.0)
        # rounding of the sum may overshoot the band by an ulp of phi
        while abs(val - phi) > self.eps_f:
            val = math.nextafter(val, phi)
        return val


def oracle_eval(oracle, x):
    return oracle(x)


# ---------------------------------------------------------------------------
# lower-bound instance


def adversarial_lhs(eps, n):
    """``1/(1+eps) + eps / ((1+eps)^2 (1 - n eps/(1+eps)))``; equals Lambda^2."""
    return 1.0 / (1.0 + eps) + eps / ((1.0 + eps) ** 2 * (1.0 - n * eps / (1.0 + eps)))


@dataclass(frozen=True)
class AdversarialInstance:
    """Unit-norm interpolation set with prescribed poisedness on ``phi(u) = u.u/2``.

    ``Y`` holds the columns of ``sqrt(A)`` with ``A = (1+eps) I - eps 11^T``.
    The set is ``lam``-poised in the unit ball and the linear interpolation
    gradient error at 0 equals ``0.5 * sqrt(1^T A^{-1} 1)``.
    """

    dim: int
    target_lambda: float
    eps_star: float
    Y: np.ndarray
    A: np.ndarray

    @staticmethod
    def phi(u):
        u = np.asarray(u, dtype=float)
        return 0.5 * float(u @ u)

    @staticmethod
    def grad(u):
        return np.asarray(u, dtype=float)

    def problem(self):
        n = self.dim
        return Problem("adversarial-quadratic", n, self.phi, self.grad, 1.0, 0.0, minimizer=np.zeros(n))

    def predicted_error(self):
        """Closed form ``0.5 sqrt(n/(1+e) + n^2 e / ((1+e)^2 (1 - n e/(1+e))))``."""
        n, e = self.dim, self.eps_star
        return 0.5 * math.sqrt(n / (1 + e) + n * n * e / ((1 + e) ** 2 * (1 - n * e / (1 + e))))

    def lower_bound(self):
        n, lam = self.dim, self.target_lambda
        return 0.5 * math.sqrt(n) * math.sqrt(n * (lam * lam - 1.0) + 1.0)


def _sqrt_A(n, eps):
    a = math.sqrt(1.0 + eps)
    b = (math.sqrt(1.0 - (n - 1) * eps) - a) / n
    return a * np.eye(n) + b * np.ones((n, n))


def adversarial_instance(n, lam=None, eps=None, tol=1e-12):
    """Construct the lower-bound instance for ``n`` and poisedness ``lam``.

    Pass ``eps`` instead of ``lam`` to force the construction parameter; the
    resulting ``target_lambda`` is then ``sqrt(adversarial_lhs(eps, n))``.
    """
    n = int(n)
    if n < 2:
        raise ValueError("adversarial instance needs n >= 2")
    upper = 1.0 / (n - 1)
    if eps is None:
        if lam is None or not lam > 1.0 or not math.isfinite(lam):
            raise ValueError(f"Lambda must be a finite number > 1, got {lam!r}")
        target = lam * lam
        lo, hi = 0.0, upper
        # the left-hand side increases from 1 at eps=0 to +inf at eps=1/(n-1)
        for _ in range(2000):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            r = adversarial_lhs(mid, n) - target
            if abs(r) <= tol:
                lo = hi = mid
                break
            if r < 0:
                lo = mid
            else:
                hi = mid
        eps = 0.5 * (lo + hi)
        if not 0.0 < eps < upper or abs(adversarial_lhs(eps, n) - target) > max(tol, 1e-9 * target):
            raise ValueError(f"Lambda={lam} is not achievable for n={n} in double precision")
    else:
        eps = float(eps)
        if not 0.0 < eps < upper:
            raise ValueError(f"eps must lie in (0, 1/(n-1)) = (0, {upper})")
        lam = math.sqrt(adversarial_lhs(eps, n))
    A = (1.0 + eps) * np.eye(n) - eps * np.ones((n, n))
    Y = _sqrt_A(n, eps)
    return AdversarialInstance(dim=n, target_lambda=float(lam), eps_star=float(eps), Y=Y, A=A)
