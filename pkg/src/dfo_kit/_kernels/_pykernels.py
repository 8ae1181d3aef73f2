"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
The noise hash is bit-identical between the two; the linear-algebra kernels
agree to rounding.
"""
import numpy as np

_MASK = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0


def _splitmix64(z):
    z = (z + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def noise_unit(seed, x):
    """Uniform number in [0, 1) keyed by ``seed`` and the bit pattern of ``x``."""
    words = np.ascontiguousarray(x, dtype=np.float64).view(np.uint64)
    h = _splitmix64((int(seed) & _MASK) ^ _GOLDEN)
    for w in words.tolist():
        h = _splitmix64(h ^ w)
    h = _splitmix64(h ^ len(words))
    return (h >> 11) * _INV_2_53


def cauchy_step(g, H, delta):
    """Minimizer of the model along ``-g`` inside the ball of radius ``delta``.

    Returns ``(s, decrease)`` where ``decrease = m(0) - m(s)``.
    """
    g = np.asarray(g, dtype=np.float64)
    gnorm = float(np.sqrt(g @ g))
    if gnorm == 0.0:
        return np.zeros_like(g), 0.0
    gHg = float(g @ (H @ g))
    t = delta / gnorm
    if gHg > 0.0:
        t = min(t, gnorm * gnorm / gHg)
    s = -t * g
    decrease = t * gnorm * gnorm - 0.5 * t * t * gHg
    return s, decrease


def _boundary_tau(s, p, delta):
    # positive root of ||s + tau p|| = delta
    a = p @ p
    b = 2.0 * (s @ p)
    c = s @ s - delta * delta
    disc = max(b * b - 4.0 * a * c, 0.0)
    return (-b + np.sqrt(disc)) / (2.0 * a)


def steihaug_cg(g, H, delta, maxiter, rtol):
    """Truncated conjugate gradient on ``min g.s + 0.5 s.H.s, ||s|| <= delta``.

    Stops at the boundary, on non-positive curvature, after ``maxiter``
    iterations, or once the residual drops below ``rtol * ||g||``.
    """
    g = np.asarray(g, dtype=np.float64)
    s = np.zeros_like(g)
    r = g.copy()
    gnorm = np.sqrt(g @ g)
    if gnorm == 0.0:
        return s
    p = -r
    rr = r @ r
    for _ in range(maxiter):
        Hp = H @ p
        curv = p @ Hp
        if curv <= 0.0:
            return s + _boundary_tau(s, p, delta) * p
        alpha = rr / curv
        s_next = s + alpha * p
        if np.sqrt(s_next @ s_next) >= delta:
            return s + _boundary_tau(s, p, delta) * p
        s = s_next
        r = r + alpha * Hp
        rr_next = r @ r
        if np.sqrt(rr_next) <= rtol * gnorm:
            break
        p = -r + (rr_next / rr) * p
        rr = rr_next
    return s


def inv_transpose(Y):
    """Return ``Y^{-T}``; raises ``np.linalg.LinAlgError`` if ``Y`` is singular."""
    return np.linalg.inv(np.asarray(Y, dtype=np.float64)).T.copy()


def column_norms(W):
    W = np.asarray(W, dtype=np.float64)
    return np.sqrt(np.einsum("ij,ij->j", W, W))
