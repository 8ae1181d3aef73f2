"""Haar-distributed orthonormal embeddings and gradient-alignment diagnostics."""
from dataclasses import dataclass

import numpy as np

__all__ = ["Embedding", "haar_sample", "alignment", "is_well_aligned", "HAAR_THETA"]

# lower bound on P[ ||QQ^T v||^2 >= q/(10n) ||v||^2 ] for q >= 3
HAAR_THETA = 243.0 / 443.0


@dataclass(frozen=True)
class Embedding:
    Q: np.ndarray
    seed_tag: tuple = ()

    @property
    def n(self):
        return self.Q.shape[0]

    @property
    def q(self):
        return self.Q.shape[1]


def haar_sample(n, q, rng, seed_tag=()):
    """Draw ``Q in R^{n x q}`` with orthonormal columns from the Haar measure.

    A standard Gaussian ``n x q`` matrix is QR-factorized and the columns of
    the orthogonal factor are flipped so that ``diag(R) > 0``; this sign fix
    makes the distribution exactly Haar.
    """
    n, q = int(n), int(q)
    if not 1 <= q <= n:
        raise ValueError(f"need 1 <= q <= n, got q={q}, n={n}")
    G = rng.standard_normal((n, q))
    Q, R = np.linalg.qr(G)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Embedding(Q * signs, tuple(seed_tag))


def alignment(Q, v):
    """Fraction ``||QQ^T v||^2 / ||v||^2`` of ``v`` captured by ``range(Q)``."""
    if isinstance(Q, Embedding):
        Q = Q.Q
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if vv == 0.0:
        raise ValueError("alignment is undefined for the zero vector")
    p = Q.T @ v
    return min(max(float(p @ p) / vv, 0.0), 1.0)


def is_well_aligned(Q, v, kappa_g):
    """``||QQ^T v - v|| <= kappa_g ||v||``, i.e. alignment >= 1 - kappa_g^2."""
    return alignment(Q, v) >= 1.0 - kappa_g * kappa_g
