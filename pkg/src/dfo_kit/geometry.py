"""Linear Lagrange polynomials, poisedness and interpolation-set maintenance.

For a complete set of ``d`` displacements stored as the columns of ``Y``,
the Lagrange polynomials of the linear basis are ``l_i(s) = s . (Y^{-T})_i``,
so the poisedness over ``B(0, Delta)`` is ``Delta * max_i ||(Y^{-T})_i||``.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .models import TOL_SING, GeometryError

__all__ = [
    "GeometrySet",
    "PoisednessReport",
    "GeometryAction",
    "ADD",
    "REPLACE_FAR",
    "REPLACE_BAD",
    "GOOD",
    "lambda_poisedness",
    "geometry_action",
    "apply_action",
    "shift_on_success",
    "orthogonal_direction",
    "orthogonal_index_set",
]

ADD = "add"
REPLACE_FAR = "replace_far"
REPLACE_BAD = "replace_bad"
GOOD = "good"

_BALL_RTOL = 1e-12
_DEGENERATE = 1e-12
_TIE_RTOL = 1e-12


class GeometrySet:
    """Interpolation displacements around the current centre with their values.

    Displacements are relative to the centre, whose value is held in
    ``center_value``; the zero displacement is never stored.
    """

    def __init__(self, dim, points=(), values=(), center_value=None):
        self.dim = int(dim)
        self.points = [np.asarray(p, dtype=float).copy() for p in points]
        self.values = [float(v) for v in values]
        self.center_value = None if center_value is None else float(center_value)
        if len(self.points) != len(self.values):
            raise ValueError("each displacement needs exactly one function value")
        if len(self.points) > self.dim:
            raise ValueError(f"at most {self.dim} displacements allowed for a linear basis")
        for p in self.points:
            if p.shape != (self.dim,):
                raise ValueError(f"displacement of shape {p.shape}, expected ({self.dim},)")

    @classmethod
    def coordinate(cls, dim, delta, values, center_value):
        """The ``delta``-scaled coordinate basis (a 1-poised set)."""
        return cls(dim, list(delta * np.eye(dim)), values, center_value)

    def __len__(self):
        return len(self.points)

    @property
    def complete(self):
        return len(self.points) == self.dim

    def matrix(self):
        """``d x m`` matrix with the displacements as columns."""
        if not self.points:
            return np.zeros((self.dim, 0))
        return np.column_stack(self.points)

    def norms(self):
        return np.array([np.linalg.norm(p) for p in self.points])

    def within(self, delta):
        return bool(np.all(self.norms() <= delta * (1.0 + _BALL_RTOL)))

    def furthest(self):
        """Index of the furthest displacement (lowest index on ties)."""
        return int(np.argmax(self.norms()))

    def copy(self):
        return GeometrySet(self.dim, self.points, self.values, self.center_value)

    def add(self, point, value):
        if len(self.points) >= self.dim:
            raise ValueError("geometry set is already complete")
        self.points.append(np.asarray(point, dtype=float).copy())
        self.values.append(float(value))

    def replace(self, index, point, value):
        self.points[index] = np.asarray(point, dtype=float).copy()
        self.values[index] = float(value)

    def __repr__(self):
        return f"GeometrySet(dim={self.dim}, size={len(self)})"


@dataclass(frozen=True)
class PoisednessReport:
    """Result of :func:`lambda_poisedness`.

    ``coeffs`` is ``Y^{-T}``; its ``i``-th column is the gradient of the
    Lagrange polynomial ``l_i``. ``argmax_point`` attains ``l_i*(s*) = lam``.
    """

    lam: float
    argmax_index: int
    argmax_point: np.ndarray
    coeffs: np.ndarray
    lagrange_max: np.ndarray


@dataclass(frozen=True)
class GeometryAction:
    """What to do with the interpolation set after an unsuccessful iteration.

    ``point`` is the displacement to insert (``None`` for :data:`GOOD`);
    ``index`` the slot to overwrite for the replace actions. ``needs_eval``
    is True when ``point`` is not the trial step, so its function value must
    be computed with a fresh oracle call.
    """

    kind: str
    index: Optional[int] = None
    point: Optional[np.ndarray] = None
    needs_eval: bool = False
    lam: Optional[float] = None


def _lowest_argmax(values):
    vmax = float(np.max(values))
    return int(np.flatnonzero(values >= vmax * (1.0 - _TIE_RTOL))[0])


def _normalize_sign(v):
    k = int(np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max())[0])
    return v if v[k] > 0 else -v


def orthogonal_direction(others, dim):
    """Unit vector orthogonal to every column of ``others`` (``dim x m``, ``m < dim``)."""
    others = np.asarray(others, dtype=float).reshape(dim, -1)
    if others.shape[1] == 0:
        e = np.zeros(dim)
        e[0] = 1.0
        return e
    # last left singular vectors span the orthogonal complement of range(others)
    U, _, _ = np.linalg.svd(others, full_matrices=True)
    return _normalize_sign(U[:, -1].copy())


def _singular(Y):
    """Return ``(Y^{-T}, lagrange column norms)`` or ``None`` if ``Y`` is numerically singular."""
    try:
        W = _kernels.inv_transpose(Y)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(W)):
        return None
    norms = _kernels.column_norms(W)
    if norms.max() * np.linalg.norm(Y, 2) > TOL_SING:
        return None
    return W, norms


def lambda_poisedness(geom, delta):
    """Exact poisedness of a complete set in ``B(0, delta)`` via ``Y^{-T}``."""
    if not geom.complete:
        raise ValueError(f"poisedness needs a complete set ({len(geom)}/{geom.dim} points)")
    Y = geom.matrix()
    inv = _singular(Y)
    if inv is None:
        raise GeometryError("interpolation set is singular")
    W, norms = inv
    lag = delta * norms
    i = _lowest_argmax(lag)
    s = delta * W[:, i] / norms[i]
    return PoisednessReport(lam=float(lag[i]), argmax_index=i, argmax_point=s, coeffs=W, lagrange_max=lag)


def _degenerate_trial(points, trial, delta, dim):
    tn = np.linalg.norm(trial)
    if tn < _DEGENERATE * delta:
        return True
    for p in points:
        if np.linalg.norm(p - trial) <= _DEGENERATE * max(delta, tn):
            return True
    M = np.column_stack(list(points) + [trial])
    sv = np.linalg.svd(M, compute_uv=False)
    return sv[-1] == 0.0 or sv[0] / sv[-1] > TOL_SING


def geometry_action(geom, delta, lam_threshold, trial):
    """First applicable geometry step after an unsuccessful iteration.

    Branch order: add a point if the set is incomplete; replace the furthest
    point if it lies outside ``B(0, delta)``; replace the point whose
    Lagrange polynomial is largest if that maximum exceeds ``lam_threshold``;
    otherwise report good geometry (the caller shrinks the radius).

    A trial step that is (near) zero, duplicates a stored point or would
    leave the set rank deficient is swapped for a radius-``delta`` direction
    orthogonal to the points that stay.
    """
    trial = np.asarray(trial, dtype=float)
    d = geom.dim
    if not geom.complete:
        if _degenerate_trial(geom.points, trial, delta, d):
            u = orthogonal_direction(geom.matrix(), d)
            return GeometryAction(ADD, point=delta * u, needs_eval=True)
        return GeometryAction(ADD, point=trial.copy())

    j = geom.furthest()
    if np.linalg.norm(geom.points[j]) > delta * (1.0 + _BALL_RTOL):
        keep = [p for i, p in enumerate(geom.points) if i != j]
        if _degenerate_trial(keep, trial, delta, d):
            u = orthogonal_direction(np.column_stack(keep) if keep else np.zeros((d, 0)), d)
            return GeometryAction(REPLACE_FAR, index=j, point=delta * u, needs_eval=True)
        return GeometryAction(REPLACE_FAR, index=j, point=trial.copy())

    Y = geom.matrix()
    if _singular(Y) is None:
        # a numerically dependent set: drop a point carrying weight in the null vector
        _, _, Vt = np.linalg.svd(Y)
        c = np.abs(Vt[-1])
        i = _lowest_argmax(c)
        keep = np.delete(Y, i, axis=1)
        u = orthogonal_direction(keep, d)
        return GeometryAction(REPLACE_BAD, index=i, point=delta * u, needs_eval=True, lam=float("inf"))

    rep = lambda_poisedness(geom, delta)
    if rep.lam > lam_threshold:
        return GeometryAction(REPLACE_BAD, index=rep.argmax_index, point=rep.argmax_point, needs_eval=True, lam=rep.lam)
    return GeometryAction(GOOD, lam=rep.lam)


def apply_action(geom, action, value=None):
    """Apply ``action`` to ``geom`` in place; ``value`` is f at the inserted point."""
    if action.kind == GOOD:
        return geom
    if value is None:
        raise ValueError(f"{action.kind} needs the function value at the inserted point")
    if action.kind == ADD:
        geom.add(action.point, value)
    else:
        geom.replace(action.index, action.point, value)
    return geom


def shift_on_success(geom, s, f_new_center):
    """Re-centre the set at ``x + s`` after a successful step.

    The furthest point is dropped, the old centre enters as displacement
    ``-s`` carrying the old centre value, and every displacement is
    translated by ``-s``. No oracle calls are made.
    """
    s = np.asarray(s, dtype=float)
    points = list(geom.points)
    values = list(geom.values)
    if points:
        j = geom.furthest()
        del points[j]
        del values[j]
    points = [p - s for p in points] + [-s]
    values = values + [geom.center_value]
    return GeometrySet(geom.dim, points, values, f_new_center)


def orthogonal_index_set(geom, delta, tol=1e-10):
    """Indices of points with norm ``delta`` orthogonal to all other points."""
    pts = geom.points
    out = []
    for i, p in enumerate(pts):
        if abs(np.linalg.norm(p) - delta) > tol * delta:
            continue
        if all(abs(p @ q) <= tol * delta * delta for j, q in enumerate(pts) if j != i):
            out.append(i)
    return out
