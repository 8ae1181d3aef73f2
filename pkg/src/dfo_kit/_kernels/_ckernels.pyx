# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot kernels (see ``_pykernels`` for the reference)."""
import numpy as np

from libc.math cimport sqrt, fabs
from libc.stdint cimport uint64_t

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t _splitmix64(uint64_t z) nogil:
    z = z + _GOLDEN
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def noise_unit(seed, x):
    cdef const uint64_t[::1] words = np.ascontiguousarray(x, dtype=np.float64).view(np.uint64)
    cdef uint64_t h = _splitmix64((<uint64_t>(int(seed) & 0xFFFFFFFFFFFFFFFF)) ^ _GOLDEN)
    cdef Py_ssize_t i, n = words.shape[0]
    for i in range(n):
        h = _splitmix64(h ^ words[i])
    h = _splitmix64(h ^ <uint64_t>n)
    return <double>(h >> 11) * _INV_2_53


cdef double _dot(const double[:] a, const double[:] b) nogil:
    cdef Py_ssize_t i
    cdef double acc = 0.0
    for i in range(a.shape[0]):
        acc += a[i] * b[i]
    return acc


cdef void _matvec(const double[:, :] H, const double[:] v, double[:] out) nogil:
    cdef Py_ssize_t i, j, n = v.shape[0]
    cdef double acc
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += H[i, j] * v[j]
        out[i] = acc


def cauchy_step(g_in, H_in, double delta):
    cdef const double[:] g = np.asarray(g_in, dtype=np.float64)
    cdef const double[:, :] H = np.asarray(H_in, dtype=np.float64)
    cdef Py_ssize_t i, n = g.shape[0]
    s_arr = np.zeros(n)
    cdef double[:] s = s_arr
    cdef double gnorm = sqrt(_dot(g, g))
    if gnorm == 0.0:
        return s_arr, 0.0
    Hg_arr = np.empty(n)
    cdef double[:] Hg = Hg_arr
    _matvec(H, g, Hg)
    cdef double gHg = _dot(g, Hg)
    cdef double t = delta / gnorm
    if gHg > 0.0 and gnorm * gnorm / gHg < t:
        t = gnorm * gnorm / gHg
    for i in range(n):
        s[i] = -t * g[i]
    return s_arr, t * gnorm * gnorm - 0.5 * t * t * gHg


cdef double _boundary_tau(double[:] s, double[:] p, double delta) nogil:
    cdef double a = _dot(p, p)
    cdef double b = 2.0 * _dot(s, p)
    cdef double c = _dot(s, s) - delta * delta
    cdef double disc = b * b - 4.0 * a * c
    if disc < 0.0:
        disc = 0.0
    return (-b + sqrt(disc)) / (2.0 * a)


def steihaug_cg(g_in, H_in, double delta, int maxiter, double rtol):
    cdef const double[:] g = np.asarray(g_in, dtype=np.float64)
    cdef const double[:, :] H = np.asarray(H_in, dtype=np.float64)
    cdef Py_ssize_t i, n = g.shape[0]
    cdef int it
    s_arr = np.zeros(n)
    cdef double[:] s = s_arr
    cdef double[:] r = np.array(g, dtype=np.float64)
    cdef double[:] p = np.empty(n)
    cdef double[:] Hp = np.empty(n)
    cdef double gnorm = sqrt(_dot(g, g))
    cdef double rr, rr_next, curv, alpha, tau, nrm2, beta
    if gnorm == 0.0:
        return s_arr
    for i in range(n):
        p[i] = -r[i]
    rr = _dot(r, r)
    for it in range(maxiter):
        _matvec(H, p, Hp)
        curv = _dot(p, Hp)
        if curv <= 0.0:
            tau = _boundary_tau(s, p, delta)
            for i in range(n):
                s[i] += tau * p[i]
            return s_arr
        alpha = rr / curv
        nrm2 = 0.0
        for i in range(n):
            nrm2 += (s[i] + alpha * p[i]) * (s[i] + alpha * p[i])
        if sqrt(nrm2) >= delta:
            tau = _boundary_tau(s, p, delta)
            for i in range(n):
                s[i] += tau * p[i]
            return s_arr
        for i in range(n):
            s[i] += alpha * p[i]
            r[i] += alpha * Hp[i]
        rr_next = _dot(r, r)
        if sqrt(rr_next) <= rtol * gnorm:
            break
        beta = rr_next / rr
        for i in range(n):
            p[i] = -r[i] + beta * p[i]
        rr = rr_next
    return s_arr


def inv_transpose(Y_in):
    """Gauss-Jordan inverse with partial pivoting, returned transposed."""
    A_arr = np.array(Y_in, dtype=np.float64, order="C")
    cdef double[:, ::1] A = A_arr
    cdef Py_ssize_t n = A.shape[0]
    if A.shape[1] != n:
        raise np.linalg.LinAlgError("matrix must be square")
    inv_arr = np.eye(n)
    cdef double[:, ::1] B = inv_arr
    cdef Py_ssize_t i, j, k, piv
    cdef double best, f, tmp
    cdef bint singular = False
    with nogil:
        for k in range(n):
            piv = k
            best = fabs(A[k, k])
            for i in range(k + 1, n):
                if fabs(A[i, k]) > best:
                    best = fabs(A[i, k])
                    piv = i
            if best == 0.0:
                singular = True
                break
            if piv != k:
                for j in range(n):
                    tmp = A[k, j]; A[k, j] = A[piv, j]; A[piv, j] = tmp
                    tmp = B[k, j]; B[k, j] = B[piv, j]; B[piv, j] = tmp
            f = 1.0 / A[k, k]
            for j in range(n):
                A[k, j] *= f
                B[k, j] *= f
            for i in range(n):
                if i != k:
                    f = A[i, k]
                    if f != 0.0:
                        for j in range(n):
                            A[i, j] -= f * A[k, j]
                            B[i, j] -= f * B[k, j]
    if singular:
        raise np.linalg.LinAlgError("Singular matrix")
    return inv_arr.T.copy()


def column_norms(W_in):
    cdef const double[:, :] W = np.asarray(W_in, dtype=np.float64)
    cdef Py_ssize_t i, j, m = W.shape[0], n = W.shape[1]
    out_arr = np.empty(n)
    cdef double[:] out = out_arr
    cdef double acc
    for j in range(n):
        acc = 0.0
        for i in range(m):
            acc += W[i, j] * W[i, j]
        out[j] = sqrt(acc)
    return out_arr
