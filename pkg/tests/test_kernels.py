import numpy as np
from numpy.testing import assert_allclose
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from dfo_kit import _kernels
from dfo_kit._kernels import _pykernels

try:
    from dfo_kit._kernels import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

needs_c = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")
finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def test_backend_switch_rebinds_module_functions():
    prev = _kernels.BACKEND
    try:
        _kernels.set_backend("python")
        assert _kernels.cauchy_step is _pykernels.cauchy_step
        assert _kernels.BACKEND == "python"
    finally:
        _kernels.set_backend(prev)
    with pytest.raises(ValueError):
        _kernels.set_backend("fortran")


def test_noise_unit_in_unit_interval(backend):
    rng = np.random.default_rng(0)
    u = [_kernels.noise_unit(s, rng.standard_normal(3)) for s in range(500)]
    assert min(u) >= 0.0 and max(u) < 1.0
    # roughly uniform
    assert abs(np.mean(u) - 0.5) < 0.05


def test_noise_unit_depends_on_bits(backend):
    x = np.array([1.0, 2.0])
    y = np.array([1.0, np.nextafter(2.0, 3.0)])
    assert _kernels.noise_unit(3, x) == _kernels.noise_unit(3, x.copy())
    assert _kernels.noise_unit(3, x) != _kernels.noise_unit(3, y)
    assert _kernels.noise_unit(3, x) != _kernels.noise_unit(4, x)


@needs_c
@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**64 - 1), arrays(np.float64, st.integers(1, 6), elements=finite))
def test_noise_hash_identical_across_backends(seed, x):
    assert _pykernels.noise_unit(seed, x) == _ckernels.noise_unit(seed, x)


@needs_c
@settings(max_examples=100, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_cauchy_and_cg_agree_across_backends(d, seed, delta):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(d)
    B = rng.standard_normal((d, d))
    H = 0.5 * (B + B.T)
    s_py, dec_py = _pykernels.cauchy_step(g, H, delta)
    s_c, dec_c = _ckernels.cauchy_step(g, H, delta)
    assert_allclose(s_c, s_py, rtol=1e-12, atol=1e-14 * delta)
    assert_allclose(dec_c, dec_py, rtol=1e-10, atol=1e-300)
    cg_py = _pykernels.steihaug_cg(g, H, delta, d, 1e-10)
    cg_c = _ckernels.steihaug_cg(g, H, delta, d, 1e-10)
    assert_allclose(cg_c, cg_py, rtol=1e-8, atol=1e-10 * delta)


@needs_c
def test_inv_transpose_agrees_and_detects_singular():
    rng = np.random.default_rng(1)
    for d in range(1, 9):
        Y = rng.standard_normal((d, d))
        assert_allclose(_ckernels.inv_transpose(Y), _pykernels.inv_transpose(Y), rtol=1e-9, atol=1e-12)
        assert_allclose(_ckernels.inv_transpose(Y).T @ Y, np.eye(d), atol=1e-10)
    with pytest.raises(np.linalg.LinAlgError):
        _ckernels.inv_transpose(np.zeros((3, 3)))


def test_column_norms(backend):
    W = np.array([[3.0, 0.0], [4.0, 2.0]])
    assert_allclose(_kernels.column_norms(W), [5.0, 2.0])


def test_cg_negative_curvature_hits_boundary(backend):
    s = _kernels.steihaug_cg(np.array([1.0, 0.0]), -np.eye(2), 1.0, 2, 1e-10)
    assert_allclose(np.linalg.norm(s), 1.0, rtol=1e-12)
