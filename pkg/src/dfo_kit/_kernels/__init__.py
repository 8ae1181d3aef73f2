"""Hot numerical kernels with a compiled core and a pure-Python fallback.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
numpy implementations in ``_pykernels`` are bound. Setting the environment
variable ``DFO_KIT_PURE_PYTHON=1`` forces the fallback. Callers should look
functions up through this module (``_kernels.cauchy_step(...)``) so that
:func:`set_backend` takes effect everywhere.
"""
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

__all__ = [
    "BACKEND",
    "available_backends",
    "set_backend",
    "noise_unit",
    "cauchy_step",
    "steihaug_cg",
    "inv_transpose",
    "column_norms",
]

_EXPORTS = ("noise_unit", "cauchy_step", "steihaug_cg", "inv_transpose", "column_norms")


def available_backends():
    names = ["python"]
    if _ckernels is not None:
        names.insert(0, "cython")
    return names


def set_backend(name):
    """Bind the kernel functions of backend ``name`` ("cython" or "python")."""
    global BACKEND
    if name == "cython":
        if _ckernels is None:
            raise ImportError("compiled kernels are not available in this install")
        impl = _ckernels
    elif name == "python":
        impl = _pykernels
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    g = globals()
    for fn in _EXPORTS:
        g[fn] = getattr(impl, fn)
    BACKEND = name


BACKEND = None
if os.environ.get("DFO_KIT_PURE_PYTHON", "") not in ("", "0") or _ckernels is None:
    set_backend("python")
else:
    set_backend("cython")
