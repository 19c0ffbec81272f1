"""Kernel backend selection.

The compiled extension ``natlift._ckernels`` is used when it imports; otherwise
the pure-Python module :mod:`natlift._kernels_py` takes over.  Both expose the
same functions with identical semantics.
"""

from __future__ import annotations

from . import _kernels_py

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_NAMES = ("christoffel", "riemann", "contract_last", "contract_last_deriv", "curvature_families")

BACKEND = "python"
christoffel = _kernels_py.christoffel
riemann = _kernels_py.riemann
contract_last = _kernels_py.contract_last
contract_last_deriv = _kernels_py.contract_last_deriv
curvature_families = _kernels_py.curvature_families


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _ckernels is not None else [])


def use_backend(name: str) -> None:
    """Switch every kernel to ``"cython"`` or ``"python"``."""
    global BACKEND
    if name == "cython":
        if _ckernels is None:
            raise ImportError("the compiled kernels (natlift._ckernels) are not built")
        impl = _ckernels
    elif name == "python":
        impl = _kernels_py
    else:
        raise ValueError(f"unknown kernel backend {name!r}")
    g = globals()
    for fn in _NAMES:
        g[fn] = getattr(impl, fn)
    BACKEND = name


if _ckernels is not None:
    use_backend("cython")
