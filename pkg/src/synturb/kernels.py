"""Backend selection for the hot loops.

The compiled extension is used when importable; set ``SYNTURB_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from . import _core_py

BACKEND = "python"
_impl = _core_py
if not os.environ.get("SYNTURB_PURE_PYTHON"):
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _core_py


def get_backend(name=None):
    """Kernel module by name (``"cython"`` or ``"python"``); default is the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _core_py
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")


increment_sum = _impl.increment_sum
euler_step = _impl.euler_step
limit_step = _impl.limit_step
