"""Pick the kernel implementation once, at import.

The compiled extension is preferred.  Setting ``LAMBDAGEN_PURE_PYTHON=1``
forces the pure-Python kernels, which are also used when the extension was
not built.
"""
import importlib
import os

from . import _kernels_py

_FORCE_PURE = os.environ.get("LAMBDAGEN_PURE_PYTHON", "").strip().lower() not in ("", "0", "false", "no")


def load_backend(name: str):
    """Return the kernel module called ``name`` (``"compiled"`` or ``"python"``)."""
    if name == "python":
        return _kernels_py
    if name == "compiled":
        return importlib.import_module("lambdagen._kernels")
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    names = ["python"]
    try:
        load_backend("compiled")
    except ImportError:
        pass
    else:
        names.insert(0, "compiled")
    return names


if _FORCE_PURE:
    _active = _kernels_py
else:
    try:
        _active = load_backend("compiled")
    except ImportError:
        _active = _kernels_py


def kernels():
    """The active kernel module."""
    return _active


def backend_name() -> str:
    return _active.NAME
