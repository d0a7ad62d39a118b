"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise
the numpy fallback is used.  Set ``BIQUAT_KGE_BACKEND`` to ``numpy`` or
``compiled`` to force a choice (``compiled`` raises if the extension is
missing), or call :func:`use` at runtime.
"""

import os

from . import numpy_backend

_compiled_import_error = None
try:
    from . import _fastcore as _compiled
except ImportError as exc:  # extension not built
    _compiled = None
    _compiled_import_error = exc


def available() -> list[str]:
    names = ["numpy"]
    if _compiled is not None:
        names.append("compiled")
    return names


def get(name: str):
    """Return a backend module by name."""
    if name == "numpy":
        return numpy_backend
    if name == "compiled":
        if _compiled is None:
            raise ImportError(
                "compiled backend is not available; build the extension with "
                "'pip install -e . --no-build-isolation'"
            ) from _compiled_import_error
        return _compiled
    raise ValueError(f"unknown backend {name!r}; expected 'numpy' or 'compiled'")


_requested = os.environ.get("BIQUAT_KGE_BACKEND", "auto").strip().lower()
if _requested in ("", "auto"):
    _active = _compiled if _compiled is not None else numpy_backend
else:
    _active = get(_requested)


def active():
    """The backend module used by the model kernels."""
    return _active


def use(name: str):
    """Switch the active backend; intended for tests and benchmarks."""
    global _active
    _active = get(name)
    return _active
