"""Backend selection for the hot tube-flux kernel.

The compiled extension is used when importable; set ``LW6_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

import numpy as np

from . import _kernels_py

BACKEND = "python"
_compiled = None
if os.environ.get("LW6_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _compiled = None


def _as_c(v):
    return np.ascontiguousarray(v, dtype=float)


def tube_density(z, u, a, adot, k, w, backend: str | None = None):
    """Dispatch to the selected backend; see ``_kernels_py.tube_density``."""
    name = backend or BACKEND
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel not available")
        return _compiled.tube_density(_as_c(z), _as_c(u), _as_c(a), _as_c(adot), _as_c(k), _as_c(w))
    if name == "python":
        return _kernels_py.tube_density(_as_c(z), _as_c(u), _as_c(a), _as_c(adot), _as_c(k), _as_c(w))
    raise ValueError(f"unknown backend {name!r}")


def available_backends() -> list[str]:
    return ["python"] + (["cython"] if _compiled is not None else [])
