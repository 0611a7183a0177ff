"""Hot elementwise kernels with a numba backend and a numpy fallback.

The active backend is chosen once at import time from the environment
variable ``LINKVAR_BACKEND`` (``"numba"`` or ``"numpy"``). When the
variable is unset the numba backend is used if numba imports, otherwise
the numpy fallback is selected silently. ``set_backend`` re-binds the
public functions in place and exists for benchmarks and equivalence
tests; callers that need to honor it must access the kernels as module
attributes (``kernels.soft_threshold(...)``) rather than importing the
functions directly.
"""

import os

from . import _numpy

_PUBLIC = (
    "soft_threshold",
    "positive_part",
    "prox_input",
    "relax",
    "l1_term_update",
    "cone_term_update",
    "average2",
    "average3",
    "w_prox_step",
    "auc_pair_counts",
)

_IMPLEMENTATIONS = {"numpy": _numpy}

try:
    from . import _numba

    _IMPLEMENTATIONS["numba"] = _numba
except ImportError:
    _numba = None

BACKEND = None


def available_backends():
    """Names of the importable backends, numpy first."""
    return tuple(sorted(_IMPLEMENTATIONS))


def set_backend(name):
    """Re-bind the public kernel functions to the named backend."""
    global BACKEND
    if name not in ("numpy", "numba"):
        raise ValueError(f"unknown kernel backend {name!r}; use 'numpy' or 'numba'")
    if name not in _IMPLEMENTATIONS:
        raise ImportError("kernel backend 'numba' requested but numba is not installed")
    impl = _IMPLEMENTATIONS[name]
    for fn in _PUBLIC:
        globals()[fn] = getattr(impl, fn)
    BACKEND = name


def _default_backend():
    env = os.environ.get("LINKVAR_BACKEND")
    if env is not None:
        return env
    return "numba" if "numba" in _IMPLEMENTATIONS else "numpy"


set_backend(_default_backend())
