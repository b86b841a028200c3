"""Integration backends.

The hot RK4 loops exist twice: a Cython extension (``_core``) using direct
BLAS calls, and a pure numpy reference (``_numpy_ref``). The compiled kernel
is preferred when it imported cleanly; set SUPERLUM_PURE_PYTHON=1 to force
the fallback. ``benchmarks/bench_kernels.py`` compares the two.
"""

import os

from . import _numpy_ref
from .plan import CollapsePlan, Schedule, pack_collapse, stage_times, step_bound, substep_count

if os.environ.get("SUPERLUM_PURE_PYTHON"):
    _impl = _numpy_ref
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _numpy_ref

BACKEND = _impl.BACKEND_NAME

lindblad_interval = _impl.lindblad_interval
schrodinger_interval = _impl.schrodinger_interval
# the generic-collapse path always runs in numpy; it is off the hot paths
lindblad_interval_dense = _numpy_ref.lindblad_interval_dense


def available_backends():
    names = ["numpy"]
    try:
        from . import _core  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get_interval_functions(backend: str | None = None):
    """Explicit backend selection, mainly for benchmarks and parity tests."""
    if backend in (None, BACKEND):
        return lindblad_interval, schrodinger_interval
    if backend == "numpy":
        return _numpy_ref.lindblad_interval, _numpy_ref.schrodinger_interval
    if backend == "cython":
        from . import _core

        return _core.lindblad_interval, _core.schrodinger_interval
    raise ValueError(f"unknown backend {backend!r}")
