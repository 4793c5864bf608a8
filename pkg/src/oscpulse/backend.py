"""Backend selection for the hot inner loops.

The compiled Cython extension is preferred when importable; otherwise the
pure numpy implementation takes over.  Set OSCPULSE_BACKEND=pure or
OSCPULSE_BACKEND=compiled to force a choice (forcing "compiled" raises if
the extension is missing).
"""

import os

_requested = os.environ.get("OSCPULSE_BACKEND", "").strip().lower()

if _requested == "pure":
    from . import _purekernels as _impl
    BACKEND = "pure"
elif _requested in ("", "compiled"):
    try:
        from . import _kernels as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        from . import _purekernels as _impl
        BACKEND = "pure"
else:
    raise ValueError(f"unknown OSCPULSE_BACKEND value {_requested!r}")

coupled_rk4 = _impl.coupled_rk4
coupled_abm4 = _impl.coupled_abm4
monodromy_grid = _impl.monodromy_grid


def backend_name():
    return BACKEND
