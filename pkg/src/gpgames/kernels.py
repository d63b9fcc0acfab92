"""Kernel backend chosen at import: the compiled extension when it is built and
``GPG_PURE_PYTHON`` is unset, otherwise the pure-Python twin."""
from __future__ import annotations

import os

from . import _fallback

python_backend = _fallback

if os.environ.get("GPG_PURE_PYTHON"):
    compiled_backend = None
else:
    try:
        from . import _kernels as compiled_backend
    except ImportError:  # extension not built
        compiled_backend = None

backend = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if backend is compiled_backend else "python"

STOP_EQUILIBRIUM = _fallback.STOP_EQUILIBRIUM
STOP_MAX_STEPS = _fallback.STOP_MAX_STEPS

simulate_pairwise = backend.simulate_pairwise
dag_max_updates = backend.dag_max_updates
dag_max_updates_batch = backend.dag_max_updates_batch
theta_scan_batch = backend.theta_scan_batch
