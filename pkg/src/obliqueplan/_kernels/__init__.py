"""Hot kernels: chain length and its smoothed derivatives, Held-Karp table,
2-opt, and the surrogate constraint evaluations.

The compiled extension is used when it was built; otherwise, or when
``OBLIQUEPLAN_PURE_PYTHON=1`` is set, the numpy implementations are used.
Both expose the same functions.
"""
import os

from . import _pykernels as python_backend

compiled_backend = None
if os.environ.get("OBLIQUEPLAN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as compiled_backend
    except ImportError:
        compiled_backend = None

_active = compiled_backend if compiled_backend is not None else python_backend
BACKEND = "cython" if compiled_backend is not None else "python"

chain_length = _active.chain_length
smoothed_chain = _active.smoothed_chain
held_karp_table = _active.held_karp_table
two_opt = _active.two_opt
altitude_constraints = _active.altitude_constraints
horizontal_constraints = _active.horizontal_constraints

__all__ = ["BACKEND", "chain_length", "smoothed_chain", "held_karp_table", "two_opt",
           "altitude_constraints", "horizontal_constraints",
           "python_backend", "compiled_backend"]
