"""Backend selection for the statevector hot loops.

``EXCITEQ_NUMBA=0`` forces the pure-numpy path; otherwise the numba kernels
are used whenever numba imports cleanly.  ``EXCITEQ_THREADS`` caps numba's
thread pool.
"""

from __future__ import annotations

import os

from . import _numpy

BACKEND = "numpy"
_impl = _numpy

if os.environ.get("EXCITEQ_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off"):
    try:
        from . import _numba

        _impl = _numba
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - depends on environment
        pass

if BACKEND == "numba" and os.environ.get("EXCITEQ_THREADS"):
    import numba

    numba.set_num_threads(
        max(1, min(int(os.environ["EXCITEQ_THREADS"]), numba.config.NUMBA_NUM_THREADS))
    )

parity = _impl.parity
pauli_apply = _impl.pauli_apply
pauli_coo = _impl.pauli_coo
apply_1q = _impl.apply_1q
rotate_pairs = _impl.rotate_pairs
generator_apply = _impl.generator_apply

__all__ = [
    "BACKEND",
    "parity",
    "pauli_apply",
    "pauli_coo",
    "apply_1q",
    "rotate_pairs",
    "generator_apply",
]
