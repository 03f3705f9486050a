"""Lattice kernels: Viterbi decoding and forward-backward expected counts.

Two interchangeable implementations exist:

* ``_ckernels`` -- Cython extension, built by setup.py (preferred);
* ``_pykernels`` -- pure Python, always available.

The compiled module is used when importable.  Set ``DRIFTMIX_PURE=1`` to
force the pure-Python path (used by the kernel benchmark and parity tests).
"""

import os

from . import _pykernels

if os.environ.get("DRIFTMIX_PURE"):
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _pykernels

BACKEND = _impl.BACKEND
viterbi = _impl.viterbi
lattice_counts = _impl.lattice_counts

__all__ = ["BACKEND", "viterbi", "lattice_counts"]
