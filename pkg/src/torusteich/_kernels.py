"""Kernel selection.

The compiled ``_ckernels`` module is used when it was built and
``TORUSTEICH_PURE_PYTHON`` is unset; otherwise ``_pykernels`` is used.
The compiled ball enumeration works in 64-bit integers and transparently
falls back to the exact Python path if entries grow too large.
"""

import os
from collections.abc import Sequence

import numpy as np

from . import _pykernels

try:
    if os.environ.get("TORUSTEICH_PURE_PYTHON"):
        raise ImportError("pure-Python kernels requested")
    from . import _ckernels
except ImportError:
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


class MatrixTable(Sequence):
    """Read-only list of matrices stored either as 4-tuples or as an ``(n, 4)`` int64 array.

    Items are always 4-tuples of Python ints; ``floats()`` gives the
    float64 array the vectorized scans use, without building tuples.
    """

    def __init__(self, data):
        self._data = data
        self._floats = None

    def __len__(self):
        return len(self._data)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return [self[i] for i in range(*k.indices(len(self)))]
        row = self._data[k]
        return tuple(row.tolist()) if isinstance(self._data, np.ndarray) else row

    def __iter__(self):
        if isinstance(self._data, np.ndarray):
            return map(tuple, self._data.tolist())
        return iter(self._data)

    def __eq__(self, other):
        return list(self) == list(other)

    def floats(self) -> np.ndarray:
        if self._floats is None:
            self._floats = np.asarray(self._data, dtype=np.float64).reshape(-1, 4)
        return self._floats


def ball_bfs(alphabet, depth, cap, backend=None):
    impl = _select(backend)
    if impl is not _pykernels:
        try:
            mats, parent, letter, level, closed = impl.ball_bfs(alphabet, depth, cap)
            return MatrixTable(mats), parent, letter, level, closed
        except OverflowError:
            pass
    mats, parent, letter, level, closed = _pykernels.ball_bfs(alphabet, depth, cap)
    return MatrixTable(mats), parent, letter, level, closed


def orbit_scan(mats, tau0, x, y, backend=None):
    m = mats.floats() if isinstance(mats, MatrixTable) else np.asarray(mats, dtype=np.float64).reshape(-1, 4)
    return _select(backend).orbit_scan(m, complex(tau0), float(x), float(y))


def _select(backend):
    if backend is None:
        backend = BACKEND
    if backend == "python":
        return _pykernels
    if backend == "cython":
        if _ckernels is None:
            raise RuntimeError("compiled kernels are not available")
        return _ckernels
    raise ValueError(f"unknown kernel backend {backend!r}")
