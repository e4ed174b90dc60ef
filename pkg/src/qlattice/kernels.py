"""Backend selection for the term kernel.

The compiled extension is used when it was built; otherwise the pure
Python implementation is used.  :func:`set_backend` switches explicitly
(the benchmark and the tests use it to compare both).
"""
from __future__ import annotations

import numpy as np

from . import _kernels_py

try:  # pragma: no cover - depends on build
    from . import _kernels as _compiled
except ImportError:  # pragma: no cover
    _compiled = None

_impl = _compiled.eval_points if _compiled is not None else _kernels_py.eval_points


def available() -> list[str]:
    return ["python"] + (["compiled"] if _compiled is not None else [])


def backend() -> str:
    return "compiled" if _compiled is not None and _impl is _compiled.eval_points else "python"


def set_backend(name: str) -> None:
    global _impl
    if name == "python":
        _impl = _kernels_py.eval_points
    elif name == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not built")
        _impl = _compiled.eval_points
    else:
        raise ValueError(f"unknown backend {name!r}")


def eval_points(idx, signs, units, orders, origins, qexp, qunits, qorigin, cunit, corder):
    idx = np.ascontiguousarray(idx, dtype=np.int64)
    if idx.ndim != 2:
        idx = idx.reshape(len(qexp), -1)
    qexp = np.ascontiguousarray(qexp, dtype=np.int64)
    return _impl(idx, signs, units, orders, origins, qexp, qunits, int(qorigin), cunit, int(corder))
