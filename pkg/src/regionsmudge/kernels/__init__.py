"""Kernel backend selection.

Hot pixel loops (distance transform, component labeling, stroke
rasterization, smudge stamping, mean-shift filtering) exist twice: a
numba-jitted implementation and a pure-numpy fallback with identical
numerics. The active backend is chosen by the ``REGIONSMUDGE_BACKEND``
environment variable (``numba``, ``numpy`` or ``auto``; default auto)
and can be switched at runtime with :func:`set_backend`. ``auto`` uses
numba when it imports, numpy otherwise.
"""

from __future__ import annotations

import os

from . import numpy_impl

_IMPLS = {"numpy": numpy_impl}
_numba_error: Exception | None = None
try:
    from . import numba_impl

    _IMPLS["numba"] = numba_impl
except ImportError as exc:  # pragma: no cover - numba is a hard dep normally
    _numba_error = exc


def _resolve(name: str):
    if name == "auto":
        return _IMPLS.get("numba", numpy_impl)
    if name not in _IMPLS:
        if name == "numba":
            raise RuntimeError(f"numba backend unavailable: {_numba_error}")
        raise ValueError(f"unknown kernel backend {name!r}")
    return _IMPLS[name]


_active = _resolve(os.environ.get("REGIONSMUDGE_BACKEND", "auto"))


def set_backend(name: str) -> str:
    """Select the kernel backend; returns the previous backend name."""
    global _active
    prev = _active.BACKEND_NAME
    _active = _resolve(name)
    return prev


def active_backend() -> str:
    return _active.BACKEND_NAME


def available_backends() -> list[str]:
    return sorted(_IMPLS)


def get_impl(name: str | None = None):
    """Return the kernel module for `name` (or the active one)."""
    return _active if name is None else _resolve(name)


def edt_sq(mask):
    return _active.edt_sq(mask)


def label_from_adjacency(join_w, join_n):
    return _active.label_from_adjacency(join_w, join_n)


def stadium_mask(pts, radius, h, w):
    return _active.stadium_mask(pts, radius, h, w)


def stamp(canvas, mask, data, valid, ax, ay, rbuf, cx, cy, radius, strength, pickup_rate):
    return _active.stamp(
        canvas, mask, data, valid, ax, ay, rbuf, cx, cy, radius, strength, pickup_rate
    )


def mean_shift_modes(img, hs, hc, max_iter, tol):
    return _active.mean_shift_modes(img, hs, hc, max_iter, tol)
