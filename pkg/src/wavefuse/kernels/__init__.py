"""Kernel implementation selection.

The hot stride-2 filtering loops exist twice: a compiled Cython extension
(``_ckernels``) and a NumPy fallback (``pykernels``).  Both implement the
same pinned float32 operation order, so results are bit-identical; the
compiled core is simply faster.  Selection happens at import time; set
``WAVEFUSE_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

import numpy as np

from . import pykernels

LANE_WIDTH = pykernels.LANE_WIDTH

_FORCE_PURE = os.environ.get("WAVEFUSE_PURE", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _ckernels
        IMPL = "compiled"
        HAS_LANE_ISA = bool(_ckernels.has_lane_isa())
    except ImportError:
        _ckernels = None
        IMPL = "python"
        HAS_LANE_ISA = False
else:
    _ckernels = None
    IMPL = "python"
    HAS_LANE_ISA = False


def _f32(a):
    return np.ascontiguousarray(a, dtype=np.float32)


def analysis_plane(ext, lp, hp, order="scalar"):
    """Stride-2 12-tap dual filtering of each row; returns (lo, hi)."""
    ext = _f32(ext)
    lp = _f32(lp)
    hp = _f32(hp)
    if ext.shape[1] < 12 or (ext.shape[1] - 12) % 2:
        raise ValueError("extended rows must have length 2*outwidth + 12")
    if IMPL == "compiled":
        return _ckernels.analysis_plane(ext, lp, hp, 1 if order == "vector" else 0)
    if order == "vector":
        return pykernels.analysis_plane_vector(ext, lp, hp)
    return pykernels.analysis_plane_scalar(ext, lp, hp)


def synthesis_plane(lo_ext, hi_ext, slp, shp, order="scalar"):
    """Upsample-and-sum synthesis of coefficient rows; returns sample rows."""
    lo_ext = _f32(lo_ext)
    hi_ext = _f32(hi_ext)
    slp = _f32(slp)
    shp = _f32(shp)
    if lo_ext.shape != hi_ext.shape:
        raise ValueError("lo and hi coefficient planes must have equal shape")
    if lo_ext.shape[1] < 7:
        raise ValueError("synthesis needs at least 7 coefficient pairs per row")
    if IMPL == "compiled":
        return _ckernels.synthesis_plane(lo_ext, hi_ext, slp, shp,
                                         1 if order == "vector" else 0)
    if order == "vector":
        return pykernels.synthesis_plane_vector(lo_ext, hi_ext, slp, shp)
    return pykernels.synthesis_plane_scalar(lo_ext, hi_ext, slp, shp)


vector_dot = pykernels.vector_dot
scalar_dot = pykernels.scalar_dot
