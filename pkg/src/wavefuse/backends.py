"""Compute backend abstraction: scalar, lane-vectorized, accelerator model.

All three expose identical filtering semantics.  Scalar and Vector run on
the host kernels (compiled extension when built, NumPy fallback otherwise,
bit-identical either way); Accel routes every line through the simulated
engine, which uses the scalar accumulation order and is therefore
bit-identical to Scalar while also accounting modeled cycles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .costmodel import CostModelParams
from .engine import (AREA_WORDS, EngineState, load_coefficients,
                     stream_forward_rows, stream_inverse_rows)
from .errors import CapacityExceeded

EQUIVALENCE_REL_TOL = 1e-5


class BackendId(Enum):
    SCALAR = "scalar"
    VECTOR = "vector"
    ACCEL = "accel"

    def __str__(self):
        return self.value

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown backend {value!r}; "
                             "expected scalar|vector|accel") from None


@dataclass(frozen=True)
class CapabilityReport:
    available: tuple
    lane_width: int
    impl: str
    vector_fallback: bool

    def modes(self):
        return [b.value for b in self.available]


def capability_report() -> CapabilityReport:
    """Which backends are live.  Scalar is always present; Vector falls back
    to the lane-order emulation when no lane ISA was compiled in."""
    return CapabilityReport(
        available=(BackendId.SCALAR, BackendId.VECTOR, BackendId.ACCEL),
        lane_width=kernels.LANE_WIDTH,
        impl=kernels.IMPL,
        vector_fallback=not kernels.HAS_LANE_ISA,
    )


class _CpuExecutor:
    backend = None
    _order = None

    def analysis(self, ext_rows, lp, hp):
        return kernels.analysis_plane(ext_rows, lp, hp, order=self._order)

    def synthesis(self, lo_ext, hi_ext, slp, shp):
        return kernels.synthesis_plane(lo_ext, hi_ext, slp, shp, order=self._order)


class ScalarExecutor(_CpuExecutor):
    backend = BackendId.SCALAR
    _order = "scalar"


class VectorExecutor(_CpuExecutor):
    backend = BackendId.VECTOR
    _order = "vector"


class AccelExecutor:
    """Engine-backed executor.  Owns one EngineState; not thread-safe across
    concurrent submissions (one engine instance per thread)."""

    backend = BackendId.ACCEL

    def __init__(self, state: EngineState = None,
                 params: CostModelParams = None):
        self.state = state or EngineState(params=params or CostModelParams())
        self._loaded = None

    @property
    def cycles(self):
        return self.state.cycle_counter

    def _ensure_taps(self, lp, hp):
        key = (lp.tobytes(), hp.tobytes())
        if self._loaded != key:
            load_coefficients(self.state, lp, hp)
            self._loaded = key

    def analysis(self, ext_rows, lp, hp):
        ext_rows = np.ascontiguousarray(ext_rows, dtype=np.float32)
        lp = np.ascontiguousarray(lp, dtype=np.float32)
        hp = np.ascontiguousarray(hp, dtype=np.float32)
        m = ext_rows.shape[1]
        if m > AREA_WORDS:
            raise CapacityExceeded(f"line of {m} words exceeds the transfer area")
        self._ensure_taps(lp, hp)
        outwidth = (m - 12) // 2
        packed, _ = stream_forward_rows(self.state, ext_rows, outwidth)
        hi = np.ascontiguousarray(packed[:, 0::2])
        lo = np.ascontiguousarray(packed[:, 1::2])
        return lo, hi

    def synthesis(self, lo_ext, hi_ext, slp, shp):
        lo_ext = np.ascontiguousarray(lo_ext, dtype=np.float32)
        hi_ext = np.ascontiguousarray(hi_ext, dtype=np.float32)
        slp = np.ascontiguousarray(slp, dtype=np.float32)
        shp = np.ascontiguousarray(shp, dtype=np.float32)
        if 2 * lo_ext.shape[1] > AREA_WORDS:
            raise CapacityExceeded("coefficient line exceeds the transfer area")
        self._ensure_taps(slp, shp)
        outwidth = lo_ext.shape[1] - 6
        out, _ = stream_inverse_rows(self.state, hi_ext, lo_ext, outwidth)
        return out


def get_executor(backend, params: CostModelParams = None):
    """Resolve a BackendId (or string, or ready executor) to an executor."""
    if hasattr(backend, "analysis") and hasattr(backend, "synthesis"):
        return backend
    backend = BackendId.parse(backend)
    if backend is BackendId.SCALAR:
        return ScalarExecutor()
    if backend is BackendId.VECTOR:
        return VectorExecutor()
    return AccelExecutor(params=params)


def backend_analysis_pair(backend, line, lp, hp):
    """Line-level analysis on the chosen backend (same contract everywhere)."""
    from .transform import analysis_pair
    return analysis_pair(line, lp, hp, backend=backend)


def backend_synthesis_pair(backend, lo, hi, lp_s, hp_s):
    from .transform import synthesis_pair
    return synthesis_pair(lo, hi, lp_s, hp_s, backend=backend)


@dataclass(frozen=True)
class EquivalenceReport:
    reference: BackendId
    candidate: BackendId
    sizes: tuple
    max_rel_deviation: float
    per_size: dict = field(default_factory=dict)
    tolerance: float = EQUIVALENCE_REL_TOL

    @property
    def passed(self):
        return self.max_rel_deviation < self.tolerance


def _rel_dev(candidate, reference):
    c = candidate.astype(np.float64)
    r = reference.astype(np.float64)
    return float(np.max(np.abs(c - r) / (np.abs(r) + 1.0)))


def verify_equivalence(reference, candidate, sizes, levels=2, seed=1234,
                       tolerance=EQUIVALENCE_REL_TOL) -> EquivalenceReport:
    """Run full forward+inverse on seeded random frames per size and record
    the element-wise relative deviation between the two backends."""
    from .filters import default_bank
    from .transform import dtcwt_forward, dtcwt_inverse

    reference = BackendId.parse(reference)
    candidate = BackendId.parse(candidate)
    bank = default_bank()
    rng = np.random.default_rng(seed)
    per_size = {}
    worst = 0.0
    for (w, h) in sizes:
        nlev = min(levels, int(np.floor(np.log2(min(w, h)))))
        frame = rng.random((h, w), dtype=np.float32)
        dev = 0.0
        pyr_r = dtcwt_forward(frame, nlev, bank, backend=reference)
        pyr_c = dtcwt_forward(frame, nlev, bank, backend=candidate)
        for bands_r, bands_c in zip(pyr_r.levels, pyr_c.levels):
            for br, bc in zip(bands_r, bands_c):
                dev = max(dev, _rel_dev(bc.re, br.re), _rel_dev(bc.im, br.im))
        dev = max(dev, _rel_dev(pyr_c.lowpass, pyr_r.lowpass))
        rec_r = dtcwt_inverse(pyr_r, bank, backend=reference)
        rec_c = dtcwt_inverse(pyr_c, bank, backend=candidate)
        dev = max(dev, _rel_dev(rec_c.data, rec_r.data))
        per_size[(w, h)] = dev
        worst = max(worst, dev)
    return EquivalenceReport(reference=reference, candidate=candidate,
                             sizes=tuple(sizes), max_rel_deviation=worst,
                             per_size=per_size, tolerance=tolerance)
