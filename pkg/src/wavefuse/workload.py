"""Workload accounting shared by the cost model and the accelerator path.

Counts here mirror the transform implementation exactly: the analytic
predictions and the cycles accumulated by the simulated engine agree because
both are derived from the same pass list.

Tap-operation counts use 24 multiply-accumulates per output coefficient pair
(12-tap lowpass + 12-tap highpass), for analysis and synthesis alike.

The ``overhead_ops`` bucket models the per-frame work that no backend
accelerates: quad-to-complex combination, fusion rule, buffer marshalling
and per-frame pipeline bookkeeping.  It is charged at the scalar CPU rate in
every mode.
"""

from __future__ import annotations

from dataclasses import dataclass

MACS_PER_PAIR = 24
OVERHEAD_OPS_PER_COEFF = 6.0
OVERHEAD_OPS_PER_FRAME = 71082.0
LOADS_PER_LEVEL_FORWARD = 4


def level_input_dims(width, height, levels):
    """Unpadded input dimensions (w, h) of each level, 0-based."""
    return [(-(-width // (1 << lev)), -(-height // (1 << lev)))
            for lev in range(levels)]


def _padded(x):
    return x + (x % 2)


@dataclass(frozen=True)
class PassGroup:
    """A group of identical line submissions: n_lines lines of outwidth pairs
    spread over n_passes separate plane passes (one first-fill edge each)."""

    n_lines: int
    outwidth: int
    n_passes: int


@dataclass(frozen=True)
class TransformCounts:
    forward_passes: tuple
    inverse_passes: tuple
    forward_loads: int
    inverse_loads: int
    macs_forward: float
    macs_inverse: float
    complex_coeffs: float
    overhead_ops: float


def transform_counts(width, height, levels) -> TransformCounts:
    fwd = []
    inv = []
    macs_f = macs_i = coeffs = 0.0
    for lev, (w, h) in enumerate(level_input_dims(width, height, levels)):
        wp, hp = _padded(w), _padded(h)
        kw, kh = wp // 2, hp // 2
        nrow = 2 if lev == 0 else 4
        fwd.append(PassGroup(nrow * hp, kw, nrow))
        fwd.append(PassGroup(8 * kw, kh, 8))
        macs_f += (nrow * hp * kw + 8 * kw * kh) * MACS_PER_PAIR
        inv.append(PassGroup(2 * kw, kh, 2))
        inv.append(PassGroup(hp, kw, 1))
        macs_i += (2 * kw * kh + hp * kw) * MACS_PER_PAIR
        coeffs += 6 * kw * kh
    overhead = OVERHEAD_OPS_PER_COEFF * coeffs + OVERHEAD_OPS_PER_FRAME
    return TransformCounts(
        forward_passes=tuple(fwd),
        inverse_passes=tuple(inv),
        forward_loads=LOADS_PER_LEVEL_FORWARD * levels,
        # one q-shift synthesis load shared by all deeper levels, plus the
        # first-level synthesis pair
        inverse_loads=1 if levels == 1 else 2,
        macs_forward=macs_f,
        macs_inverse=macs_i,
        complex_coeffs=coeffs,
        overhead_ops=overhead,
    )
