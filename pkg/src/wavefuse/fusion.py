"""Coefficient-domain fusion of two decompositions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backends import BackendId
from .errors import InvalidInput
from .filters import FilterBank
from .frame import Frame
from .transform import ComplexSubband, Pyramid, dtcwt_forward, dtcwt_inverse

HIGHPASS_RULES = ("max", "mean")
LOWPASS_RULES = ("mean", "select-a", "select-b")


@dataclass(frozen=True)
class FusionRule:
    highpass_rule: str = "max"
    lowpass_rule: str = "mean"

    def __post_init__(self):
        if self.highpass_rule not in HIGHPASS_RULES:
            raise ValueError(f"highpass rule must be one of {HIGHPASS_RULES}")
        if self.lowpass_rule not in LOWPASS_RULES:
            raise ValueError(f"lowpass rule must be one of {LOWPASS_RULES}")


def _fuse_band(a: ComplexSubband, b: ComplexSubband, rule) -> ComplexSubband:
    if rule == "mean":
        half = np.float32(0.5)
        return ComplexSubband(a.orientation, (a.re + b.re) * half,
                              (a.im + b.im) * half)
    # max-magnitude select; ties keep input a
    mag_a = a.re.astype(np.float64) ** 2 + a.im.astype(np.float64) ** 2
    mag_b = b.re.astype(np.float64) ** 2 + b.im.astype(np.float64) ** 2
    pick_b = mag_b > mag_a
    return ComplexSubband(a.orientation,
                          np.where(pick_b, b.re, a.re),
                          np.where(pick_b, b.im, a.im))


def fuse_pyramids(pa: Pyramid, pb: Pyramid, rule: FusionRule) -> Pyramid:
    """Per-coefficient combination of two identically shaped pyramids."""
    if (len(pa.levels) != len(pb.levels)
            or pa.source_width != pb.source_width
            or pa.source_height != pb.source_height):
        raise ValueError("pyramids must have identical shape")
    levels = []
    for bands_a, bands_b in zip(pa.levels, pb.levels):
        fused = []
        for a, b in zip(bands_a, bands_b):
            if a.re.shape != b.re.shape:
                raise ValueError("pyramids must have identical shape")
            fused.append(_fuse_band(a, b, rule.highpass_rule))
        levels.append(fused)
    if rule.lowpass_rule == "mean":
        lowpass = (pa.lowpass + pb.lowpass) * np.float32(0.5)
    elif rule.lowpass_rule == "select-a":
        lowpass = pa.lowpass.copy()
    else:
        lowpass = pb.lowpass.copy()
    return Pyramid(levels=levels, lowpass=lowpass,
                   source_width=pa.source_width, source_height=pa.source_height)


def fuse_frames(fa, fb, levels, rule: FusionRule = None,
                plan=None, bank: FilterBank = None) -> Frame:
    """Full pixel-level fusion: forward both inputs, combine, reconstruct.

    ``plan`` may be a DispatchPlan, a per-level backend sequence, or a single
    backend id; it only changes where the filtering runs, never the result
    beyond float reassociation.
    """
    fa = fa if isinstance(fa, Frame) else Frame.from_array(fa)
    fb = fb if isinstance(fb, Frame) else Frame.from_array(fb)
    if fa.data.shape != fb.data.shape:
        raise InvalidInput("input frames must have identical dimensions")
    rule = rule or FusionRule()
    backend = _plan_backends(plan, levels)
    pa = dtcwt_forward(fa, levels, bank, backend=backend)
    pb = dtcwt_forward(fb, levels, bank, backend=backend)
    fused = fuse_pyramids(pa, pb, rule)
    return dtcwt_inverse(fused, bank, backend=backend)


def _plan_backends(plan, levels):
    if plan is None:
        return BackendId.SCALAR
    if hasattr(plan, "assignments"):
        if len(plan.assignments) != levels:
            raise ValueError("dispatch plan does not cover every level")
        return list(plan.assignments)
    return plan
