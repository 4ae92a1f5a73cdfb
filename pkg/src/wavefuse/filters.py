"""Filter bank definitions for the dual-tree transform.

Every tap array is stored as exactly 12 float32 values because the compute
backends (and the simulated accelerator datapath) operate on a fixed 12-tap
window.  Shorter filters are zero-padded at a placement offset that encodes
their phase.

First-level filters are the classic biorthogonal 9/7 pair; tree b is the
one-sample-delayed copy of tree a, with lowpass and highpass decimated on
opposite phases (that alignment is what makes each tree individually
invertible).  Deeper levels use an orthonormal quarter-shift filter designed
numerically: 12 taps, double-shift orthonormal to machine precision, two
vanishing moments, group delay ~5.25 samples so that the reversed tree-b
filter sits half a sample away.  See tools/design_qshift.py for the
generator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

TAPS = 12
SQRT2 = float(np.sqrt(2.0))

# Biorthogonal 9/7 (Antonini) analysis pair, unit-DC normalization.
_BIORT97_LO = [
    0.0267487574108101, -0.0168641184428747, -0.0782232665289905,
    0.2668641184428729, 0.6029490182363593, 0.2668641184428769,
    -0.0782232665289884, -0.0168641184428753, 0.0267487574108096,
]
_BIORT97_HI = [
    0.0456358815571251, -0.0287717631142493, -0.2956358815571280,
    0.5575435262285023, -0.2956358815571233, -0.0287717631142531,
    0.0456358815571261,
]

# Quarter-shift 12-tap orthonormal lowpass (tree a); tree b is the reversal.
_QSHIFT12 = [
    0.0121736135792585, 0.0184041823651774, -0.0489406802823606,
    -0.1075728936535459, 0.2706035474796228, 0.7477380291567011,
    0.5706744935882119, 0.0416829530411008, -0.1451034315142255,
    0.0384056046971828, 0.0476992383360405, -0.0315510944200685,
]


def _place(taps, offset):
    out = np.zeros(TAPS, dtype=np.float64)
    out[offset:offset + len(taps)] = taps
    return out


def _syn97():
    lo = np.asarray(_BIORT97_HI, dtype=np.float64).copy()
    lo[0::2] *= -1.0
    hi = np.asarray(_BIORT97_LO, dtype=np.float64).copy()
    hi[1::2] *= -1.0
    return lo, hi


@dataclass(frozen=True)
class FilterPair:
    """12-tap (lowpass, highpass) arrays for one tree at one stage."""

    lo: np.ndarray
    hi: np.ndarray

    def as_float32(self):
        return (np.ascontiguousarray(self.lo, dtype=np.float32),
                np.ascontiguousarray(self.hi, dtype=np.float32))


@dataclass(frozen=True)
class FilterBank:
    """Analysis/synthesis taps for both trees, first level and deeper levels."""

    level1_analysis: dict      # tree -> FilterPair
    level1_synthesis: dict
    qshift_analysis: dict
    qshift_synthesis: dict

    def validate(self):
        """Check the structural invariants; raises ValueError on failure."""
        groups = (self.level1_analysis, self.level1_synthesis,
                  self.qshift_analysis, self.qshift_synthesis)
        for group in groups:
            for tree in ("a", "b"):
                pair = group[tree]
                for arr in (pair.lo, pair.hi):
                    if arr.shape != (TAPS,):
                        raise ValueError("tap arrays must have exactly 12 entries")
                    if not np.all(np.isfinite(arr)):
                        raise ValueError("tap arrays must be finite")
        for tree in ("a", "b"):
            lo_sum = float(self.level1_analysis[tree].lo.sum())
            hi_sum = float(self.level1_analysis[tree].hi.sum())
            if abs(lo_sum - SQRT2) > 1e-6:
                raise ValueError(f"level-1 tree-{tree} lowpass sum {lo_sum} != sqrt(2)")
            if abs(hi_sum) > 1e-6:
                raise ValueError(f"level-1 tree-{tree} highpass sum {hi_sum} != 0")
            lo_sum = float(self.qshift_analysis[tree].lo.sum())
            hi_sum = float(self.qshift_analysis[tree].hi.sum())
            if abs(lo_sum - SQRT2) > 1e-6:
                raise ValueError(f"qshift tree-{tree} lowpass sum {lo_sum} != sqrt(2)")
            if abs(hi_sum) > 1e-6:
                raise ValueError(f"qshift tree-{tree} highpass sum {hi_sum} != 0")
        qa = self.qshift_analysis["a"]
        qb = self.qshift_analysis["b"]
        if not (np.allclose(qb.lo, qa.lo[::-1], atol=1e-12)
                and np.allclose(qb.hi, qa.hi[::-1], atol=1e-12)):
            raise ValueError("qshift tree b must be the tap-order reversal of tree a")


def default_bank() -> FilterBank:
    syn_lo, syn_hi = _syn97()
    l1a = FilterPair(_place(SQRT2 * np.asarray(_BIORT97_LO), 2),
                     _place(SQRT2 * np.asarray(_BIORT97_HI), 4))
    l1b = FilterPair(_place(SQRT2 * np.asarray(_BIORT97_LO), 3),
                     _place(SQRT2 * np.asarray(_BIORT97_HI), 3))
    s1a = FilterPair(_place(SQRT2 * syn_lo, 3), _place(SQRT2 * syn_hi, 3))
    s1b = FilterPair(_place(SQRT2 * syn_lo, 4), _place(SQRT2 * syn_hi, 2))

    qa = np.asarray(_QSHIFT12, dtype=np.float64)
    ga = (-1.0) ** np.arange(TAPS) * qa[::-1]
    qsa = FilterPair(qa.copy(), ga.copy())
    qsb = FilterPair(qa[::-1].copy(), ga[::-1].copy())
    # orthonormal stage: synthesis taps equal analysis taps (adjoint)
    bank = FilterBank(
        level1_analysis={"a": l1a, "b": l1b},
        level1_synthesis={"a": s1a, "b": s1b},
        qshift_analysis={"a": qsa, "b": qsb},
        qshift_synthesis={"a": FilterPair(qa.copy(), ga.copy()),
                          "b": FilterPair(qa[::-1].copy(), ga[::-1].copy())},
    )
    bank.validate()
    return bank


def save_bank(bank: FilterBank, path):
    """Write a bank to a JSON file (12-tap arrays per tree per group)."""
    doc = {}
    for name in ("level1_analysis", "level1_synthesis",
                 "qshift_analysis", "qshift_synthesis"):
        group = getattr(bank, name)
        doc[name] = {tree: {"lo": group[tree].lo.tolist(),
                            "hi": group[tree].hi.tolist()}
                     for tree in ("a", "b")}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)


def load_bank(path) -> FilterBank:
    """Load a bank from JSON and validate its invariants."""
    with open(path) as fh:
        doc = json.load(fh)
    groups = {}
    for name in ("level1_analysis", "level1_synthesis",
                 "qshift_analysis", "qshift_synthesis"):
        groups[name] = {
            tree: FilterPair(np.asarray(doc[name][tree]["lo"], dtype=np.float64),
                             np.asarray(doc[name][tree]["hi"], dtype=np.float64))
            for tree in ("a", "b")
        }
    bank = FilterBank(**groups)
    bank.validate()
    return bank
