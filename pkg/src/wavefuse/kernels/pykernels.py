"""NumPy fallback kernels.

Arithmetic order is pinned so the compiled extension and this module produce
bit-identical float32 results:

* scalar order: one running float32 accumulator, taps applied in ascending
  index order (the shift-register datapath order);
* vector order: taps processed in 4-wide lane groups with one multiply-add
  per group and lane, then the pairwise horizontal reduction
  ``(acc2 + acc3) + (acc0 + acc1)``, then any non-multiple-of-4 tail folded
  in sequentially.

All plane kernels take C-contiguous float32 arrays and vectorize over rows;
per-element operation order matches the compiled per-sample loops exactly.

Analysis contract: ``lo[k] = sum_j lp[j] * ext[2k + j]`` for the 12-tap
window, k = 0..K-1 where ext has 2K+12 samples per row.

Synthesis contract (adjoint): given W coefficient pairs per row, produce
``out[n] = sum_t slp[n+12-2t] * lo[t] + shp[n+12-2t] * hi[t]`` for
n = 0..2W-13, tap indices restricted to 0..11.  Every output receives
exactly six lo taps and six hi taps of one parity.
"""

from __future__ import annotations

import numpy as np

LANE_WIDTH = 4


def _require_f32(a, name):
    if a.dtype != np.float32 or not a.flags.c_contiguous:
        raise ValueError(f"{name} must be C-contiguous float32")


def analysis_plane_scalar(ext, lp, hp):
    _require_f32(ext, "ext")
    rows, m = ext.shape
    k = (m - 12) // 2
    lo = np.zeros((rows, k), dtype=np.float32)
    hi = np.zeros((rows, k), dtype=np.float32)
    for j in range(12):
        w = ext[:, j:j + 2 * k:2]
        lo += lp[j] * w
        hi += hp[j] * w
    return lo, hi


def analysis_plane_vector(ext, lp, hp):
    _require_f32(ext, "ext")
    rows, m = ext.shape
    k = (m - 12) // 2
    acc_lo = [None] * 4
    acc_hi = [None] * 4
    for lane in range(4):
        w = ext[:, lane:lane + 2 * k:2]
        alo = lp[lane] * w
        ahi = hp[lane] * w
        for g in (1, 2):
            w = ext[:, 4 * g + lane:4 * g + lane + 2 * k:2]
            alo = alo + lp[4 * g + lane] * w
            ahi = ahi + hp[4 * g + lane] * w
        acc_lo[lane] = alo
        acc_hi[lane] = ahi
    lo = (acc_lo[2] + acc_lo[3]) + (acc_lo[0] + acc_lo[1])
    hi = (acc_hi[2] + acc_hi[3]) + (acc_hi[0] + acc_hi[1])
    return lo, hi


def synthesis_plane_scalar(lo_ext, hi_ext, slp, shp):
    _require_f32(lo_ext, "lo_ext")
    _require_f32(hi_ext, "hi_ext")
    rows, w = lo_ext.shape
    count = w - 6
    out = np.zeros((rows, 2 * count), dtype=np.float32)
    for j in range(12):
        cj = 6 - j // 2
        sl = out[:, j % 2::2]
        sl += slp[j] * lo_ext[:, cj:cj + count]
        sl += shp[j] * hi_ext[:, cj:cj + count]
    return out


def synthesis_plane_vector(lo_ext, hi_ext, slp, shp):
    _require_f32(lo_ext, "lo_ext")
    _require_f32(hi_ext, "hi_ext")
    rows, w = lo_ext.shape
    count = w - 6
    out = np.zeros((rows, 2 * count), dtype=np.float32)
    for parity in (0, 1):
        js = [j for j in range(12) if j % 2 == parity]
        lo_win = [lo_ext[:, 6 - j // 2:6 - j // 2 + count] for j in js]
        hi_win = [hi_ext[:, 6 - j // 2:6 - j // 2 + count] for j in js]
        lanes = [slp[js[i]] * lo_win[i] for i in range(4)]
        red = (lanes[2] + lanes[3]) + (lanes[0] + lanes[1])
        for i in (4, 5):
            red = red + slp[js[i]] * lo_win[i]
        lanes = [shp[js[i]] * hi_win[i] for i in range(4)]
        red_hi = (lanes[2] + lanes[3]) + (lanes[0] + lanes[1])
        for i in (4, 5):
            red_hi = red_hi + shp[js[i]] * hi_win[i]
        out[:, parity::2] = red + red_hi
    return out


def vector_dot(taps, samples):
    """Lane-group dot product for an arbitrary tap count (float32).

    Full groups of four multiply-accumulate steps, pairwise horizontal
    reduction, remainder in scalar form; used to pin the lane-tail contract.
    """
    taps = np.asarray(taps, dtype=np.float32)
    samples = np.asarray(samples, dtype=np.float32)
    n = len(taps)
    groups = n // LANE_WIDTH
    if groups == 0:
        acc = np.float32(0.0)
        for j in range(n):
            acc = acc + taps[j] * samples[j]
        return acc
    lanes = [np.float32(0.0)] * LANE_WIDTH
    for lane in range(LANE_WIDTH):
        acc = taps[lane] * samples[lane]
        for g in range(1, groups):
            acc = acc + taps[4 * g + lane] * samples[4 * g + lane]
        lanes[lane] = acc
    red = (lanes[2] + lanes[3]) + (lanes[0] + lanes[1])
    for j in range(4 * groups, n):
        red = red + taps[j] * samples[j]
    return red


def scalar_dot(taps, samples):
    """Sequential float32 dot product in ascending tap order."""
    taps = np.asarray(taps, dtype=np.float32)
    samples = np.asarray(samples, dtype=np.float32)
    acc = np.float32(0.0)
    for j in range(len(taps)):
        acc = acc + taps[j] * samples[j]
    return acc
