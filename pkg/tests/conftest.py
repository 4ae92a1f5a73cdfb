import numpy as np
import pytest

from wavefuse.filters import default_bank


@pytest.fixture(scope="session")
def bank():
    return default_bank()


def stride2_correlate_f64(line, taps):
    """Independent double-precision stride-2 correlation oracle.

    line holds 2K + 12 samples; returns K outputs, out[k] = sum_j
    taps[j] * line[2k + j].
    """
    line = np.asarray(line, dtype=np.float64)
    taps = np.asarray(taps, dtype=np.float64)
    k = (len(line) - 12) // 2
    out = np.zeros(k)
    for kk in range(k):
        acc = 0.0
        for j in range(12):
            acc += taps[j] * line[2 * kk + j]
        out[kk] = acc
    return out


def synthesis_f64(lo, hi, slp, shp):
    """Independent double-precision upsample-and-sum synthesis oracle."""
    lo = np.asarray(lo, dtype=np.float64)
    hi = np.asarray(hi, dtype=np.float64)
    w = len(lo)
    out = np.zeros(2 * w - 12)
    for n in range(len(out)):
        acc = 0.0
        for t in range(w):
            j = n + 12 - 2 * t
            if 0 <= j < 12:
                acc += slp[j] * lo[t] + shp[j] * hi[t]
        out[n] = acc
    return out


def mirror_oracle(line, left, right):
    """Brute-force whole-sample mirror index map."""
    line = list(line)
    n = len(line)

    def value(i):
        while i < 0 or i >= n:
            if i < 0:
                i = -i
            if i >= n:
                i = 2 * n - 2 - i
        return line[i]

    return [value(i) for i in range(-left, n + right)]


def tenengrad(img):
    """Sobel gradient energy (float64)."""
    img = np.asarray(img, dtype=np.float64)
    gx = (img[2:, :-2] + 2 * img[2:, 1:-1] + img[2:, 2:]
          - img[:-2, :-2] - 2 * img[:-2, 1:-1] - img[:-2, 2:])
    gy = (img[:-2, 2:] + 2 * img[1:-1, 2:] + img[2:, 2:]
          - img[:-2, :-2] - 2 * img[1:-1, :-2] - img[2:, :-2])
    return float((gx ** 2 + gy ** 2).sum())
