import subprocess
import sys

import numpy as np
import pytest

from wavefuse import kernels
from wavefuse.kernels import pykernels

from conftest import stride2_correlate_f64, synthesis_f64


def _random_case(rng, rows=5, k=20):
    ext = rng.standard_normal((rows, 2 * k + 12)).astype(np.float32)
    lp = rng.standard_normal(12).astype(np.float32)
    hp = rng.standard_normal(12).astype(np.float32)
    return ext, lp, hp


def test_scalar_matches_float64_oracle():
    rng = np.random.default_rng(0)
    ext, lp, hp = _random_case(rng)
    lo, hi = kernels.analysis_plane(ext, lp, hp, order="scalar")
    for r in range(ext.shape[0]):
        ref_lo = stride2_correlate_f64(ext[r], lp)
        ref_hi = stride2_correlate_f64(ext[r], hp)
        assert np.allclose(lo[r], ref_lo, rtol=1e-5, atol=1e-6)
        assert np.allclose(hi[r], ref_hi, rtol=1e-5, atol=1e-6)


def test_vector_close_to_scalar():
    rng = np.random.default_rng(1)
    ext, lp, hp = _random_case(rng, rows=50, k=64)
    lo_s, hi_s = kernels.analysis_plane(ext, lp, hp, order="scalar")
    lo_v, hi_v = kernels.analysis_plane(ext, lp, hp, order="vector")
    dev = np.abs(lo_v.astype(np.float64) - lo_s) / (np.abs(lo_s) + 1.0)
    assert dev.max() < 1e-5


def test_vector_determinism():
    rng = np.random.default_rng(2)
    ext, lp, hp = _random_case(rng)
    a = kernels.analysis_plane(ext, lp, hp, order="vector")
    b = kernels.analysis_plane(ext, lp, hp, order="vector")
    assert (a[0] == b[0]).all() and (a[1] == b[1]).all()


def test_synthesis_matches_float64_oracle():
    rng = np.random.default_rng(3)
    w = 30
    lo = rng.standard_normal((4, w)).astype(np.float32)
    hi = rng.standard_normal((4, w)).astype(np.float32)
    slp = rng.standard_normal(12).astype(np.float32)
    shp = rng.standard_normal(12).astype(np.float32)
    for order in ("scalar", "vector"):
        out = kernels.synthesis_plane(lo, hi, slp, shp, order=order)
        assert out.shape == (4, 2 * w - 12)
        for r in range(4):
            ref = synthesis_f64(lo[r], hi[r], slp, shp)
            assert np.allclose(out[r], ref, rtol=1e-5, atol=1e-6)


@pytest.mark.parametrize("ntaps", [3, 5, 7, 8, 10, 11, 12, 13])
def test_lane_tail_matches_all_scalar(ntaps):
    rng = np.random.default_rng(ntaps)
    taps = rng.standard_normal(ntaps).astype(np.float32)
    samples = rng.standard_normal(ntaps).astype(np.float32)
    v = float(pykernels.vector_dot(taps, samples))
    s = float(pykernels.scalar_dot(taps, samples))
    assert abs(v - s) < 1e-6 * max(1.0, abs(s))


_SUBPROC_SNIPPET = r"""
import hashlib, numpy as np
from wavefuse import kernels
rng = np.random.default_rng(99)
ext = rng.standard_normal((13, 2 * 41 + 12)).astype(np.float32)
lp = rng.standard_normal(12).astype(np.float32)
hp = rng.standard_normal(12).astype(np.float32)
h = hashlib.sha256()
for order in ("scalar", "vector"):
    lo, hi = kernels.analysis_plane(ext, lp, hp, order=order)
    h.update(lo.tobytes()); h.update(hi.tobytes())
lo = rng.standard_normal((7, 33)).astype(np.float32)
hi = rng.standard_normal((7, 33)).astype(np.float32)
for order in ("scalar", "vector"):
    out = kernels.synthesis_plane(lo, hi, lp, hp, order=order)
    h.update(out.tobytes())
print(kernels.IMPL, h.hexdigest())
"""


@pytest.mark.skipif(kernels.IMPL != "compiled",
                    reason="compiled extension not built")
def test_pure_fallback_bit_identical_to_compiled():
    """The NumPy fallback and the compiled core must agree bit for bit."""
    def run(env_pure):
        env = dict(WAVEFUSE_PURE="1" if env_pure else "0")
        import os
        full = dict(os.environ, **env)
        out = subprocess.run([sys.executable, "-c", _SUBPROC_SNIPPET],
                             capture_output=True, text=True, env=full,
                             check=True)
        return out.stdout.split()

    impl_c, digest_c = run(False)
    impl_p, digest_p = run(True)
    assert impl_c == "compiled" and impl_p == "python"
    assert digest_c == digest_p
