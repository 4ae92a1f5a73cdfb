import numpy as np
import pytest

from wavefuse.errors import ParseError
from wavefuse.frame import Frame
from wavefuse.transform import (ORIENTATIONS, Pyramid, analysis_pair,
                                dtcwt_forward, dtcwt_inverse, dump_pyramid,
                                dwt2d_level, load_pyramid, synthesis_pair)

from conftest import stride2_correlate_f64


# ------------------------------------------------------------ analysis_pair

def test_analysis_identity_tap():
    rng = np.random.default_rng(0)
    line = rng.standard_normal(2 * 10 + 12).astype(np.float32)
    lp = np.zeros(12, dtype=np.float32)
    lp[0] = 1.0
    hp = np.zeros(12, dtype=np.float32)
    lo, hi = analysis_pair(line, lp, hp)
    assert np.allclose(lo, line[0:20:2])
    assert (hi == 0).all()


def test_analysis_dc_gain(bank):
    c = 2.5
    line = np.full(2 * 8 + 12, c, dtype=np.float32)
    pair = bank.level1_analysis["a"]
    lo, hi = analysis_pair(line, pair.lo, pair.hi)
    assert np.allclose(lo, np.sqrt(2.0) * c, rtol=1e-6)
    assert np.abs(hi).max() < 1e-5


def test_analysis_matches_brute_force_oracle(bank):
    rng = np.random.default_rng(1)
    line = rng.standard_normal(40).astype(np.float32)  # outwidth 14
    pair = bank.qshift_analysis["a"]
    lo, hi = analysis_pair(line, pair.lo, pair.hi)
    ref_lo = stride2_correlate_f64(line, pair.lo)
    ref_hi = stride2_correlate_f64(line, pair.hi)
    scale = np.abs(ref_lo).max()
    assert np.abs(lo - ref_lo).max() < 1e-5 * max(scale, 1.0)
    assert np.abs(hi - ref_hi).max() < 1e-5 * max(np.abs(ref_hi).max(), 1.0)


def test_analysis_rejects_bad_length():
    with pytest.raises(ValueError):
        analysis_pair(np.zeros(13, dtype=np.float32), np.zeros(12), np.zeros(12))


# ----------------------------------------------------------- synthesis_pair

def test_synthesis_zero_input_zero_output(bank):
    syn = bank.qshift_synthesis["a"]
    out = synthesis_pair(np.zeros(20, np.float32), np.zeros(20, np.float32),
                         syn.lo, syn.hi)
    assert (out == 0).all()


def test_synthesis_roundtrip_interior(bank):
    rng = np.random.default_rng(2)
    line = rng.standard_normal(64).astype(np.float32)  # outwidth 26
    ana = bank.qshift_analysis["a"]
    syn = bank.qshift_synthesis["a"]
    lo, hi = analysis_pair(line, ana.lo, ana.hi)
    rec = synthesis_pair(lo, hi, syn.lo, syn.hi)
    assert rec.shape == (2 * len(lo) - 12,)
    assert np.abs(rec - line[12:12 + len(rec)]).max() < 1e-5


def test_synthesis_impulse_response(bank):
    syn = bank.level1_synthesis["a"]
    w = 16
    lo = np.zeros(w, dtype=np.float32)
    hi = np.zeros(w, dtype=np.float32)
    t = 8
    lo[t] = 1.0
    out = synthesis_pair(lo, hi, syn.lo, syn.hi)
    # out[n] = slp[n + 12 - 2t]: the lowpass impulse response at even offset
    expect = np.zeros_like(out)
    for n in range(len(out)):
        j = n + 12 - 2 * t
        if 0 <= j < 12:
            expect[n] = syn.lo[j]
    assert np.allclose(out, expect, atol=1e-7)


def test_synthesis_rejects_mismatched_lengths(bank):
    syn = bank.level1_synthesis["a"]
    with pytest.raises(ValueError):
        synthesis_pair(np.zeros(10, np.float32), np.zeros(11, np.float32),
                       syn.lo, syn.hi)


# -------------------------------------------------------------- dwt2d_level

def test_dwt2d_constant_plane(bank):
    c = 3.0
    plane = np.full((16, 16), c, dtype=np.float32)
    pair = bank.level1_analysis["a"]
    ll, lh, hl, hh = dwt2d_level(plane, pair, pair)
    assert np.allclose(ll, 2.0 * c, rtol=1e-5)
    for band in (lh, hl, hh):
        assert np.abs(band).max() < 1e-5


def test_dwt2d_matches_nested_loop_oracle(bank):
    rng = np.random.default_rng(3)
    plane = rng.standard_normal((8, 8)).astype(np.float32)
    pair = bank.level1_analysis["a"]
    ll, lh, hl, hh = dwt2d_level(plane, pair, pair)

    # naive float64 separable oracle: rows then columns, mirror extension
    def mirror(i, n):
        while i < 0 or i >= n:
            i = -i if i < 0 else 2 * n - 2 - i
        return i

    p64 = plane.astype(np.float64)
    h, w = p64.shape
    lo_x = np.zeros((h, w // 2))
    hi_x = np.zeros((h, w // 2))
    for r in range(h):
        for k in range(w // 2):
            alo = ahi = 0.0
            for j in range(12):
                v = p64[r, mirror(2 * k + j - 6, w)]
                alo += pair.lo[j] * v
                ahi += pair.hi[j] * v
            lo_x[r, k] = alo
            hi_x[r, k] = ahi
    bands = {}
    for tag, px in (("L", lo_x), ("H", hi_x)):
        lo_y = np.zeros((h // 2, w // 2))
        hi_y = np.zeros((h // 2, w // 2))
        for cidx in range(w // 2):
            for k in range(h // 2):
                alo = ahi = 0.0
                for j in range(12):
                    v = px[mirror(2 * k + j - 6, h), cidx]
                    alo += pair.lo[j] * v
                    ahi += pair.hi[j] * v
                lo_y[k, cidx] = alo
                hi_y[k, cidx] = ahi
        bands[tag + "L"] = lo_y
        bands[tag + "H"] = hi_y
    for got, ref in ((ll, bands["LL"]), (lh, bands["LH"]),
                     (hl, bands["HL"]), (hh, bands["HH"])):
        scale = max(np.abs(ref).max(), 1.0)
        assert np.abs(got - ref).max() < 1e-5 * scale


def test_dwt2d_subband_dims(bank):
    plane = np.zeros((72, 88), dtype=np.float32)
    pair = bank.level1_analysis["a"]
    ll, lh, hl, hh = dwt2d_level(plane, pair, pair)
    assert ll.shape == (36, 44)


def test_dwt2d_rejects_tiny_plane(bank):
    pair = bank.level1_analysis["a"]
    with pytest.raises(ValueError):
        dwt2d_level(np.zeros((1, 8), dtype=np.float32), pair, pair)


# ------------------------------------------------------------ dtcwt forward

def test_forward_constant_frame(bank):
    c = 7.0
    frame = np.full((24, 32), c, dtype=np.float32)
    pyr = dtcwt_forward(frame, 1, bank)
    for band in pyr.levels[0]:
        assert np.abs(band.re).max() < 1e-4
        assert np.abs(band.im).max() < 1e-4
    assert np.allclose(pyr.lowpass, 2.0 * c, rtol=1e-5)


def test_forward_dims_88x72(bank):
    frame = np.zeros((72, 88), dtype=np.float32)
    pyr = dtcwt_forward(frame, 2, bank)
    assert pyr.levels[0][0].re.shape == (36, 44)
    assert pyr.levels[1][0].re.shape == (18, 22)
    assert pyr.lowpass.shape == (18, 22)
    assert tuple(b.orientation for b in pyr.levels[0]) == ORIENTATIONS


def test_forward_orientation_selectivity(bank):
    yy, xx = np.mgrid[0:64, 0:64].astype(np.float32)
    theta = np.deg2rad(45.0)
    grating = np.sin(2 * np.pi * 0.18 * (xx * np.cos(theta) + yy * np.sin(theta)))
    pyr = dtcwt_forward(grating.astype(np.float32), 2, bank)
    bands = {b.orientation: b for b in pyr.levels[1]}
    e_plus = bands[45].magnitude_sq.sum()
    e_minus = bands[-45].magnitude_sq.sum()
    assert e_plus > 4.0 * e_minus


def test_forward_rejects_excess_levels(bank):
    with pytest.raises(ValueError):
        dtcwt_forward(np.zeros((24, 32), dtype=np.float32), 5, bank)


# ------------------------------------------------------------ dtcwt inverse

@pytest.mark.parametrize("size,levels", [((88, 72), 3), ((32, 24), 1),
                                         ((35, 35), 2)])
def test_roundtrip(bank, size, levels):
    rng = np.random.default_rng(size[0] * levels)
    w, h = size
    frame = rng.random((h, w), dtype=np.float32)
    pyr = dtcwt_forward(frame, levels, bank)
    rec = dtcwt_inverse(pyr, bank)
    assert np.abs(rec.data - frame).max() < 1e-3


def test_zero_pyramid_gives_zero_frame(bank):
    pyr = dtcwt_forward(np.zeros((24, 32), dtype=np.float32), 2, bank)
    rec = dtcwt_inverse(pyr, bank)
    assert np.abs(rec.data).max() == 0.0


def test_linearity(bank):
    rng = np.random.default_rng(9)
    f = rng.random((24, 32), dtype=np.float32)
    g = rng.random((24, 32), dtype=np.float32)
    alpha, beta = np.float32(0.7), np.float32(-1.3)
    pyr_sum = dtcwt_forward(alpha * f + beta * g, 2, bank)
    pyr_f = dtcwt_forward(f, 2, bank)
    pyr_g = dtcwt_forward(g, 2, bank)
    for bs, bf, bg in zip(pyr_sum.levels[0], pyr_f.levels[0], pyr_g.levels[0]):
        assert np.abs(bs.re - (alpha * bf.re + beta * bg.re)).max() < 1e-4
        assert np.abs(bs.im - (alpha * bf.im + beta * bg.im)).max() < 1e-4
    lhs = pyr_sum.lowpass
    rhs = alpha * pyr_f.lowpass + beta * pyr_g.lowpass
    assert np.abs(lhs - rhs).max() < 1e-4


def test_subband_shapes_ceil_halving(bank):
    frame = np.zeros((35, 35), dtype=np.float32)
    pyr = dtcwt_forward(frame, 3, bank)
    assert pyr.levels[0][0].re.shape == (18, 18)
    assert pyr.levels[1][0].re.shape == (9, 9)
    assert pyr.levels[2][0].re.shape == (5, 5)
    pyr.validate()


def test_shift_invariance_vs_single_tree(bank):
    """1-pixel shift changes DT-CWT band energies far less than the DWT's."""
    yy, xx = np.mgrid[0:72, 0:88].astype(np.float32)
    disc = (((xx - 44) ** 2 + (yy - 36) ** 2) < 14 ** 2).astype(np.float32)

    def dt_energies(img):
        pyr = dtcwt_forward(img, 3, bank)
        return np.array([b.magnitude_sq.sum()
                         for bands in pyr.levels for b in bands])

    def st_energies(img):
        plane = img
        out = []
        for lev in range(3):
            pair = (bank.level1_analysis["a"] if lev == 0
                    else bank.qshift_analysis["a"])
            ll, lh, hl, hh = dwt2d_level(plane, pair, pair)
            out += [(b.astype(np.float64) ** 2).sum() for b in (lh, hl, hh)]
            plane = ll
        return np.array(out)

    ratios = []
    for shift in ((0, 1), (1, 0)):
        moved = np.roll(disc, shift, axis=(0, 1))
        e0, e1 = dt_energies(disc), dt_energies(moved)
        dt_var = float((np.abs(e1 - e0) / (e0 + 1e-12)).mean())
        s0, s1 = st_energies(disc), st_energies(moved)
        st_var = float((np.abs(s1 - s0) / (s0 + 1e-12)).mean())
        ratios.append(dt_var / st_var)
    assert max(ratios) < 0.5


def test_malformed_pyramid_rejected(bank):
    pyr = dtcwt_forward(np.zeros((24, 32), dtype=np.float32), 2, bank)
    broken = Pyramid(levels=[pyr.levels[0]], lowpass=pyr.lowpass,
                     source_width=32, source_height=24)
    with pytest.raises(ValueError):
        dtcwt_inverse(broken, bank)


# ------------------------------------------------------------------ dump IO

def test_pyramid_dump_roundtrip(bank, tmp_path):
    rng = np.random.default_rng(21)
    frame = rng.random((24, 40), dtype=np.float32)
    pyr = dtcwt_forward(frame, 2, bank)
    path = tmp_path / "p.dtcp"
    dump_pyramid(pyr, path)
    loaded = load_pyramid(path)
    assert loaded.source_width == 40 and loaded.source_height == 24
    for bands_a, bands_b in zip(pyr.levels, loaded.levels):
        for a, b in zip(bands_a, bands_b):
            assert (a.re == b.re).all() and (a.im == b.im).all()
    assert (pyr.lowpass == loaded.lowpass).all()


def test_pyramid_dump_truncation_detected(bank, tmp_path):
    rng = np.random.default_rng(22)
    pyr = dtcwt_forward(rng.random((24, 32), dtype=np.float32), 1, bank)
    path = tmp_path / "p.dtcp"
    dump_pyramid(pyr, path)
    raw = path.read_bytes()
    path.write_bytes(raw[:-16])
    with pytest.raises(ParseError):
        load_pyramid(path)


def test_frame_type_validation():
    with pytest.raises(ValueError):
        Frame(np.array([1.0, 2.0], dtype=np.float32))
    with pytest.raises(ValueError):
        Frame(np.full((2, 2), np.nan, dtype=np.float32))
