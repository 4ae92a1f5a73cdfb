import json

import numpy as np
import pytest

from wavefuse.filters import SQRT2, FilterBank, default_bank, load_bank, save_bank

from conftest import stride2_correlate_f64, synthesis_f64


def test_every_tap_array_has_12_entries(bank):
    for group in (bank.level1_analysis, bank.level1_synthesis,
                  bank.qshift_analysis, bank.qshift_synthesis):
        for tree in ("a", "b"):
            assert group[tree].lo.shape == (12,)
            assert group[tree].hi.shape == (12,)


def test_analysis_tap_sums(bank):
    for group in (bank.level1_analysis, bank.qshift_analysis):
        for tree in ("a", "b"):
            assert abs(group[tree].lo.sum() - SQRT2) < 1e-6
            assert abs(group[tree].hi.sum()) < 1e-6


def test_qshift_tree_b_is_reversal(bank):
    qa = bank.qshift_analysis["a"]
    qb = bank.qshift_analysis["b"]
    assert np.allclose(qb.lo, qa.lo[::-1])
    assert np.allclose(qb.hi, qa.hi[::-1])


def test_qshift_orthonormality(bank):
    q = bank.qshift_analysis["a"].lo
    for m in range(6):
        ip = np.dot(q[:12 - 2 * m], q[2 * m:]) if m else np.dot(q, q)
        assert abs(ip - (1.0 if m == 0 else 0.0)) < 1e-12


def _roundtrip_error_level1(bank, tree, rng):
    """Double-precision one-level round trip for a first-level tree."""
    ana = bank.level1_analysis[tree]
    syn = bank.level1_synthesis[tree]
    x = rng.standard_normal(64)
    ext = np.concatenate([x[1:7][::-1], x, x[-7:-1][::-1]])  # whole-sample
    lo = stride2_correlate_f64(ext, ana.lo)
    hi = stride2_correlate_f64(ext, ana.hi)
    if tree == "a":
        lo_e = np.concatenate([lo[1:4][::-1], lo, lo[-3:][::-1]])
        hi_e = np.concatenate([hi[0:3][::-1], hi, hi[-4:-1][::-1]])
    else:
        lo_e = np.concatenate([lo[0:3][::-1], lo, lo[-4:-1][::-1]])
        hi_e = np.concatenate([hi[1:4][::-1], hi, hi[-3:][::-1]])
    rec = synthesis_f64(lo_e, hi_e, syn.lo, syn.hi)
    return np.abs(rec - x).max()


def _roundtrip_error_qshift(bank, tree, rng):
    ana = bank.qshift_analysis[tree]
    syn = bank.qshift_synthesis[tree]
    x = rng.standard_normal(64)
    ext = np.concatenate([x[-6:], x, x[:6]])  # periodic
    lo = stride2_correlate_f64(ext, ana.lo)
    hi = stride2_correlate_f64(ext, ana.hi)
    lo_e = np.concatenate([lo[-3:], lo, lo[:3]])
    hi_e = np.concatenate([hi[-3:], hi, hi[:3]])
    rec = synthesis_f64(lo_e, hi_e, syn.lo, syn.hi)
    return np.abs(rec - x).max()


@pytest.mark.parametrize("tree", ["a", "b"])
def test_level1_pair_perfect_reconstruction(bank, tree):
    rng = np.random.default_rng(11)
    for _ in range(5):
        assert _roundtrip_error_level1(bank, tree, rng) < 1e-6


@pytest.mark.parametrize("tree", ["a", "b"])
def test_qshift_pair_perfect_reconstruction(bank, tree):
    rng = np.random.default_rng(12)
    for _ in range(5):
        assert _roundtrip_error_qshift(bank, tree, rng) < 1e-6


def test_bank_json_roundtrip(bank, tmp_path):
    path = tmp_path / "bank.json"
    save_bank(bank, path)
    loaded = load_bank(path)
    for name in ("level1_analysis", "level1_synthesis",
                 "qshift_analysis", "qshift_synthesis"):
        for tree in ("a", "b"):
            assert np.allclose(getattr(loaded, name)[tree].lo,
                               getattr(bank, name)[tree].lo)


def test_bank_validation_rejects_bad_sums(bank, tmp_path):
    path = tmp_path / "bank.json"
    save_bank(bank, path)
    doc = json.loads(path.read_text())
    doc["level1_analysis"]["a"]["lo"][0] += 0.5
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError):
        load_bank(path)
