import numpy as np
import pytest

from wavefuse.backends import (AccelExecutor, BackendId, backend_analysis_pair,
                               capability_report, verify_equivalence)
from wavefuse.engine import AREA0, EngineState, forward_line, load_coefficients
from wavefuse.transform import dtcwt_forward, dtcwt_inverse


def test_backend_id_parsing():
    assert BackendId.parse("scalar") is BackendId.SCALAR
    assert BackendId.parse(BackendId.ACCEL) is BackendId.ACCEL
    assert str(BackendId.VECTOR) == "vector"
    with pytest.raises(ValueError):
        BackendId.parse("gpu")


def test_capability_report():
    cap = capability_report()
    assert set(cap.available) == {BackendId.SCALAR, BackendId.VECTOR,
                                  BackendId.ACCEL}
    assert cap.lane_width == 4
    assert cap.modes() == ["scalar", "vector", "accel"]
    assert cap.impl in ("compiled", "python")
    if cap.impl == "python":
        assert cap.vector_fallback


@pytest.mark.parametrize("backend", ["scalar", "vector", "accel"])
def test_identity_tap_on_every_backend(backend):
    rng = np.random.default_rng(0)
    line = rng.standard_normal(2 * 12 + 12).astype(np.float32)
    lp = np.zeros(12, np.float32)
    lp[0] = 1.0
    lo, hi = backend_analysis_pair(backend, line, lp, np.zeros(12, np.float32))
    assert np.allclose(lo, line[0:24:2])
    assert (hi == 0).all()


def test_vector_vs_scalar_many_lines(bank):
    rng = np.random.default_rng(1)
    pair = bank.qshift_analysis["a"]
    lp, hp = pair.as_float32()
    worst = 0.0
    for _ in range(40):
        lines = rng.standard_normal((25, 2 * 40 + 12)).astype(np.float32)
        from wavefuse import kernels
        lo_s, hi_s = kernels.analysis_plane(lines, lp, hp, order="scalar")
        lo_v, hi_v = kernels.analysis_plane(lines, lp, hp, order="vector")
        dev = np.abs(lo_v.astype(np.float64) - lo_s) / (np.abs(lo_s) + 1.0)
        worst = max(worst, float(dev.max()))
    assert worst < 1e-5


def test_accel_line_bit_identical_to_engine(bank):
    """The Accel backend on a 176-sample extended line reproduces
    EngineState.forward_line on the same buffer bit for bit."""
    rng = np.random.default_rng(2)
    line = rng.standard_normal(176).astype(np.float32)   # outwidth 82
    pair = bank.level1_analysis["a"]
    lp, hp = pair.as_float32()
    lo_b, hi_b = backend_analysis_pair("accel", line, lp, hp)
    state = EngineState()
    load_coefficients(state, lp, hp)
    state.in_buffer[AREA0:AREA0 + 176] = line
    forward_line(state, AREA0, AREA0, 82)
    out = state.out_buffer[:164]
    assert (lo_b == out[1::2]).all()
    assert (hi_b == out[0::2]).all()


def test_verify_equivalence_scalar_vector(bank):
    report = verify_equivalence("scalar", "vector", [(32, 24), (88, 72)])
    assert report.passed
    assert report.max_rel_deviation < 1e-5


def test_verify_equivalence_self_is_zero():
    report = verify_equivalence("scalar", "scalar", [(40, 40)])
    assert report.max_rel_deviation == 0.0


def test_verify_equivalence_scalar_accel(bank):
    report = verify_equivalence("scalar", "accel", [(88, 72)])
    assert report.passed
    assert report.max_rel_deviation == 0.0   # same accumulation order


def test_cross_backend_frame_results(bank):
    rng = np.random.default_rng(3)
    frame = rng.random((48, 64), dtype=np.float32)
    ref = dtcwt_inverse(dtcwt_forward(frame, 2, bank, backend="scalar"),
                        bank, backend="scalar").data
    for backend in ("vector", "accel"):
        out = dtcwt_inverse(dtcwt_forward(frame, 2, bank, backend=backend),
                            bank, backend=backend).data
        dev = np.abs(out.astype(np.float64) - ref) / (np.abs(ref) + 1.0)
        assert dev.max() < 1e-5


def test_accel_executor_accumulates_cycles(bank):
    rng = np.random.default_rng(4)
    frame = rng.random((24, 32), dtype=np.float32)
    ex = AccelExecutor()
    dtcwt_forward(frame, 1, bank, backend=ex)
    assert ex.cycles > 0
