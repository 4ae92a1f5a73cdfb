"""Functional simulation of the hardware wavelet engine and its driver.

The engine holds two 12-tap coefficient registers, a 12-element shift
register and two 4096-word transfer buffers split into 2048-word ping-pong
areas.  A forward line command consumes ``2*outwidth + 12`` input words and
emits ``outwidth`` interleaved (highpass, lowpass) pairs; each loop
iteration computes both 12-tap dot products of the current shift register,
shifts it left by two and appends the next two inputs, with output gated on
the warm-up iterations.  The inverse command is the synthesis adjoint with
the same buffer protocol: ``outwidth + 6`` coefficient pairs in,
``2*outwidth`` reconstructed samples out.

Functional results are bit-true against the scalar backend (identical
float32 accumulation order).  Every command also advances a modeled cycle
counter; the driver's double-buffered plane streaming accounts for the one
host fill that cannot hide under engine processing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import kernels
from .costmodel import CostModelParams, fill_cycles, line_cycles, load_cycles
from .errors import CapacityExceeded, ParseError

BUFFER_WORDS = 4096
AREA_WORDS = 2048
AREA0 = 0
AREA1 = AREA_WORDS

STATE_MAGIC = b"WENG"
STATE_VERSION = 1


class EngineMode(Enum):
    LOAD_COEFFS = 0
    FORWARD = 1
    INVERSE = 2


@dataclass
class EngineState:
    """Single-owner mutable accelerator state; one in-flight command."""

    params: CostModelParams = field(default_factory=CostModelParams)
    coeff_lp: np.ndarray = field(
        default_factory=lambda: np.zeros(12, dtype=np.float32))
    coeff_hp: np.ndarray = field(
        default_factory=lambda: np.zeros(12, dtype=np.float32))
    shift_register: np.ndarray = field(
        default_factory=lambda: np.zeros(12, dtype=np.float32))
    in_buffer: np.ndarray = field(
        default_factory=lambda: np.zeros(BUFFER_WORDS, dtype=np.float32))
    out_buffer: np.ndarray = field(
        default_factory=lambda: np.zeros(BUFFER_WORDS, dtype=np.float32))
    mode: EngineMode = EngineMode.LOAD_COEFFS
    cycle_counter: float = 0.0


def _check_area(offset):
    if offset not in (AREA0, AREA1):
        raise ValueError(f"area offset must be 0 or {AREA_WORDS}")


def load_coefficients(state: EngineState, lp, hp) -> None:
    """Latch a 12+12 tap set; subsequent line commands use it."""
    lp = np.asarray(lp, dtype=np.float32)
    hp = np.asarray(hp, dtype=np.float32)
    if lp.shape != (12,) or hp.shape != (12,):
        raise ValueError("coefficient arrays must hold exactly 12 taps")
    state.coeff_lp[:] = lp
    state.coeff_hp[:] = hp
    state.mode = EngineMode.LOAD_COEFFS
    state.cycle_counter += load_cycles(state.params)


def forward_line(state: EngineState, in_area, out_area, outwidth) -> float:
    """Run one forward line command; returns the cycles consumed."""
    _check_area(in_area)
    _check_area(out_area)
    if outwidth < 1:
        raise ValueError("outwidth must be >= 1")
    nwords = 2 * outwidth + 12
    if nwords > AREA_WORDS:
        raise CapacityExceeded(f"line of {nwords} words exceeds the "
                               f"{AREA_WORDS}-word transfer area")
    state.shift_register[:] = 0.0
    x = state.in_buffer[in_area:in_area + nwords]
    lo, hi = kernels.analysis_plane(x.reshape(1, -1), state.coeff_lp,
                                    state.coeff_hp, order="scalar")
    out = state.out_buffer[out_area:out_area + 2 * outwidth]
    out[0::2] = hi[0]
    out[1::2] = lo[0]
    state.shift_register[:] = x[2 * outwidth:2 * outwidth + 12]
    state.mode = EngineMode.FORWARD
    cycles = line_cycles(state.params, outwidth)
    state.cycle_counter += cycles
    return cycles


def inverse_line(state: EngineState, in_area, out_area, outwidth) -> float:
    """Run one inverse (synthesis) line command; returns cycles consumed.

    Consumes ``outwidth + 6`` interleaved (hp, lp) coefficient pairs and
    writes ``2*outwidth`` reconstructed samples.
    """
    _check_area(in_area)
    _check_area(out_area)
    if outwidth < 1:
        raise ValueError("outwidth must be >= 1")
    nwords = 2 * outwidth + 12
    if nwords > AREA_WORDS:
        raise CapacityExceeded(f"line of {nwords} words exceeds the "
                               f"{AREA_WORDS}-word transfer area")
    state.shift_register[:] = 0.0
    pairs = state.in_buffer[in_area:in_area + nwords]
    hi = np.ascontiguousarray(pairs[0::2]).reshape(1, -1)
    lo = np.ascontiguousarray(pairs[1::2]).reshape(1, -1)
    out = kernels.synthesis_plane(lo, hi, state.coeff_lp, state.coeff_hp,
                                  order="scalar")
    state.out_buffer[out_area:out_area + 2 * outwidth] = out[0]
    state.mode = EngineMode.INVERSE
    cycles = line_cycles(state.params, outwidth)
    state.cycle_counter += cycles
    return cycles


@dataclass(frozen=True)
class StreamStats:
    """Cycle accounting of one double-buffered plane pass."""

    lines: int
    overlapped_cycles: float
    no_overlap_cycles: float


def stream_forward_rows(state: EngineState, ext_rows, outwidth) -> tuple:
    """Stream pre-extended rows through forward line commands, ping-pong.

    Returns (interleaved output rows, StreamStats).  The host fill of the
    next line overlaps engine processing; only the first fill is exposed.
    """
    ext_rows = np.ascontiguousarray(ext_rows, dtype=np.float32)
    n, m = ext_rows.shape
    if m != 2 * outwidth + 12:
        raise ValueError("extended rows must have 2*outwidth + 12 samples")
    out = np.empty((n, 2 * outwidth), dtype=np.float32)
    fill = fill_cycles(state.params, m)
    compute = 0.0
    for i in range(n):
        in_area = AREA0 if i % 2 == 0 else AREA1
        out_area = AREA0 if i % 2 == 0 else AREA1
        state.in_buffer[in_area:in_area + m] = ext_rows[i]
        compute += forward_line(state, in_area, out_area, outwidth)
        out[i] = state.out_buffer[out_area:out_area + 2 * outwidth]
    state.cycle_counter += fill
    stats = StreamStats(lines=n, overlapped_cycles=compute + fill,
                        no_overlap_cycles=compute + n * fill)
    return out, stats


def stream_inverse_rows(state: EngineState, hi_rows, lo_rows, outwidth) -> tuple:
    """Stream extended coefficient pair rows through inverse line commands."""
    hi_rows = np.ascontiguousarray(hi_rows, dtype=np.float32)
    lo_rows = np.ascontiguousarray(lo_rows, dtype=np.float32)
    if hi_rows.shape != lo_rows.shape:
        raise ValueError("hi and lo coefficient rows must have equal shape")
    n, w = hi_rows.shape
    if w != outwidth + 6:
        raise ValueError("coefficient rows must hold outwidth + 6 pairs")
    out = np.empty((n, 2 * outwidth), dtype=np.float32)
    m = 2 * w
    fill = fill_cycles(state.params, m)
    compute = 0.0
    for i in range(n):
        in_area = AREA0 if i % 2 == 0 else AREA1
        out_area = AREA0 if i % 2 == 0 else AREA1
        pairs = state.in_buffer[in_area:in_area + m]
        pairs[0::2] = hi_rows[i]
        pairs[1::2] = lo_rows[i]
        compute += inverse_line(state, in_area, out_area, outwidth)
        out[i] = state.out_buffer[out_area:out_area + 2 * outwidth]
    state.cycle_counter += fill
    stats = StreamStats(lines=n, overlapped_cycles=compute + fill,
                        no_overlap_cycles=compute + n * fill)
    return out, stats


def driver_submit_plane(state: EngineState, plane, direction, taps) -> tuple:
    """Run a full separable plane transform through the engine.

    ``direction`` is "forward" (plane to packed quad) or "inverse" (packed
    quad back to plane); ``taps`` is the (lp, hp) pair for both axes.
    Whole-sample symmetric boundaries, matching dwt2d_level.  Column passes
    are transposed row passes; the transpose is part of the host fill stage.
    Returns (result plane, total modeled cycles including the tap load).
    """
    from .transform import _even_pad, _extend_rows, _extend_coeff_rows

    plane = np.ascontiguousarray(plane, dtype=np.float32)
    if plane.ndim != 2 or plane.shape[0] < 2 or plane.shape[1] < 2:
        raise ValueError("plane must be at least 2x2")
    if plane.shape[1] > AREA_WORDS:
        raise CapacityExceeded(f"plane width {plane.shape[1]} exceeds "
                               f"{AREA_WORDS}")
    lp, hp = taps
    start = state.cycle_counter
    load_coefficients(state, lp, hp)
    if direction == "forward":
        p = _even_pad(plane)
        rows, _ = stream_forward_rows(state, _extend_rows(p, "reflect"),
                                      p.shape[1] // 2)
        colsrc = np.ascontiguousarray(rows.T)
        cols, _ = stream_forward_rows(state, _extend_rows(colsrc, "reflect"),
                                      colsrc.shape[1] // 2)
        result = np.ascontiguousarray(cols.T)
    elif direction == "inverse":
        packed = plane
        hi_c = np.ascontiguousarray(packed[0::2, :].T)
        lo_c = np.ascontiguousarray(packed[1::2, :].T)
        cols, _ = stream_inverse_rows(
            state,
            _extend_coeff_rows(hi_c, "reflect", "hi"),
            _extend_coeff_rows(lo_c, "reflect", "lo"),
            hi_c.shape[1])
        inter = np.ascontiguousarray(cols.T)
        hi_r = np.ascontiguousarray(inter[:, 0::2])
        lo_r = np.ascontiguousarray(inter[:, 1::2])
        result, _ = stream_inverse_rows(
            state,
            _extend_coeff_rows(hi_r, "reflect", "hi"),
            _extend_coeff_rows(lo_r, "reflect", "lo"),
            hi_r.shape[1])
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return result, state.cycle_counter - start


def unpack_quad(packed):
    """Split a packed forward result into (LL, LH, HL, HH)."""
    ll = np.ascontiguousarray(packed[1::2, 1::2])
    lh = np.ascontiguousarray(packed[0::2, 1::2])
    hl = np.ascontiguousarray(packed[1::2, 0::2])
    hh = np.ascontiguousarray(packed[0::2, 0::2])
    return ll, lh, hl, hh


def dump_state(state: EngineState, path):
    """Binary engine-state dump (magic WENG), little-endian."""
    with open(path, "wb") as fh:
        fh.write(STATE_MAGIC)
        fh.write(struct.pack("<II", STATE_VERSION, state.mode.value))
        fh.write(struct.pack("<Q", int(round(state.cycle_counter))))
        for arr in (state.coeff_lp, state.coeff_hp, state.shift_register,
                    state.in_buffer, state.out_buffer):
            fh.write(np.ascontiguousarray(arr, dtype="<f4").tobytes())


def load_state(path, params: CostModelParams = None) -> EngineState:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != STATE_MAGIC:
        raise ParseError("bad magic, expected WENG", offset=0)
    version, mode = struct.unpack_from("<II", raw, 4)
    if version != STATE_VERSION:
        raise ParseError(f"unsupported state version {version}", offset=4)
    (counter,) = struct.unpack_from("<Q", raw, 12)
    pos = 20
    arrays = []
    for count in (12, 12, 12, BUFFER_WORDS, BUFFER_WORDS):
        arrays.append(np.frombuffer(raw, dtype="<f4", count=count,
                                    offset=pos).copy())
        pos += count * 4
    state = EngineState(params=params or CostModelParams())
    state.coeff_lp[:] = arrays[0]
    state.coeff_hp[:] = arrays[1]
    state.shift_register[:] = arrays[2]
    state.in_buffer[:] = arrays[3]
    state.out_buffer[:] = arrays[4]
    state.mode = EngineMode(mode)
    state.cycle_counter = float(counter)
    return state
