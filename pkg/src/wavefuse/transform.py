"""Forward and inverse dual-tree complex wavelet transform.

The 2-D transform runs four separable real DWTs (row tree x column tree over
{a, b}) and combines, per level and per subband type, the four real planes
into two complex oriented subbands through the unitary map

    z1 = ((aa - bb) + j(ab + ba)) / sqrt(2)
    z2 = ((aa + bb) + j(ba - ab)) / sqrt(2)

Boundary policy per stage:

* level 1 (symmetric 9/7 filters): whole-sample symmetric extension — the
  standard perfect-reconstruction choice for linear-phase filters;
* deeper levels (quarter-shift filters): periodic extension.  The q-shift
  filters are not linear phase, and with a single-plane lowpass residual the
  sibling-tree data a mirror extension would need at synthesis time is not
  available, so periodic extension is the policy that keeps every tree
  combination exactly invertible on its own.

The inverse walks the tree-a/tree-a combination only: its lowpass chain is
the stored residual and its highpass planes are recovered from the real
parts of the oriented subbands.  That chain is a complete, critically
sampled DWT of the frame, so reconstruction is exact up to float32 rounding.

All storage and accumulation is float32; test oracles use float64.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .backends import BackendId, get_executor
from .errors import ParseError
from .filters import FilterBank, default_bank
from .frame import Frame
from .workload import level_input_dims

ORIENTATIONS = (15, -15, 45, -45, 75, -75)
_INV_SQRT2 = np.float32(1.0 / np.sqrt(2.0))
_COMBOS = (("a", "a"), ("a", "b"), ("b", "a"), ("b", "b"))

DUMP_MAGIC = b"DTCP"
DUMP_VERSION = 1


@dataclass(frozen=True)
class ComplexSubband:
    """One oriented complex coefficient plane."""

    orientation: int
    re: np.ndarray
    im: np.ndarray

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"unknown orientation {self.orientation}")
        if self.re.shape != self.im.shape:
            raise ValueError("re and im planes must have identical dimensions")

    @property
    def magnitude_sq(self):
        return self.re.astype(np.float64) ** 2 + self.im.astype(np.float64) ** 2


@dataclass
class Pyramid:
    """DT-CWT decomposition: per level six oriented subbands, plus the
    real lowpass residual of the deepest level (tree-a/tree-a chain)."""

    levels: list
    lowpass: np.ndarray
    source_width: int
    source_height: int

    def validate(self):
        n = len(self.levels)
        if n < 1:
            raise ValueError("pyramid must hold at least one level")
        for lev, bands in enumerate(self.levels, start=1):
            if len(bands) != 6:
                raise ValueError(f"level {lev} must hold exactly 6 subbands")
            wl = -(-self.source_width // (1 << lev))
            hl = -(-self.source_height // (1 << lev))
            for band in bands:
                if band.re.shape != (hl, wl):
                    raise ValueError(
                        f"level {lev} subband shape {band.re.shape} != {(hl, wl)}")
            if tuple(b.orientation for b in bands) != ORIENTATIONS:
                raise ValueError("subbands must be stored in orientation order")
        if self.lowpass.shape != self.levels[-1][0].re.shape:
            raise ValueError("lowpass dimensions must match the deepest level")


# ---------------------------------------------------------------- extensions

def extend_symmetric(line, left, right):
    """Whole-sample symmetric extension of a 1-D sequence.

    ``([1,2,3], 2, 1) -> [3,2,1,2,3,2]``.  left/right must not exceed the
    line length.
    """
    line = np.asarray(line)
    n = line.shape[-1]
    if n == 0:
        raise ValueError("line must be non-empty")
    if left > n or right > n or left < 0 or right < 0:
        raise ValueError("extension longer than line")
    idx = _mirror_indices(n, left, right)
    return line[..., idx]


def _mirror_indices(n, left, right):
    i = np.arange(-left, n + right)
    if n == 1:
        return np.zeros_like(i)
    p = 2 * n - 2
    m = np.mod(i, p)
    return np.where(m >= n, p - m, m)


def _extend_rows(plane, policy):
    if policy == "wrap":
        n = plane.shape[1]
        if n >= 6:
            return np.pad(plane, ((0, 0), (6, 6)), mode="wrap")
        idx = np.mod(np.arange(-6, n + 6), n)
        return np.ascontiguousarray(plane[:, idx])
    idx = _mirror_indices(plane.shape[1], 6, 6)
    return np.ascontiguousarray(plane[:, idx])


def _extend_coeff_rows(plane, policy, channel):
    """Extend coefficient rows by 3 entries per side for synthesis.

    Symmetric policy uses the phase-aware mirror: the lowpass channel is
    whole-sample on the left and half-sample on the right, the highpass
    channel the opposite (lowpass sits on even full-rate phase, highpass on
    odd).
    """
    k = plane.shape[1]
    if policy == "wrap":
        if k >= 3:
            return np.pad(plane, ((0, 0), (3, 3)), mode="wrap")
        idx = np.mod(np.arange(-3, k + 3), k)
        return np.ascontiguousarray(plane[:, idx])
    if channel == "lo":
        left = plane[:, 1:4][:, ::-1]
        right = plane[:, k - 3:k][:, ::-1]
    else:
        left = plane[:, 0:3][:, ::-1]
        right = plane[:, k - 4:k - 1][:, ::-1]
    return np.ascontiguousarray(np.concatenate([left, plane, right], axis=1))


def _even_pad(plane):
    h, w = plane.shape
    if h % 2:
        plane = np.concatenate([plane, plane[-1:, :]], axis=0)
    if w % 2:
        plane = np.concatenate([plane, plane[:, -1:]], axis=1)
    return np.ascontiguousarray(plane)


# ---------------------------------------------------------------- line ops

def analysis_pair(line, lp, hp, backend=BackendId.SCALAR):
    """Stride-2 dual filtering of one pre-extended line.

    ``line`` must hold 2*outwidth + 12 samples; returns (lo, hi) of length
    outwidth each.
    """
    line = np.ascontiguousarray(line, dtype=np.float32)
    if line.ndim != 1 or line.size < 14 or (line.size - 12) % 2:
        raise ValueError("line length must be 2*outwidth + 12 with outwidth >= 1")
    ex = get_executor(backend)
    lo, hi = ex.analysis(line.reshape(1, -1), np.asarray(lp), np.asarray(hp))
    return lo[0], hi[0]


def synthesis_pair(lo, hi, lp_s, hp_s, backend=BackendId.SCALAR):
    """Upsample-by-2 and filter-and-sum; adjoint of :func:`analysis_pair`.

    For W input pairs returns 2W - 12 samples: the interior of the line the
    coefficients were computed from.
    """
    lo = np.ascontiguousarray(lo, dtype=np.float32)
    hi = np.ascontiguousarray(hi, dtype=np.float32)
    if lo.shape != hi.shape or lo.ndim != 1:
        raise ValueError("lo and hi must be 1-D sequences of equal length")
    if lo.size < 7:
        raise ValueError("need at least 7 coefficient pairs")
    ex = get_executor(backend)
    out = ex.synthesis(lo.reshape(1, -1), hi.reshape(1, -1),
                       np.asarray(lp_s), np.asarray(hp_s))
    return out[0]


# ---------------------------------------------------------------- 2-D stages

def _stage_forward(plane, row_pair, col_pair, policy, ex):
    lo_x, hi_x = ex.analysis(_extend_rows(plane, policy), row_pair.lo, row_pair.hi)
    out = {}
    for tag, p in (("L", lo_x), ("H", hi_x)):
        ext = _extend_rows(np.ascontiguousarray(p.T), policy)
        lo_y, hi_y = ex.analysis(ext, col_pair.lo, col_pair.hi)
        out[tag + "L"] = np.ascontiguousarray(lo_y.T)
        out[tag + "H"] = np.ascontiguousarray(hi_y.T)
    return out


def _stage_inverse(sub, syn_pair, policy, ex):
    planes = {}
    for tag in ("L", "H"):
        lo_e = _extend_coeff_rows(np.ascontiguousarray(sub[tag + "L"].T), policy, "lo")
        hi_e = _extend_coeff_rows(np.ascontiguousarray(sub[tag + "H"].T), policy, "hi")
        planes[tag] = np.ascontiguousarray(
            ex.synthesis(lo_e, hi_e, syn_pair.lo, syn_pair.hi).T)
    lo_e = _extend_coeff_rows(planes["L"], policy, "lo")
    hi_e = _extend_coeff_rows(planes["H"], policy, "hi")
    return ex.synthesis(lo_e, hi_e, syn_pair.lo, syn_pair.hi)


def dwt2d_level(plane, row_bank, col_bank, backend=BackendId.SCALAR):
    """One separable DWT level with whole-sample symmetric boundaries.

    Returns (LL, LH, HL, HH); the first letter is the horizontal band.  Odd
    dimensions are even-padded by edge replication before filtering.
    """
    plane = np.ascontiguousarray(plane, dtype=np.float32)
    if plane.ndim != 2 or plane.shape[0] < 2 or plane.shape[1] < 2:
        raise ValueError("plane must be at least 2x2")
    ex = get_executor(backend)
    sub = _stage_forward(_even_pad(plane), row_bank, col_bank, "reflect", ex)
    return sub["LL"], sub["LH"], sub["HL"], sub["HH"]


_QUAD_TO_BANDS = {
    # type -> ((orientation of z1, orientation of z2))
    "HL": (-15, 15),
    "HH": (45, -45),
    "LH": (-75, 75),
}


def _quad_to_complex(subs_by_combo, typ):
    aa = subs_by_combo[("a", "a")][typ]
    ab = subs_by_combo[("a", "b")][typ]
    ba = subs_by_combo[("b", "a")][typ]
    bb = subs_by_combo[("b", "b")][typ]
    z1 = ((aa - bb) * _INV_SQRT2, (ab + ba) * _INV_SQRT2)
    z2 = ((aa + bb) * _INV_SQRT2, (ba - ab) * _INV_SQRT2)
    o1, o2 = _QUAD_TO_BANDS[typ]
    return {o1: z1, o2: z2}


def _level_bands(subs_by_combo):
    by_orientation = {}
    for typ in ("HL", "HH", "LH"):
        by_orientation.update(_quad_to_complex(subs_by_combo, typ))
    return [ComplexSubband(o, *by_orientation[o]) for o in ORIENTATIONS]


def _aa_highpass(bands, typ):
    o1, o2 = _QUAD_TO_BANDS[typ]
    by_o = {b.orientation: b for b in bands}
    return (by_o[o1].re + by_o[o2].re) * _INV_SQRT2


def _check_levels(width, height, levels):
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if levels > int(np.floor(np.log2(min(width, height)))):
        raise ValueError(f"levels={levels} too deep for {width}x{height} frame")


def dtcwt_forward(frame, levels, bank: FilterBank = None,
                  backend=BackendId.SCALAR) -> Pyramid:
    """Forward DT-CWT of a frame.

    ``backend`` may be a BackendId (one backend for every level), a string,
    or a sequence of per-level backends.
    """
    if isinstance(frame, Frame):
        data = frame.data
    else:
        data = Frame.from_array(frame).data
    h, w = data.shape
    _check_levels(w, h, levels)
    bank = bank or default_bank()
    executors = _per_level_executors(backend, levels)

    plane = _even_pad(data)
    quads = {rc: plane for rc in _COMBOS}
    out_levels = []
    for lev in range(levels):
        ex = executors[lev]
        policy = "reflect" if lev == 0 else "wrap"
        group = bank.level1_analysis if lev == 0 else bank.qshift_analysis
        pairs = {t: _pair32(group[t]) for t in ("a", "b")}
        quads = {rc: _even_pad(q) for rc, q in quads.items()}
        subs = {}
        if lev == 0:
            base = quads[("a", "a")]
            rows = {}
            for r in ("a", "b"):
                ext = _extend_rows(base, policy)
                rows[r] = ex.analysis(ext, pairs[r].lo, pairs[r].hi)
        else:
            rows = {}
            for r in ("a", "b"):
                for c in ("a", "b"):
                    ext = _extend_rows(quads[(r, c)], policy)
                    rows[(r, c)] = ex.analysis(ext, pairs[r].lo, pairs[r].hi)
        for c in ("a", "b"):
            for r in ("a", "b"):
                lo_x, hi_x = rows[r] if lev == 0 else rows[(r, c)]
                sub = {}
                for tag, p in (("L", lo_x), ("H", hi_x)):
                    ext = _extend_rows(np.ascontiguousarray(p.T), policy)
                    lo_y, hi_y = ex.analysis(ext, pairs[c].lo, pairs[c].hi)
                    sub[tag + "L"] = np.ascontiguousarray(lo_y.T)
                    sub[tag + "H"] = np.ascontiguousarray(hi_y.T)
                subs[(r, c)] = sub
        out_levels.append(_level_bands(subs))
        quads = {rc: subs[rc]["LL"] for rc in _COMBOS}
    pyr = Pyramid(levels=out_levels, lowpass=quads[("a", "a")],
                  source_width=w, source_height=h)
    pyr.validate()
    return pyr


def dtcwt_inverse(pyramid: Pyramid, bank: FilterBank = None,
                  backend=BackendId.SCALAR) -> Frame:
    """Inverse DT-CWT; exact round trip up to float32 rounding."""
    pyramid.validate()
    bank = bank or default_bank()
    nlev = len(pyramid.levels)
    executors = _per_level_executors(backend, nlev)
    dims = level_input_dims(pyramid.source_width, pyramid.source_height, nlev)

    ll = pyramid.lowpass
    for lev in range(nlev - 1, -1, -1):
        ex = executors[lev]
        policy = "reflect" if lev == 0 else "wrap"
        group = bank.level1_synthesis if lev == 0 else bank.qshift_synthesis
        syn = _pair32(group["a"])
        bands = pyramid.levels[lev]
        sub = {"LL": np.ascontiguousarray(ll, dtype=np.float32)}
        for typ in ("LH", "HL", "HH"):
            sub[typ] = _aa_highpass(bands, typ)
        ll = _stage_inverse(sub, syn, policy, ex)
        in_w, in_h = dims[lev]
        ll = np.ascontiguousarray(ll[:in_h, :in_w])
    return Frame(ll[:pyramid.source_height, :pyramid.source_width])


class _Pair32:
    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi


def _pair32(pair):
    lo, hi = pair.as_float32()
    return _Pair32(lo, hi)


def _per_level_executors(backend, levels):
    if isinstance(backend, (list, tuple)):
        if len(backend) != levels:
            raise ValueError("per-level backend list must match level count")
        return [get_executor(b) for b in backend]
    ex = get_executor(backend)
    return [ex] * levels


# ---------------------------------------------------------------- dump I/O

def dump_pyramid(pyramid: Pyramid, path):
    """Write the little-endian DTCP coefficient dump."""
    pyramid.validate()
    with open(path, "wb") as fh:
        fh.write(DUMP_MAGIC)
        fh.write(struct.pack("<IIII", DUMP_VERSION, pyramid.source_width,
                             pyramid.source_height, len(pyramid.levels)))
        for bands in pyramid.levels:
            for band in bands:
                fh.write(np.ascontiguousarray(band.re, dtype="<f4").tobytes())
                fh.write(np.ascontiguousarray(band.im, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(pyramid.lowpass, dtype="<f4").tobytes())


def load_pyramid(path) -> Pyramid:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != DUMP_MAGIC:
        raise ParseError("bad magic, expected DTCP", offset=0)
    version, width, height, nlev = struct.unpack_from("<IIII", raw, 4)
    if version != DUMP_VERSION:
        raise ParseError(f"unsupported dump version {version}", offset=4)
    pos = 20
    levels = []
    for lev in range(1, nlev + 1):
        wl = -(-width // (1 << lev))
        hl = -(-height // (1 << lev))
        nbytes = wl * hl * 4
        bands = []
        for orientation in ORIENTATIONS:
            planes = []
            for _ in range(2):
                if pos + nbytes > len(raw):
                    raise ParseError("truncated pyramid dump", offset=pos)
                planes.append(np.frombuffer(raw, dtype="<f4", count=wl * hl,
                                            offset=pos).reshape(hl, wl).copy())
                pos += nbytes
            bands.append(ComplexSubband(orientation, *planes))
        levels.append(bands)
    wl = -(-width // (1 << nlev))
    hl = -(-height // (1 << nlev))
    nbytes = wl * hl * 4
    if pos + nbytes > len(raw):
        raise ParseError("truncated lowpass plane", offset=pos)
    lowpass = np.frombuffer(raw, dtype="<f4", count=wl * hl,
                            offset=pos).reshape(hl, wl).copy()
    pyr = Pyramid(levels=levels, lowpass=lowpass,
                  source_width=width, source_height=height)
    pyr.validate()
    return pyr
