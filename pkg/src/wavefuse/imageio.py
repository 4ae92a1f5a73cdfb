"""Frame ingestion and emission: binary PGM (P5) sequences and raw Y8."""

from __future__ import annotations

import os
import re

import numpy as np

from .errors import InvalidInput, ParseError
from .frame import Frame


def read_pgm(path) -> Frame:
    """Read one binary PGM (type P5, maxval 255), promoted to float32."""
    with open(path, "rb") as fh:
        raw = fh.read()
    pos = 0

    def token():
        nonlocal pos
        while True:
            while pos < len(raw) and raw[pos:pos + 1].isspace():
                pos += 1
            if pos < len(raw) and raw[pos:pos + 1] == b"#":
                nl = raw.find(b"\n", pos)
                if nl < 0:
                    raise ParseError("unterminated comment", offset=pos)
                pos = nl + 1
                continue
            break
        start = pos
        while pos < len(raw) and not raw[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ParseError("truncated header", offset=start)
        return raw[start:pos], start

    magic, off = token()
    if magic != b"P5":
        raise ParseError(f"expected P5 magic, got {magic!r}", offset=off)
    fields = []
    for _ in range(3):
        tok, off = token()
        if not re.fullmatch(rb"\d+", tok):
            raise ParseError(f"bad header token {tok!r}", offset=off)
        fields.append(int(tok))
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ParseError("non-positive dimensions", offset=0)
    if maxval != 255:
        raise ParseError(f"unsupported maxval {maxval} (need 255)", offset=off)
    pos += 1  # single whitespace byte after maxval
    need = width * height
    if len(raw) - pos < need:
        raise ParseError(f"truncated pixel payload: need {need} bytes, "
                         f"have {len(raw) - pos}", offset=pos)
    pixels = np.frombuffer(raw, dtype=np.uint8, count=need, offset=pos)
    return Frame(pixels.reshape(height, width).astype(np.float32))


def write_pgm(frame: Frame, path):
    """Clamp to [0, 255], round half away from zero, write binary PGM."""
    data = np.clip(frame.data, 0.0, 255.0)
    data = np.floor(data + np.float32(0.5)).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(b"P5\n%d %d\n255\n" % (frame.width, frame.height))
        fh.write(data.tobytes())


def _sequence_paths(path):
    if os.path.isdir(path):
        names = sorted(n for n in os.listdir(path) if n.lower().endswith(".pgm"))
        if not names:
            raise InvalidInput(f"no .pgm files in {path}")
        return [os.path.join(path, n) for n in names]
    return [path]


def load_frames(path, fmt="pgm-sequence", size=None):
    """Load a frame sequence.

    pgm-sequence: a .pgm file or a directory of them (sorted by name).
    raw-y8: one file of consecutive 8-bit luma frames; ``size`` = (w, h)
    is required and the file length must be a multiple of w*h.
    """
    if fmt == "pgm-sequence":
        frames = [read_pgm(p) for p in _sequence_paths(path)]
        first = frames[0]
        for fr in frames[1:]:
            if fr.data.shape != first.data.shape:
                raise InvalidInput("frame dimensions differ across the sequence")
        return frames
    if fmt == "raw-y8":
        if size is None:
            raise InvalidInput("raw-y8 input requires an explicit --size WxH")
        width, height = size
        with open(path, "rb") as fh:
            raw = fh.read()
        stride = width * height
        if stride < 1 or len(raw) == 0 or len(raw) % stride:
            raise ParseError(
                f"raw payload of {len(raw)} bytes is not a multiple of "
                f"{width}x{height}", offset=len(raw) - (len(raw) % stride))
        pixels = np.frombuffer(raw, dtype=np.uint8)
        count = len(raw) // stride
        return [Frame(pixels[i * stride:(i + 1) * stride]
                      .reshape(height, width).astype(np.float32))
                for i in range(count)]
    raise InvalidInput(f"unknown input format {fmt!r}")
