"""Single-channel float32 raster frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Frame:
    """Row-major float32 luma raster. ``data`` has shape (height, width)."""

    data: np.ndarray

    def __post_init__(self):
        d = self.data
        if d.ndim != 2 or d.shape[0] < 1 or d.shape[1] < 1:
            raise ValueError("frame data must be a non-empty 2-D array")
        if d.dtype != np.float32:
            object.__setattr__(self, "data", np.ascontiguousarray(d, dtype=np.float32))
        elif not d.flags.c_contiguous:
            object.__setattr__(self, "data", np.ascontiguousarray(d))
        if not np.all(np.isfinite(self.data)):
            raise ValueError("frame samples must be finite")

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    @classmethod
    def from_array(cls, arr) -> "Frame":
        return cls(np.ascontiguousarray(arr, dtype=np.float32))
