"""Cost-table construction and cost-driven backend selection.

The table holds per-(backend, width, height, direction) time and energy,
either from the calibrated model or from host microbenchmarks (the
accelerator entries stay modeled in microbenchmark mode; provenance is
recorded per entry so mixed tables are auditable).  Grid queries resolve by
exact hit or bilinear interpolation over the width/height grid; sizes
outside the grid hull are refused rather than extrapolated.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .backends import BackendId
from .costmodel import (CostModelParams, predict_energy, predict_power_mw,
                        predict_time)
from .errors import ExtrapolationRefused, NotCalibrated
from .workload import level_input_dims

DIRECTIONS = ("forward", "inverse", "total")
TIE_BREAK = (BackendId.ACCEL, BackendId.VECTOR, BackendId.SCALAR)

CSV_COLUMNS = ("backend", "width", "height", "direction",
               "time_s", "energy_mj", "provenance")


@dataclass(frozen=True)
class CostEntry:
    time_s: float
    energy_mj: float
    provenance: str           # "modeled" | "measured"


@dataclass
class CostTable:
    entries: dict = field(default_factory=dict)
    widths: tuple = ()
    heights: tuple = ()
    levels: int = 1
    sweep: tuple = ()        # the requested sizes, in sweep order

    def put(self, backend, width, height, direction, entry: CostEntry):
        self.entries[(BackendId.parse(backend), width, height, direction)] = entry

    def get(self, backend, width, height, direction) -> CostEntry:
        return self.entries[(BackendId.parse(backend), width, height, direction)]

    def sizes(self):
        """Monotone size sweep: the requested sizes, smallest area first."""
        if self.sweep:
            return list(self.sweep)
        seen = []
        for (_, w, h, _) in self.entries:
            if (w, h) not in seen:
                seen.append((w, h))
        return sorted(seen, key=lambda s: (s[0] * s[1], s[0]))

    def backends(self):
        return [b for b in TIE_BREAK
                if any(k[0] is b for k in self.entries)]

    def cost(self, backend, width, height, direction, objective) -> float:
        """Exact-hit or bilinear-interpolated cost; refuses extrapolation."""
        backend = BackendId.parse(backend)
        key = (backend, width, height, direction)
        if key in self.entries:
            return self._metric(self.entries[key], objective)
        ws, hs = np.asarray(self.widths), np.asarray(self.heights)
        if (len(ws) < 2 or len(hs) < 2 or not (ws[0] <= width <= ws[-1])
                or not (hs[0] <= height <= hs[-1])):
            raise ExtrapolationRefused(
                f"size {width}x{height} outside the table grid hull")
        i = int(np.searchsorted(ws, width, side="right") - 1)
        j = int(np.searchsorted(hs, height, side="right") - 1)
        i = min(i, len(ws) - 2)
        j = min(j, len(hs) - 2)
        w0, w1 = ws[i], ws[i + 1]
        h0, h1 = hs[j], hs[j + 1]
        tx = 0.0 if w1 == w0 else (width - w0) / (w1 - w0)
        ty = 0.0 if h1 == h0 else (height - h0) / (h1 - h0)
        v = 0.0
        try:
            for (wg, fx) in ((w0, 1 - tx), (w1, tx)):
                for (hg, fy) in ((h0, 1 - ty), (h1, ty)):
                    if fx * fy == 0.0:
                        continue
                    entry = self.entries[(backend, int(wg), int(hg), direction)]
                    v += fx * fy * self._metric(entry, objective)
        except KeyError:
            raise ExtrapolationRefused(
                f"no table entries bracketing {width}x{height}") from None
        return v

    @staticmethod
    def _metric(entry: CostEntry, objective):
        objective = _norm_objective(objective)
        return entry.time_s if objective == "min-time" else entry.energy_mj


def _norm_objective(objective):
    obj = str(objective).lower()
    if obj in ("min-time", "time"):
        return "min-time"
    if obj in ("min-energy", "energy"):
        return "min-energy"
    raise ValueError(f"unknown objective {objective!r}")


def build_cost_table(source, sizes, params: CostModelParams = None,
                     levels=1, frames=10, seed=7) -> CostTable:
    """Populate a table over the tensor grid of the requested sizes.

    ``source`` is "paper-model" (analytic, needs calibrated params) or
    "microbenchmark" (measured scalar/vector wall times over >= ``frames``
    repetitions, median; accelerator entries stay modeled).
    """
    table = CostTable(levels=levels)
    if not sizes:
        return table
    widths = tuple(sorted({int(w) for (w, h) in sizes}))
    heights = tuple(sorted({int(h) for (w, h) in sizes}))
    table.widths = widths
    table.heights = heights
    table.sweep = tuple(sorted({(int(w), int(h)) for (w, h) in sizes},
                               key=lambda s: (s[0] * s[1], s[0])))
    if source not in ("paper-model", "microbenchmark"):
        raise ValueError(f"unknown cost table source {source!r}")
    if params is None or not params.calibrated:
        raise NotCalibrated("cost table construction needs calibrated params")
    for w in widths:
        for h in heights:
            if levels > int(np.floor(np.log2(min(w, h)))):
                continue
            measured = {}
            if source == "microbenchmark":
                measured = _microbench(w, h, levels, frames, seed)
            for backend in TIE_BREAK:
                for direction in DIRECTIONS:
                    if (backend, direction) in measured:
                        t = measured[(backend, direction)]
                        prov = "measured"
                    else:
                        t = predict_time(params, backend, w, h, levels, direction)
                        prov = "modeled"
                    e = predict_energy(params, backend, t)
                    table.put(backend, w, h, direction,
                              CostEntry(time_s=t, energy_mj=e, provenance=prov))
    return table


def _microbench(width, height, levels, frames, seed):
    """Median wall time of the host CPU backends over repeated frames."""
    from .filters import default_bank
    from .transform import dtcwt_forward, dtcwt_inverse

    bank = default_bank()
    rng = np.random.default_rng(seed)
    frame = rng.random((height, width), dtype=np.float32)
    out = {}
    for backend in (BackendId.SCALAR, BackendId.VECTOR):
        fwd_times = []
        inv_times = []
        for _ in range(max(frames, 10)):
            t0 = time.perf_counter()
            pyr = dtcwt_forward(frame, levels, bank, backend=backend)
            t1 = time.perf_counter()
            dtcwt_inverse(pyr, bank, backend=backend)
            t2 = time.perf_counter()
            fwd_times.append(t1 - t0)
            inv_times.append(t2 - t1)
        tf = float(np.median(fwd_times))
        ti = float(np.median(inv_times))
        out[(backend, "forward")] = tf
        out[(backend, "inverse")] = ti
        out[(backend, "total")] = tf + ti
    return out


@dataclass(frozen=True)
class DispatchPlan:
    """Per-level backend assignment for one (frame size, levels) workload."""

    objective: str
    assignments: tuple

    def __post_init__(self):
        object.__setattr__(self, "objective", _norm_objective(self.objective))
        object.__setattr__(self, "assignments",
                           tuple(BackendId.parse(b) for b in self.assignments))


def select_backend(table: CostTable, width, height, direction,
                   objective) -> BackendId:
    """Exact argmin of the objective metric; ties resolve Accel > Vector >
    Scalar."""
    best = None
    for backend in TIE_BREAK:
        if backend not in table.backends():
            continue
        c = table.cost(backend, width, height, direction, objective)
        if best is None or c < best[0]:
            best = (c, backend)
    if best is None:
        raise ValueError("cost table holds no backends")
    return best[1]


def level_transform_cost(table: CostTable, backend, width, height, objective):
    """Forward + inverse cost of one level's workload on one backend."""
    return (table.cost(backend, width, height, "forward", objective)
            + table.cost(backend, width, height, "inverse", objective))


def plan_pyramid(table: CostTable, width, height, levels,
                 objective) -> DispatchPlan:
    """Assign each pyramid level the cheapest backend for its plane size.

    Level costs use the forward+inverse transform work at that level's input
    dimensions; the fusion rule runs on the host regardless of the plan.
    """
    assignments = []
    for (w, h) in level_input_dims(width, height, levels):
        best = None
        for backend in table.backends():
            c = level_transform_cost(table, backend, w, h, objective)
            if best is None or c < best[0]:
                best = (c, backend)
        assignments.append(best[1])
    return DispatchPlan(objective=objective, assignments=tuple(assignments))


def find_crossover(table: CostTable, backend_a, backend_b, direction,
                   objective):
    """Bracketing pair of adjacent swept sizes where the cost ordering of
    two backends flips; None when it never does."""
    backend_a = BackendId.parse(backend_a)
    backend_b = BackendId.parse(backend_b)
    sweep = table.sizes()
    prev = None
    for (w, h) in sweep:
        ca = table.cost(backend_a, w, h, direction, objective)
        cb = table.cost(backend_b, w, h, direction, objective)
        sign = np.sign(ca - cb)
        if prev is not None and sign != 0 and prev[1] != 0 and sign != prev[1]:
            return (prev[0], (w, h))
        prev = ((w, h), sign)
    return None


def save_table_csv(table: CostTable, path_or_file):
    def _write(fh):
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for (backend, w, h, direction), entry in sorted(
                table.entries.items(),
                key=lambda kv: (kv[0][1] * kv[0][2], kv[0][1],
                                kv[0][3], kv[0][0].value)):
            writer.writerow([backend.value, w, h, direction,
                             repr(entry.time_s), repr(entry.energy_mj),
                             entry.provenance])
    if isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__"):
        with open(path_or_file, "w", newline="") as fh:
            _write(fh)
    else:
        _write(path_or_file)


def load_table_csv(path, levels=1) -> CostTable:
    table = CostTable(levels=levels)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            table.put(row["backend"], int(row["width"]), int(row["height"]),
                      row["direction"],
                      CostEntry(time_s=float(row["time_s"]),
                                energy_mj=float(row["energy_mj"]),
                                provenance=row["provenance"]))
    table.widths = tuple(sorted({k[1] for k in table.entries}))
    table.heights = tuple(sorted({k[2] for k in table.entries}))
    return table
