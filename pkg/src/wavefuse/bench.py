"""Benchmark harness: measured CPU sweeps, modeled accelerator columns,
per-phase share breakdown, CSV emission and SVG charts."""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .backends import BackendId
from .costmodel import (CostModelParams, predict_energy, predict_power_mw,
                        predict_time)
from .errors import InvalidInput
from .filters import default_bank
from .frame import Frame
from .fusion import FusionRule, fuse_pyramids
from .transform import dtcwt_forward, dtcwt_inverse

BENCH_COLUMNS = ("mode", "width", "height", "levels", "frames",
                 "t_forward_s", "t_inverse_s", "t_fuse_rule_s", "t_total_s",
                 "power_mw", "energy_mj", "provenance")

PAPER_SIZES = ((32, 24), (35, 35), (40, 40), (64, 48), (88, 72))


@dataclass(frozen=True)
class BenchRecord:
    mode: str
    width: int
    height: int
    levels: int
    frames: int
    t_forward_s: float
    t_inverse_s: float
    t_fuse_rule_s: float
    t_total_s: float
    power_mw: float
    energy_mj: float
    provenance: str = "measured"

    def __post_init__(self):
        parts = self.t_forward_s + self.t_inverse_s + self.t_fuse_rule_s
        if self.t_total_s < parts - 1e-9:
            raise ValueError("component times exceed the total")

    def row(self):
        return [self.mode, self.width, self.height, self.levels, self.frames,
                repr(self.t_forward_s), repr(self.t_inverse_s),
                repr(self.t_fuse_rule_s), repr(self.t_total_s),
                repr(self.power_mw), repr(self.energy_mj), self.provenance]


def synthetic_pair(width, height, seed=0):
    """Deterministic multi-band test pair; smaller sizes are center crops of
    one master texture (recorded in the CSV metadata)."""
    rng = np.random.default_rng(seed)
    mh, mw = 144, 176
    yy, xx = np.mgrid[0:mh, 0:mw].astype(np.float32)
    base = (96.0 + 60.0 * np.sin(2 * np.pi * xx / 17.0)
            + 48.0 * np.cos(2 * np.pi * (xx + yy) / 23.0)
            + 24.0 * np.sin(2 * np.pi * yy / 9.0))
    tex_a = base + rng.normal(0.0, 6.0, base.shape)
    tex_b = base[::-1, ::-1].copy() + rng.normal(0.0, 6.0, base.shape)
    y0 = (mh - height) // 2
    x0 = (mw - width) // 2
    crop_a = np.clip(tex_a[y0:y0 + height, x0:x0 + width], 0, 255)
    crop_b = np.clip(tex_b[y0:y0 + height, x0:x0 + width], 0, 255)
    return (Frame(crop_a.astype(np.float32)), Frame(crop_b.astype(np.float32)))


def _measured_run(frames_a, frames_b, levels, rule, backend, bank):
    tf = ti = tr = 0.0
    t_start = time.perf_counter()
    fused = []
    for fa, fb in zip(frames_a, frames_b):
        t0 = time.perf_counter()
        pa = dtcwt_forward(fa, levels, bank, backend=backend)
        pb = dtcwt_forward(fb, levels, bank, backend=backend)
        t1 = time.perf_counter()
        fp = fuse_pyramids(pa, pb, rule)
        t2 = time.perf_counter()
        fused.append(dtcwt_inverse(fp, bank, backend=backend))
        t3 = time.perf_counter()
        tf += t1 - t0
        tr += t2 - t1
        ti += t3 - t2
    total = time.perf_counter() - t_start
    return fused, tf, ti, tr, total


def run_bench(sizes=PAPER_SIZES, modes=("scalar", "vector", "accel"),
              frames=10, levels=1, params: CostModelParams = None,
              rule: FusionRule = None, seed=0):
    """One BenchRecord per (size, mode).

    CPU modes are measured on the host (fusing ``frames`` synthetic frame
    pairs per size); accel and auto rows are modeled from the calibrated
    cost model.  Returns (records, share_report) where the share report maps
    each scalar-mode size to its forward/inverse/rule fractions.
    """
    rule = rule or FusionRule()
    bank = default_bank()
    records = []
    shares = {}
    for (w, h) in sizes:
        pair = synthetic_pair(w, h, seed=seed)
        frames_a = [pair[0]] * frames
        frames_b = [pair[1]] * frames
        for mode in modes:
            mode_s = str(mode)
            if mode_s in ("scalar", "vector"):
                backend = BackendId.parse(mode_s)
                _, tf, ti, tr, total = _measured_run(
                    frames_a, frames_b, levels, rule, backend, bank)
                power = predict_power_mw(params, backend) if params else 0.0
                rec = BenchRecord(mode_s, w, h, levels, frames, tf, ti, tr,
                                  total, power, power * total, "measured")
                if mode_s == "scalar":
                    shares[(w, h)] = (tf / total, ti / total, tr / total)
            elif mode_s in ("accel", "auto"):
                if params is None or not params.calibrated:
                    raise InvalidInput("modeled bench rows need a calibrated "
                                       "cost model")
                if mode_s == "accel":
                    tf, ti, tr, power = _modeled_uniform(params, "accel", w, h,
                                                         levels, frames)
                else:
                    tf, ti, tr, power = _modeled_auto(params, w, h, levels,
                                                      frames)
                total = tf + ti + tr
                rec = BenchRecord(mode_s, w, h, levels, frames, tf, ti, tr,
                                  total, power, power * total, "modeled")
            else:
                raise InvalidInput(f"unknown bench mode {mode_s!r}")
            records.append(rec)
    return records, shares


def _modeled_uniform(params, backend, w, h, levels, frames):
    """Modeled per-run phase times: two forwards and one inverse per frame,
    plus the host-side rule/pipeline overhead."""
    tf = 2 * frames * predict_time(params, backend, w, h, levels, "forward")
    ti = frames * predict_time(params, backend, w, h, levels, "inverse")
    overhead = (predict_time(params, backend, w, h, levels, "total")
                - predict_time(params, backend, w, h, levels, "forward")
                - predict_time(params, backend, w, h, levels, "inverse"))
    return tf, ti, frames * overhead, predict_power_mw(params, backend)


def _modeled_auto(params, w, h, levels, frames):
    """Dispatch-planned row: each level billed on its argmin backend."""
    from .dispatch import build_cost_table, plan_pyramid
    from .workload import level_input_dims

    dims = level_input_dims(w, h, levels)
    grid = sorted({d for (dw, dh) in dims for d in ((dw, dh),)}
                  | {(w, h)} | set(PAPER_SIZES))
    table = build_cost_table("paper-model", grid, params=params, levels=1)
    plan = plan_pyramid(table, w, h, levels, "min-time")
    tf = ti = 0.0
    power = 0.0
    for (dw, dh), backend in zip(dims, plan.assignments):
        tf += 2 * frames * predict_time(params, backend, dw, dh, 1, "forward")
        ti += frames * predict_time(params, backend, dw, dh, 1, "inverse")
        power = max(power, predict_power_mw(params, backend))
    overhead = (predict_time(params, "scalar", w, h, levels, "total")
                - predict_time(params, "scalar", w, h, levels, "forward")
                - predict_time(params, "scalar", w, h, levels, "inverse"))
    return tf, ti, frames * overhead, power


def run_fusion_records(frames_a, frames_b, levels, rule, backend, bank=None,
                       power_mw=0.0):
    """Fuse two equal-length sequences; one measured BenchRecord per frame."""
    if len(frames_a) != len(frames_b):
        raise InvalidInput("input sequences must have equal length")
    bank = bank or default_bank()
    fused = []
    records = []
    for fa, fb in zip(frames_a, frames_b):
        if fa.data.shape != fb.data.shape:
            raise InvalidInput("input frames must have identical dimensions")
        out, tf, ti, tr, total = _measured_run([fa], [fb], levels, rule,
                                               backend, bank)
        fused.append(out[0])
        records.append(BenchRecord(str(backend), fa.width, fa.height, levels,
                                   1, tf, ti, tr, total, power_mw,
                                   power_mw * total, "measured"))
    return fused, records


def save_bench_csv(records, path, metadata=()):
    with open(path, "w", newline="") as fh:
        for line in metadata:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS)
        for rec in records:
            writer.writerow(rec.row())


def load_bench_csv(path):
    records = []
    with open(path, newline="") as fh:
        rows = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(rows)
    for row in reader:
        records.append(BenchRecord(
            mode=row["mode"], width=int(row["width"]),
            height=int(row["height"]), levels=int(row["levels"]),
            frames=int(row["frames"]), t_forward_s=float(row["t_forward_s"]),
            t_inverse_s=float(row["t_inverse_s"]),
            t_fuse_rule_s=float(row["t_fuse_rule_s"]),
            t_total_s=float(row["t_total_s"]), power_mw=float(row["power_mw"]),
            energy_mj=float(row["energy_mj"]),
            provenance=row.get("provenance", "measured")))
    return records


def emit_plots(records, out_prefix):
    """Three SVG charts from bench records: forward time, inverse+total
    time, and energy, each vs frame size with one series per mode and the
    accel/vector crossover interval annotated."""
    if not records:
        raise InvalidInput("no bench records to plot")
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    sizes = sorted({(r.width, r.height) for r in records},
                   key=lambda s: s[0] * s[1])
    xs = [np.sqrt(w * h) for (w, h) in sizes]
    labels = [f"{w}x{h}" for (w, h) in sizes]
    modes = sorted({r.mode for r in records})

    def series(mode, attr):
        out = []
        for (w, h) in sizes:
            match = [getattr(r, attr) for r in records
                     if r.mode == mode and (r.width, r.height) == (w, h)]
            out.append(match[0] if match else np.nan)
        return out

    def crossover_span(attr):
        if "accel" not in modes or "vector" not in modes:
            return None
        a = series("accel", attr)
        v = series("vector", attr)
        prev = None
        for i, (ca, cv) in enumerate(zip(a, v)):
            if np.isnan(ca) or np.isnan(cv):
                continue
            sign = np.sign(ca - cv)
            if prev is not None and sign != 0 and prev[1] != 0 and sign != prev[1]:
                return (xs[prev[0]], xs[i])
            prev = (i, sign)
        return None

    paths = []
    charts = (
        ("forward", [("t_forward_s", "forward")]),
        ("inverse_total", [("t_inverse_s", "inverse"), ("t_total_s", "total")]),
        ("energy", [("energy_mj", "energy")]),
    )
    for name, attrs in charts:
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for attr, label in attrs:
            for mode in modes:
                style = "--" if label == "total" else "-"
                ax.plot(xs, series(mode, attr), style, marker="o",
                        label=f"{mode} {label}" if len(attrs) > 1 else mode)
        span = crossover_span(attrs[0][0])
        if span and len(modes) > 1:
            ax.axvspan(span[0], span[1], color="0.85",
                       label="accel/vector crossover")
        ax.set_xticks(xs)
        ax.set_xticklabels(labels, rotation=30)
        ax.set_xlabel("frame size")
        ax.set_ylabel("seconds" if name != "energy" else "millijoules")
        ax.legend(fontsize=8)
        ax.set_title(name.replace("_", " + "))
        fig.tight_layout()
        path = f"{out_prefix}_{name}.svg"
        fig.savefig(path)
        plt.close(fig)
        paths.append(path)
    return paths
