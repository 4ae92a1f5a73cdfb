"""Cycle and energy model of the wavelet engine, with anchor calibration.

The engine runs at a fixed 100 MHz.  A line command of ``outwidth`` output
pairs costs

    cmd_overhead + xfer_in*(2*outwidth + 12) + (outwidth + 6 + pipeline_depth)
                 + xfer_out*(2*outwidth)

cycles: command dispatch, input-area DMA, the II=1 filter loop with its
drain, and output write-back.  Transfers do not overlap the loop within one
command; across lines the host fill stage hides under engine processing
except for the first line of each plane pass.  Loading a 12+12-tap
coefficient set goes over the general-purpose port at 25 cycles per word.

CPU backends are modeled as per-tap-op constants, separately for the forward
and inverse paths (the strided synthesis writes cost more per tap than the
gathered analysis reads, and vectorization pays off differently in each).
The shared, never-accelerated per-frame work (quad combination, fusion rule,
marshalling) is charged at the scalar rate in every mode.

Absolute times are not the point: the model is calibrated to reproduce the
relative backend costs and their size crossovers, with the absolute scale
pinned by a nominal 40 ns scalar tap cost.
"""

from __future__ import annotations

from dataclasses import dataclass, replace, fields

import numpy as np

from .errors import CalibrationFailed, NotCalibrated
from .workload import transform_counts

CLOCK_HZ = 1.0e8
GP_CYCLES_PER_WORD = 25.0
COEFF_WORDS_PER_LOAD = 24
POWER_ACCEL_EXTRA_MW = 19.2
CPU_NS_PER_TAP_SCALAR_PIN = 40.0

CONFIG_KEYS = (
    "clock_hz",
    "cmd_overhead_cycles",
    "xfer_in_cycles_per_word",
    "xfer_out_cycles_per_word",
    "pipeline_depth",
    "cpu_ns_per_tap_scalar",
    "cpu_ns_per_tap_vector",
    "power_base_mw",
    "power_accel_extra_mw",
    # extension keys: per-direction CPU constants (the quoted NEON gains for
    # the forward and inverse transforms differ; one pair of constants cannot
    # represent both within tolerance)
    "cpu_ns_per_tap_scalar_inverse",
    "cpu_ns_per_tap_vector_inverse",
)


@dataclass(frozen=True)
class CostModelParams:
    # defaults are the frozen output of calibrate_to_paper (tools/fit_costmodel.py)
    clock_hz: float = CLOCK_HZ
    cmd_overhead_cycles: float = 1408.1879115519655
    xfer_in_cycles_per_word: float = 1.5411362414641263
    xfer_out_cycles_per_word: float = 0.15
    pipeline_depth: float = 64.0
    cpu_ns_per_tap_scalar: float = CPU_NS_PER_TAP_SCALAR_PIN
    cpu_ns_per_tap_vector: float = 35.955843423490265
    cpu_ns_per_tap_scalar_inverse: float = 43.26374484609453
    cpu_ns_per_tap_vector_inverse: float = 34.87652055432906
    power_base_mw: float = POWER_ACCEL_EXTRA_MW / 0.036
    power_accel_extra_mw: float = POWER_ACCEL_EXTRA_MW
    calibrated: bool = False

    def validate(self):
        for f in fields(self):
            if f.name == "calibrated":
                continue
            if getattr(self, f.name) <= 0:
                raise ValueError(f"parameter {f.name} must be > 0")
        if self.calibrated:
            ratio = self.power_accel_extra_mw / self.power_base_mw
            if abs(ratio - 0.036) > 0.002:
                raise ValueError(f"accelerator power premium {ratio:.4f} "
                                 "outside 0.036 +/- 0.002")


def line_cycles(params: CostModelParams, outwidth: int) -> float:
    """Modeled cycles for one engine line command of ``outwidth`` pairs."""
    return (params.cmd_overhead_cycles
            + params.xfer_in_cycles_per_word * (2 * outwidth + 12)
            + (outwidth + 6 + params.pipeline_depth)
            + params.xfer_out_cycles_per_word * (2 * outwidth))


def load_cycles(params: CostModelParams) -> float:
    """Coefficient load: one command plus 24 words over the GP port."""
    return params.cmd_overhead_cycles + COEFF_WORDS_PER_LOAD * GP_CYCLES_PER_WORD


def fill_cycles(params: CostModelParams, words: int) -> float:
    """Host-side staging of one line into a transfer area."""
    return params.xfer_in_cycles_per_word * words


def _accel_cycles(params, passes, loads):
    cyc = loads * load_cycles(params)
    for group in passes:
        cyc += group.n_lines * line_cycles(params, group.outwidth)
        # one exposed host fill per plane pass
        cyc += group.n_passes * fill_cycles(params, 2 * group.outwidth + 12)
    return cyc


def predict_time(params: CostModelParams, backend, width, height, levels,
                 direction) -> float:
    """Analytic wall time in seconds for one transform (or frame total)."""
    if not params.calibrated:
        raise NotCalibrated("calibrate the cost model before predicting")
    return _predict_time_any(params, backend, width, height, levels, direction)


def _predict_time_any(params, backend, width, height, levels, direction):
    from .backends import BackendId
    backend = BackendId.parse(backend)
    counts = transform_counts(width, height, levels)
    ns = 1e-9
    csf = params.cpu_ns_per_tap_scalar

    def cpu_time(macs, scalar_ns, vector_ns):
        rate = scalar_ns if backend is BackendId.SCALAR else vector_ns
        return macs * rate * ns

    if direction == "forward":
        if backend is BackendId.ACCEL:
            return _accel_cycles(params, counts.forward_passes,
                                 counts.forward_loads) / params.clock_hz
        return cpu_time(counts.macs_forward, csf, params.cpu_ns_per_tap_vector)
    if direction == "inverse":
        if backend is BackendId.ACCEL:
            return _accel_cycles(params, counts.inverse_passes,
                                 counts.inverse_loads) / params.clock_hz
        return cpu_time(counts.macs_inverse,
                        params.cpu_ns_per_tap_scalar_inverse,
                        params.cpu_ns_per_tap_vector_inverse)
    if direction == "total":
        overhead = counts.overhead_ops * csf * ns
        return (_predict_time_any(params, backend, width, height, levels, "forward")
                + _predict_time_any(params, backend, width, height, levels, "inverse")
                + overhead)
    raise ValueError(f"unknown direction {direction!r}")


def predict_power_mw(params: CostModelParams, backend) -> float:
    from .backends import BackendId
    backend = BackendId.parse(backend)
    if backend is BackendId.ACCEL:
        return params.power_base_mw + params.power_accel_extra_mw
    return params.power_base_mw


def predict_energy(params: CostModelParams, backend, seconds) -> float:
    """Energy in millijoules: mode power (mW) times wall time (s)."""
    if not params.calibrated:
        raise NotCalibrated("calibrate the cost model before predicting")
    return predict_power_mw(params, backend) * seconds


# ------------------------------------------------------------- calibration

# (width, height, direction, numerator backend, denominator backend, ratio)
PAPER_ANCHORS = (
    (88, 72, "forward", "accel", "scalar", 1.0 - 0.556),
    (88, 72, "forward", "vector", "scalar", 1.0 - 0.10),
    (88, 72, "inverse", "accel", "scalar", 1.0 - 0.606),
    (88, 72, "inverse", "vector", "scalar", 1.0 - 0.16),
    (88, 72, "total", "accel", "scalar", 1.0 - 0.481),
    (88, 72, "total", "vector", "scalar", 1.0 - 0.08),
    (32, 24, "forward", "accel", "vector", 1.0 + 0.364),
)

# crossover windows the calibrated model must respect (levels=1 workloads):
# forward-time accel/vector flips inside (35x35, 40x40); total-energy flips
# inside (40x40, 64x48).
_CROSS_CHECKS = (
    ("forward", 35, 35, "above"),
    ("forward", 40, 40, "below"),
    ("energy", 40, 40, "above"),
    ("energy", 64, 48, "below"),
)

MAX_ANCHOR_RESIDUAL = 0.05

# residual windows implied by the tighter per-ratio tolerances (criterion
# bands for the energy ratios, example bands for the forward ratios); the
# 32x24 ratio keeps the generic 5% bound: jointly with the other windows its
# +-0.05 example band is infeasible for this model family.
_ANCHOR_BANDS = (0.045, 0.022, MAX_ANCHOR_RESIDUAL, MAX_ANCHOR_RESIDUAL,
                 MAX_ANCHOR_RESIDUAL, 0.0326, MAX_ANCHOR_RESIDUAL)

_FIT_FIELDS = (
    "cpu_ns_per_tap_scalar_inverse", "cpu_ns_per_tap_vector",
    "cpu_ns_per_tap_vector_inverse", "cmd_overhead_cycles",
    "xfer_in_cycles_per_word", "xfer_out_cycles_per_word", "pipeline_depth",
)
_FIT_LB = np.array([20.0, 20.0, 20.0, 25.0, 0.15, 0.15, 1.0])
_FIT_UB = np.array([90.0, 90.0, 90.0, 3000.0, 4.0, 4.0, 64.0])


def _params_from_vector(x):
    kv = dict(zip(_FIT_FIELDS, (float(v) for v in x)))
    return CostModelParams(calibrated=True, **kv)


def anchor_residuals(params: CostModelParams, anchors=PAPER_ANCHORS):
    """Relative error of each modeled anchor ratio."""
    out = {}
    for (w, h, direction, num, den, target) in anchors:
        tn = _predict_time_any(params, num, w, h, 1, direction)
        td = _predict_time_any(params, den, w, h, 1, direction)
        out[(w, h, direction, num, den)] = (tn / td) / target - 1.0
    return out


def _accel_vector_ratio(params, w, h, direction):
    if direction == "energy":
        ta = _predict_time_any(params, "accel", w, h, 1, "total")
        tv = _predict_time_any(params, "vector", w, h, 1, "total")
        prem = 1.0 + params.power_accel_extra_mw / params.power_base_mw
        return ta * prem / tv
    ta = _predict_time_any(params, "accel", w, h, 1, direction)
    tv = _predict_time_any(params, "vector", w, h, 1, direction)
    return ta / tv


def _crossover_margins(params):
    margins = []
    for direction, w, h, side in _CROSS_CHECKS:
        r = _accel_vector_ratio(params, w, h, direction)
        margins.append(r - 1.0 if side == "above" else 1.0 - r)
    return np.asarray(margins)


def calibrate_to_paper(anchors=PAPER_ANCHORS) -> CostModelParams:
    """Least-squares fit of the engine and CPU constants to the anchor set.

    Deterministic: starts from the frozen defaults, runs a minimax polish
    (epigraph form under SLSQP) and keeps whichever point is better.  Raises
    CalibrationFailed when any anchor residual reaches 5% or a crossover
    leaves its window.
    """
    if not anchors:
        raise CalibrationFailed("anchor set is empty")
    from scipy.optimize import minimize

    def resid_vec(x):
        p = _params_from_vector(x)
        return np.array(list(anchor_residuals(p, anchors).values()))

    def margins(x):
        return _crossover_margins(_params_from_vector(x))

    if len(anchors) == len(PAPER_ANCHORS) and tuple(anchors) == PAPER_ANCHORS:
        bands = np.asarray(_ANCHOR_BANDS)
    else:
        bands = np.full(len(anchors), MAX_ANCHOR_RESIDUAL)
    scale = MAX_ANCHOR_RESIDUAL / bands

    defaults = CostModelParams()
    x0 = np.array([getattr(defaults, name) for name in _FIT_FIELDS])

    def score(x):
        worst = float(np.abs(scale * resid_vec(x)).max())
        feasible = bool(np.all(margins(x) > 0.0))
        return worst + (0.0 if feasible else 10.0)

    best_x = x0
    best = score(x0)
    cons = [
        dict(type="ineq", fun=lambda q: q[-1] - scale * resid_vec(q[:-1])),
        dict(type="ineq", fun=lambda q: q[-1] + scale * resid_vec(q[:-1])),
        dict(type="ineq", fun=lambda q: margins(q[:-1]) - 1e-3),
        dict(type="ineq", fun=lambda q: q[:-1] - _FIT_LB),
        dict(type="ineq", fun=lambda q: _FIT_UB - q[:-1]),
    ]
    try:
        res = minimize(lambda q: q[-1],
                       np.concatenate([x0, [max(best, 0.05) + 0.05]]),
                       method="SLSQP", constraints=cons,
                       options=dict(maxiter=2000, ftol=1e-14))
        x = np.clip(res.x[:-1], _FIT_LB, _FIT_UB)
        if score(x) < best:
            best_x, best = x, score(x)
    except (ValueError, FloatingPointError):
        pass

    params = _params_from_vector(best_x)
    residuals = anchor_residuals(params, anchors)
    worst = max(abs(v) for v in residuals.values())
    report = {k: float(v) for k, v in residuals.items()}
    if worst >= MAX_ANCHOR_RESIDUAL:
        raise CalibrationFailed(
            f"worst anchor residual {worst:.3%} >= 5%", residuals=report)
    if np.any(_crossover_margins(params) <= 0.0):
        raise CalibrationFailed(
            "calibrated model violates a crossover window", residuals=report)
    params.validate()
    return params


# ------------------------------------------------------------- config file

def save_params(params: CostModelParams, path):
    """Plain-text key=value persistence."""
    with open(path, "w") as fh:
        for key in CONFIG_KEYS:
            fh.write(f"{key} = {getattr(params, key)!r}\n")
        fh.write(f"calibrated = {'true' if params.calibrated else 'false'}\n")


def load_params(path) -> CostModelParams:
    kv = {}
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            kv[key.strip()] = value.strip()
    kwargs = {}
    for key in CONFIG_KEYS:
        if key in kv:
            kwargs[key] = float(kv[key])
    if "calibrated" in kv:
        kwargs["calibrated"] = kv["calibrated"].lower() in ("true", "1", "yes")
    params = CostModelParams(**kwargs)
    params.validate()
    return params


import functools


@functools.lru_cache(maxsize=1)
def calibrated_params() -> CostModelParams:
    """Cached calibrate_to_paper() against the quoted anchor set."""
    return calibrate_to_paper()


def default_calibrated_params() -> CostModelParams:
    """The frozen fit result, marked calibrated (no optimizer run)."""
    return replace(CostModelParams(), calibrated=True)
