"""Regenerate the frozen cost-model defaults.

Minimax fit of the calibratable parameters to the published anchor ratios,
subject to the crossover-window constraints, using the package's own
predictor.  Run after any change to the workload counts and paste the
printed parameter values into CostModelParams.
"""

import numpy as np
from scipy.optimize import minimize

from wavefuse.costmodel import (CostModelParams, PAPER_ANCHORS,
                                _predict_time_any, anchor_residuals)

FIT_FIELDS = (
    "cpu_ns_per_tap_scalar_inverse", "cpu_ns_per_tap_vector",
    "cpu_ns_per_tap_vector_inverse", "cmd_overhead_cycles",
    "xfer_in_cycles_per_word", "xfer_out_cycles_per_word", "pipeline_depth",
)
LB = np.array([20.0, 20.0, 20.0, 25.0, 0.15, 0.15, 1.0])
UB = np.array([90.0, 90.0, 90.0, 3000.0, 4.0, 4.0, 64.0])
MARGIN = 0.004


def params_from(x):
    return CostModelParams(calibrated=True,
                           **dict(zip(FIT_FIELDS, (float(v) for v in x))))


def residvec(x):
    return np.array(list(anchor_residuals(params_from(x)).values()))


def av_ratio(p, w, h, direction):
    if direction == "energy":
        ta = _predict_time_any(p, "accel", w, h, 1, "total")
        tv = _predict_time_any(p, "vector", w, h, 1, "total")
        return ta * (1 + p.power_accel_extra_mw / p.power_base_mw) / tv
    return (_predict_time_any(p, "accel", w, h, 1, direction)
            / _predict_time_any(p, "vector", w, h, 1, direction))


def xform_ratio(p, w, h):
    ta = sum(_predict_time_any(p, "accel", w, h, 1, d) for d in ("forward", "inverse"))
    tv = sum(_predict_time_any(p, "vector", w, h, 1, d) for d in ("forward", "inverse"))
    return ta / tv


def hard(x):
    p = params_from(x)
    return np.array([
        av_ratio(p, 35, 35, "forward") - 1.0 - MARGIN,
        1.0 - av_ratio(p, 40, 40, "forward") - MARGIN,
        av_ratio(p, 40, 40, "energy") - 1.0 - MARGIN,
        1.0 - av_ratio(p, 64, 48, "energy") - MARGIN,
        xform_ratio(p, 22, 18) - 1.0 - MARGIN,
        1.0 - xform_ratio(p, 88, 72) - MARGIN,
        xform_ratio(p, 32, 24) - 1.0 - MARGIN,
        # keep the total-ratio anchors inside a tighter band so that the
        # energy reproduction criterion has margin
        0.030 - residvec(x)[4], residvec(x)[4] + 0.030,
        0.025 - residvec(x)[5], residvec(x)[5] + 0.025,
    ])


def fit(x0):
    cons = [
        dict(type="ineq", fun=lambda q: q[-1] - residvec(q[:-1])),
        dict(type="ineq", fun=lambda q: q[-1] + residvec(q[:-1])),
        dict(type="ineq", fun=lambda q: hard(q[:-1])),
        dict(type="ineq", fun=lambda q: q[:-1] - LB),
        dict(type="ineq", fun=lambda q: UB - q[:-1]),
    ]
    z0 = float(np.abs(residvec(x0)).max())
    r = minimize(lambda q: q[-1], np.concatenate([x0, [z0 + 0.05]]),
                 method="SLSQP", constraints=cons,
                 options=dict(maxiter=4000, ftol=1e-14))
    return np.clip(r.x[:-1], LB, UB)


def main():
    base = np.array([41.97, 36.22, 33.71, 1541.5, 0.15, 0.15, 1.0])
    best = None
    for seed in range(60):
        rng = np.random.default_rng(seed)
        x0 = np.clip(base * np.exp(rng.normal(0, 0.3, len(base))), LB, UB)
        try:
            x = fit(x0)
        except Exception:
            continue
        worst = float(np.abs(residvec(x)).max())
        feas = bool(np.all(hard(x) > -1e-9))
        score = worst + (0.0 if feas else 10.0)
        if best is None or score < best[0]:
            best = (score, x)
    score, x = best
    p = params_from(x)
    print(f"worst residual: {score * 100:.3f}%")
    for k, v in anchor_residuals(p).items():
        print(f"  {k}: {v * 100:+.2f}%")
    for name, value in zip(FIT_FIELDS, x):
        print(f"  {name} = {value!r}")
    for d, w, h in (("forward", 35, 35), ("forward", 40, 40),
                    ("energy", 40, 40), ("energy", 64, 48)):
        print(f"  accel/vector {d} @{w}x{h}: {av_ratio(p, w, h, d):.4f}")
    prev = None
    for s in range(8, 129):
        r = av_ratio(p, s, s, "forward")
        if prev is not None and (prev - 1) * (r - 1) < 0:
            print(f"  forward-time square crossover in ({s-1},{s})")
        prev = r
    prev = None
    for s in range(8, 129):
        r = av_ratio(p, s, s, "energy")
        if prev is not None and (prev - 1) * (r - 1) < 0:
            print(f"  energy square crossover in ({s-1},{s})")
        prev = r
    e_acc = (_predict_time_any(p, "accel", 88, 72, 1, "total")
             * (p.power_base_mw + p.power_accel_extra_mw))
    e_sca = _predict_time_any(p, "scalar", 88, 72, 1, "total") * p.power_base_mw
    e_vec = _predict_time_any(p, "vector", 88, 72, 1, "total") * p.power_base_mw
    print(f"  energy accel/scalar: {e_acc/e_sca:.4f}  vector/scalar: {e_vec/e_sca:.4f}")


if __name__ == "__main__":
    main()
