"""Command-line front end.

Subcommands: fuse, bench, calibrate, transform, verify.
Exit codes: 0 success, 2 usage, 3 input parse, 4 calibration failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import config as config_mod
from .backends import BackendId, capability_report, verify_equivalence
from .costmodel import (CostModelParams, calibrate_to_paper, calibrated_params,
                        load_params, save_params, anchor_residuals)
from .dispatch import (build_cost_table, load_table_csv, plan_pyramid,
                       save_table_csv)
from .errors import (CalibrationFailed, InvalidInput, ParseError,
                     WavefuseError)
from .filters import default_bank, load_bank
from .fusion import FusionRule
from .imageio import load_frames, write_pgm
from .transform import dtcwt_forward, dtcwt_inverse, dump_pyramid, load_pyramid

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_CALIBRATION = 4


def _parse_size(token):
    try:
        w, h = token.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"size must look like 88x72, got {token!r}") from None


def _parse_sizes(text):
    return [_parse_size(tok) for tok in text.split(",") if tok]


def _global_flags(suppress):
    common = argparse.ArgumentParser(add_help=False)
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common.add_argument("--backend", default=d("scalar"),
                        choices=["scalar", "vector", "accel", "auto"],
                        help="compute backend (auto = cost-table dispatch)")
    common.add_argument("--objective", default=d("time"),
                        choices=["time", "energy"],
                        help="dispatch objective for --backend auto")
    common.add_argument("--levels", type=int, default=d(2),
                        help="decomposition levels")
    common.add_argument("--rule", default=d(None), choices=["max", "mean"],
                        help="highpass fusion rule")
    common.add_argument("--cost-model", default=d(None), metavar="PATH",
                        help="calibrated cost-model parameter file")
    common.add_argument("--seed", type=int, default=d(0),
                        help="seed for synthetic inputs")
    common.add_argument("--config", default=d(None), metavar="PATH",
                        help="key=value configuration file")
    common.add_argument("--filter-bank", default=d(None), metavar="PATH",
                        help="JSON filter bank (defaults to the built-in)")
    return common


def build_parser():
    # global flags are accepted both before and after the subcommand
    parser = argparse.ArgumentParser(
        prog="wavefuse",
        parents=[_global_flags(suppress=False)],
        description="Pixel-level video fusion on the dual-tree complex "
                    "wavelet transform with backend dispatch.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_flags(suppress=True)]

    p = sub.add_parser("fuse", help="fuse two frame sequences",
                       parents=common)
    p.add_argument("input_a")
    p.add_argument("input_b")
    p.add_argument("--format", default="pgm-sequence",
                   choices=["pgm-sequence", "raw-y8"])
    p.add_argument("--size", type=_parse_size, default=None,
                   help="frame size for raw-y8 input (WxH)")
    p.add_argument("--out", required=True,
                   help="output directory for fused PGM frames")
    p.add_argument("--stats-csv", default=None,
                   help="optional per-frame bench records CSV")
    p.add_argument("--loop", type=int, default=1, metavar="N",
                   help="repeat the input sequence N times (simulated stream)")

    p = sub.add_parser("bench", help="size/mode sweep producing CSV (+plots)",
                       parents=common)
    p.add_argument("--sizes", type=_parse_sizes,
                   default=list(bench_mod.PAPER_SIZES),
                   help="comma-separated WxH list")
    p.add_argument("--modes", default="scalar,vector,accel",
                   help="comma-separated mode list (scalar,vector,accel,auto)")
    p.add_argument("--frames", type=int, default=10)
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument("--plots", default=None, metavar="PREFIX",
                   help="emit SVG charts with this path prefix")

    p = sub.add_parser("calibrate", help="fit the cost model / build tables",
                       parents=common)
    p.add_argument("--source", default="paper", choices=["paper", "bench"])
    p.add_argument("--sizes", type=_parse_sizes,
                   default=list(bench_mod.PAPER_SIZES))
    p.add_argument("--out", required=True,
                   help="output cost-table CSV path")
    p.add_argument("--params-out", default=None,
                   help="also write the fitted parameter file here")

    p = sub.add_parser("transform", help="single forward/inverse transform",
                       parents=common)
    p.add_argument("direction", choices=["forward", "inverse"])
    p.add_argument("input", help="PGM frame (forward) or pyramid dump (inverse)")
    p.add_argument("--out", required=True,
                   help="pyramid dump (forward) or PGM (inverse)")

    p = sub.add_parser("verify", help="cross-backend equivalence check",
                       parents=common)
    p.add_argument("--sizes", type=_parse_sizes,
                   default=[(32, 24), (88, 72)])
    p.add_argument("--reference", default="scalar")
    p.add_argument("--candidates", default="vector,accel")

    return parser


def _load_cost_params(args) -> CostModelParams:
    if args.cost_model:
        return load_params(args.cost_model)
    return calibrated_params()


def _resolve_backend(args, width, height):
    if args.backend != "auto":
        return BackendId.parse(args.backend)
    params = _load_cost_params(args)
    from .workload import level_input_dims
    dims = level_input_dims(width, height, args.levels)
    grid = sorted(set(dims) | {(width, height)} | set(bench_mod.PAPER_SIZES))
    table = build_cost_table("paper-model", grid, params=params, levels=1)
    plan = plan_pyramid(table, width, height, args.levels,
                        f"min-{args.objective}")
    return plan


def _rule_from(args):
    cfg = config_mod.merged(args.config)
    hp = args.rule or cfg.get("fusion.highpass_rule", "max")
    lp = cfg.get("fusion.lowpass_rule", "mean")
    return FusionRule(highpass_rule=hp, lowpass_rule=lp)


def _bank_from(args):
    return load_bank(args.filter_bank) if args.filter_bank else default_bank()


def cmd_fuse(args):
    rule = _rule_from(args)
    bank = _bank_from(args)
    frames_a = load_frames(args.input_a, args.format, size=args.size)
    frames_b = load_frames(args.input_b, args.format, size=args.size)
    if len(frames_a) != len(frames_b):
        raise InvalidInput("input sequences must have equal length")
    if frames_a[0].data.shape != frames_b[0].data.shape:
        raise InvalidInput("input sequences must share frame dimensions")
    frames_a = frames_a * args.loop
    frames_b = frames_b * args.loop
    backend = _resolve_backend(args, frames_a[0].width, frames_a[0].height)
    plan_backends = (list(backend.assignments)
                     if hasattr(backend, "assignments") else backend)
    power = 0.0
    if args.cost_model or args.backend == "auto":
        params = _load_cost_params(args)
        from .costmodel import predict_power_mw
        if hasattr(backend, "assignments"):
            power = max(predict_power_mw(params, b)
                        for b in backend.assignments)
        else:
            power = predict_power_mw(params, backend)
    fused, records = bench_mod.run_fusion_records(
        frames_a, frames_b, args.levels, rule, plan_backends, bank,
        power_mw=power)
    os.makedirs(args.out, exist_ok=True)
    for i, frame in enumerate(fused):
        write_pgm(frame, os.path.join(args.out, f"fused_{i:04d}.pgm"))
    if args.stats_csv:
        bench_mod.save_bench_csv(records, args.stats_csv)
    print(f"fused {len(fused)} frame(s) -> {args.out}")
    return EXIT_OK


def cmd_bench(args):
    params = _load_cost_params(args)
    modes = [m for m in args.modes.split(",") if m]
    records, shares = bench_mod.run_bench(
        sizes=args.sizes, modes=modes, frames=args.frames,
        levels=args.levels, params=params, rule=_rule_from(args),
        seed=args.seed)
    meta = ["synthetic inputs: center crops of one master texture "
            f"(seed={args.seed})"]
    bench_mod.save_bench_csv(records, args.out, metadata=meta)
    if shares:
        print("scalar-mode share breakdown (forward/inverse/rule of total):")
        for (w, h), (sf, si, sr) in sorted(shares.items(),
                                           key=lambda kv: kv[0][0] * kv[0][1]):
            print(f"  {w}x{h}: {sf:.3f} / {si:.3f} / {sr:.3f}")
    if args.plots:
        paths = bench_mod.emit_plots(records, args.plots)
        print("plots: " + ", ".join(paths))
    print(f"wrote {len(records)} records -> {args.out}")
    return EXIT_OK


def cmd_calibrate(args):
    params = calibrate_to_paper()
    worst = max(abs(v) for v in anchor_residuals(params).values())
    print(f"calibration converged; worst anchor residual {worst:.2%}")
    if args.params_out:
        save_params(params, args.params_out)
        print(f"parameters -> {args.params_out}")
    source = "paper-model" if args.source == "paper" else "microbenchmark"
    table = build_cost_table(source, args.sizes, params=params, levels=1)
    save_table_csv(table, args.out)
    print(f"cost table ({source}) -> {args.out}")
    return EXIT_OK


def cmd_transform(args):
    bank = _bank_from(args)
    backend = args.backend if args.backend != "auto" else "scalar"
    if args.direction == "forward":
        frames = load_frames(args.input, "pgm-sequence")
        pyr = dtcwt_forward(frames[0], args.levels, bank, backend=backend)
        dump_pyramid(pyr, args.out)
        print(f"pyramid dump -> {args.out}")
    else:
        pyr = load_pyramid(args.input)
        frame = dtcwt_inverse(pyr, bank, backend=backend)
        write_pgm(frame, args.out)
        print(f"reconstructed frame -> {args.out}")
    return EXIT_OK


def cmd_verify(args):
    report_ok = True
    cap = capability_report()
    print(f"kernels: {cap.impl} (lane width {cap.lane_width}, "
          f"vector fallback: {cap.vector_fallback})")
    for cand in args.candidates.split(","):
        rep = verify_equivalence(args.reference, cand, args.sizes,
                                 levels=min(args.levels, 3))
        status = "pass" if rep.passed else "FAIL"
        print(f"{args.reference} vs {cand}: max relative deviation "
              f"{rep.max_rel_deviation:.3e} [{status}]")
        for (w, h), dev in rep.per_size.items():
            print(f"    {w}x{h}: {dev:.3e}")
        report_ok &= rep.passed
    return EXIT_OK if report_ok else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "fuse": cmd_fuse,
        "bench": cmd_bench,
        "calibrate": cmd_calibrate,
        "transform": cmd_transform,
        "verify": cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except CalibrationFailed as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        for key, value in (exc.residuals or {}).items():
            print(f"  {key}: {value:+.2%}", file=sys.stderr)
        return EXIT_CALIBRATION
    except (ParseError, InvalidInput) as exc:
        offset = getattr(exc, "offset", None)
        suffix = f" (byte {offset})" if offset is not None else ""
        print(f"input error: {exc}{suffix}", file=sys.stderr)
        return EXIT_PARSE
    except WavefuseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
