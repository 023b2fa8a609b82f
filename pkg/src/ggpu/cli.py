"""Command-line entry points for every workflow.

Exit codes: 0 on success, 1 on domain errors (including an infeasible
plan), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import data_text, shipped_tech_params
from .analysis import (
    RISCV_AREA_MM2,
    emit_report,
    load_benchmarks,
    speedup_report,
)
from .design import build_reference_design
from .docio import (
    parse_document,
    read_design,
    read_table1,
    read_tech_params,
    write_design,
    write_tech_params,
)
from .errors import GgpuError
from .planner import Spec, enumerate_candidates, optimize_to_target, recommend_next, summary_table
from .simt import build_sim_params, build_workload, simulate, SimParams
from .tech import area_growth_summary, calibrate
from .timing import build_timing_graph, timing_report
from .design import GGpuConfig


def _load_tech(arg: str | None):
    if arg is None or arg == "fixtures":
        return shipped_tech_params()
    return read_tech_params(Path(arg).read_text())


def _cmd_plan(args) -> int:
    p = _load_tech(args.tech)
    base = build_reference_design(args.cus)
    spec = Spec(num_cus=args.cus, target_freq_mhz=args.target_mhz, wire_model=args.wire)
    result = optimize_to_target(base, p, spec)
    if args.output:
        Path(args.output).write_text(write_design(result.design))
    print(
        f"cus={args.cus} target={args.target_mhz:.0f} MHz "
        f"achieved={result.achieved_fmax_mhz:.1f} MHz "
        f"blocks={len(result.design.memories)} transforms={len(result.transform_log)} "
        f"area={result.ppa.total_area_mm2:.2f} mm2 power={result.ppa.total_w:.2f} W"
    )
    if not result.feasible:
        print(f"infeasible; best {result.achieved_fmax_mhz:.0f} MHz")
        return 1
    return 0


def _cmd_map(args) -> int:
    p = _load_tech(args.tech)
    d = read_design(Path(args.design).read_text())
    overrides = None
    if args.mem_delays:
        sections = parse_document(Path(args.mem_delays).read_text(), "measured-delays")
        overrides = {}
        for sec in sections:
            if sec.name == "measured-delays":
                for key, (raw, line) in sec.entries.items():
                    overrides[key] = float(raw)
    g = build_timing_graph(d, p)
    print(timing_report(g), end="")
    rec = recommend_next(d, p, measured_delays=overrides, target_mhz=args.target_mhz)
    print(f"current_fmax_mhz = {rec.current_fmax_mhz:.2f}")
    print(f"bottleneck = {rec.bottleneck}")
    if rec.action is None:
        print(f"action = none ({rec.reason})")
    else:
        fan = f" fan={rec.action.fan}" if rec.action.fan else ""
        print(f"action = {rec.action.kind} {rec.action.target}{fan}")
        print(f"predicted_fmax_mhz = {rec.predicted_fmax_mhz:.2f}")
    return 0


def _cmd_simulate(args) -> int:
    w = build_workload(Path(args.kernel).read_text() if os.path.exists(args.kernel) else data_text(f"kernels/{args.kernel}.kv"))
    sp = build_sim_params(Path(args.sim).read_text()) if args.sim else SimParams()
    cfg = GGpuConfig(num_cus=args.cus, data_channels=min(4, sp.channels))
    r = simulate(w, cfg, sp, seed=args.seed)
    print(f"kernel={w.name} cus={args.cus} cycles={r.cycles}")
    print(f"work_item_instructions={r.work_item_instructions}")
    print(f"mem_requests={r.mem_requests} miss_requests={r.miss_requests}")
    print(f"busy={' '.join(f'{b:.3f}' for b in r.per_cu_busy)}")
    print(f"channel_occupancy={' '.join(f'{o:.3f}' for o in r.channel_occupancy)}")
    print(f"wf_stall_cycles={r.wf_stall_cycles}")
    return 0


def _cmd_compare(args) -> int:
    bench_text = Path(args.benchmarks).read_text() if args.benchmarks else data_text("benchmarks.tsv")
    records = load_benchmarks(bench_text)
    if args.ppa:
        sections = parse_document(Path(args.ppa).read_text(), "cu-areas")
        areas = {}
        for sec in sections:
            if sec.name == "areas":
                for key, (raw, _line) in sec.entries.items():
                    areas[int(key.removeprefix("cu"))] = float(raw)
    else:
        rows = read_table1(data_text("table1.tsv"))
        areas = {r.cus: r.total_area_mm2 for r in rows if r.freq_mhz == 667}
    report = speedup_report(records, areas, args.riscv_area)
    doc = emit_report(report, args.format)
    if args.output:
        Path(args.output).write_text(doc)
    else:
        print(doc, end="")
    print(
        f"# max raw {report.max_raw.raw:.1f}x ({report.max_raw.kernel}, {report.max_raw.cus} CU); "
        f"min raw {report.min_raw.raw:.2f}x ({report.min_raw.kernel}, {report.min_raw.cus} CU)",
        file=sys.stderr,
    )
    return 0


def _cmd_calibrate(args) -> int:
    text = Path(args.table1).read_text() if args.table1 else data_text("table1.tsv")
    rows = read_table1(text)
    params, report = calibrate(rows)
    doc = write_tech_params(params)
    if args.output:
        Path(args.output).write_text(doc)
    else:
        print(doc, end="")
    print(f"# area slope {report.area_slope_per_cu:.3f} mm2/CU, intercept {report.area_intercept:.3f} mm2", file=sys.stderr)
    print(f"# dynamic slope {report.dynamic_slope_per_cu:.3f} W/CU", file=sys.stderr)
    print(f"# max relative residual {report.max_rel_error() * 100:.2f}%", file=sys.stderr)
    growth = area_growth_summary(rows)
    print(
        f"# avg area growth 500->590: {growth.avg_growth_590_pct:.2f}%  590->667: {growth.avg_growth_667_pct:.2f}%",
        file=sys.stderr,
    )
    return 0


def _cmd_enumerate(args) -> int:
    p = _load_tech(args.tech)
    cu_list = [int(c) for c in args.cus.split(",")]
    freq_list = [float(f) for f in args.freqs.split(",")]
    results = enumerate_candidates(cu_list, freq_list, p, wire_model=args.wire)
    targets = [(c, f) for c in sorted(cu_list) for f in sorted(freq_list)]
    print(summary_table(results, targets), end="")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ggpu", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="optimize a reference design to a frequency target")
    p.add_argument("--cus", type=int, required=True, choices=range(1, 9), metavar="N")
    p.add_argument("--target-mhz", type=float, required=True)
    p.add_argument("--wire", action="store_true", help="enable the floorplan wire-delay model")
    p.add_argument("--tech", help="tech params document ('fixtures' or a path)")
    p.add_argument("-o", "--output", help="write the optimized design document here")
    p.set_defaults(func=_cmd_plan)

    p = sub.add_parser("map", help="timing report and next-action recommendation")
    p.add_argument("--design", required=True)
    p.add_argument("--mem-delays", help="measured-delays document overriding model delays")
    p.add_argument("--target-mhz", type=float)
    p.add_argument("--tech")
    p.set_defaults(func=_cmd_map)

    p = sub.add_parser("simulate", help="run the SIMT performance simulator")
    p.add_argument("--kernel", required=True, help="workload document path or bundled kernel name")
    p.add_argument("--cus", type=int, required=True, choices=range(1, 9), metavar="N")
    p.add_argument("--sim", help="sim params document")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("compare", help="raw and area-derated speedup report")
    p.add_argument("--benchmarks", help="benchmark table (default: bundled)")
    p.add_argument("--ppa", help="cu-areas document (default: bundled 667 MHz areas)")
    p.add_argument("--riscv-area", type=float, default=RISCV_AREA_MM2)
    p.add_argument("--format", choices=("delimited", "structured"), default="delimited")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("calibrate", help="fit tech params against a characteristics table")
    p.add_argument("--table1", help="aggregate table (default: bundled)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("enumerate", help="evaluate a CU x frequency candidate grid")
    p.add_argument("--cus", required=True, help="comma-separated CU counts")
    p.add_argument("--freqs", required=True, help="comma-separated MHz targets")
    p.add_argument("--wire", action="store_true")
    p.add_argument("--tech")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("GGPU_PORT", "8000")))
    p.set_defaults(func=_cmd_serve)

    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except GgpuError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
