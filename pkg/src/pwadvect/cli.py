"""Command-line harness: bench, model, sweep, calibrate, validate.

Exit codes: 0 success, 1 validation or benchmark failure, 2 usage error.
Report files are CSV (frozen column order, header row) or JSON mirrors of
the same rows; reruns of one config differ only in timing fields and host
metadata. The PWADVECT_PARAMS environment variable supplies a default
parameter file; --params overrides it.
"""

from __future__ import annotations

import argparse
import csv
import json
import platform
import statistics
import sys
from pathlib import Path

import numpy as np

from .dataflow import PipelineSpec, calibrate, kernel_time, pipeline_cycles, pipeline_latency
from .grid import GeneratorSpec, checksum, fill_fields, make_grid
from .kernel import default_coefficients
from .params import ModelParams, ParamError, dump_params, load_params
from .refdata import DATA_SOURCE, DMA_TABLE, GRID_LADDER, GRID_LARGEST, GRID_STRATUS, HEADLINE
from .schedules import ScheduleSpec, run_schedule
from .transfer import dma_time, end_to_end, factor_cells, transfer_volume

MODEL_COLUMNS = ("cells", "nx", "ny", "nz", "engines", "kernel_seconds", "dma_seconds",
                 "total_seconds", "gflops_kernel", "gflops_total", "dma_fraction")
BENCH_COLUMNS = ("schedule", "engines", "y_batch", "nx", "ny", "nz", "reps",
                 "wall_min_s", "wall_mean_s", "wall_all_s",
                 "checksum_su", "checksum_sv", "checksum_sw",
                 "external_reads", "external_writes", "local_reads", "local_writes",
                 "scratch_bytes_peak", "host")

_SCHEDULE_NAMES = {
    "reference": "reference",
    "columnbuffered": "column_buffered",
    "ybatched": "y_batched",
    "xreordered": "x_reordered",
}


def _canon_schedule(name: str) -> str:
    key = name.lower().replace("-", "").replace("_", "")
    if key not in _SCHEDULE_NAMES:
        raise argparse.ArgumentTypeError(
            f"unknown schedule {name!r}; choose from {sorted(_SCHEDULE_NAMES)}")
    return _SCHEDULE_NAMES[key]


def _parse_grid(text: str):
    try:
        nx, ny, nz = (int(part) for part in text.lower().split("x"))
        return make_grid(nx, ny, nz)
    except Exception as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r} (want NXxNYxNZ): {exc}")


def _resolve_dims(args, parser):
    if getattr(args, "grid", None) is not None and getattr(args, "cells", None) is not None:
        parser.error("give either --grid or --cells, not both")
    if getattr(args, "grid", None) is not None:
        return args.grid
    if getattr(args, "cells", None) is not None:
        return factor_cells(args.cells)
    parser.error("one of --grid or --cells is required")


def _host_description() -> str:
    return f"{platform.platform()} python{platform.python_version()} numpy{np.__version__}"


def _write_rows(rows, columns, out: str | None, fmt: str) -> None:
    if out is None:
        widths = {c: max(len(c), *(len(_cell(r.get(c))) for r in rows)) for c in columns}
        print("  ".join(c.ljust(widths[c]) for c in columns))
        for r in rows:
            print("  ".join(_cell(r.get(c)).ljust(widths[c]) for c in columns))
        return
    path = Path(out)
    if fmt == "json":
        path.write_text(json.dumps([{c: r.get(c) for c in columns} for r in rows], indent=2) + "\n")
    else:
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for r in rows:
                writer.writerow([_cell(r.get(c)) for c in columns])
    print(f"wrote {len(rows)} row(s) to {path} ({fmt})")


def _cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return "" if value is None else str(value)


def _load(args, parser) -> ModelParams:
    try:
        return load_params(getattr(args, "params", None))
    except (ParamError, OSError) as exc:
        parser.error(str(exc))


def _model_row(report, dims) -> dict:
    row = report.as_row()
    row.update(nx=dims.nx, ny=dims.ny, nz=dims.nz)
    return row


def _zero_model_row() -> dict:
    return {c: 0 for c in MODEL_COLUMNS}


# -- bench -------------------------------------------------------------------

def cmd_bench(args, parser) -> int:
    dims = _resolve_dims(args, parser)
    gen = {"uniform": GeneratorSpec.uniform(1.0, 1.1, 0.9),
           "trig": GeneratorSpec.trig(),
           "random": GeneratorSpec.random(args.seed)}[args.gen]
    fields = fill_fields(dims, gen)
    coeffs = default_coefficients(dims.nz)
    rows, failures = [], []
    host = _host_description()
    for variant in args.schedule:
        spec = ScheduleSpec(variant, y_batch=min(args.y_batch, dims.ny), engines=args.engines)
        try:
            spec.validate(dims)
        except ValueError as exc:
            parser.error(str(exc))
        walls, sums, traffic = [], None, None
        for _ in range(args.reps):
            out, tc, wall = run_schedule(fields, coeffs, spec)
            walls.append(wall)
            digest = (checksum(out.su), checksum(out.sv), checksum(out.sw))
            if sums is None:
                sums, traffic = digest, tc
            elif sums != digest:
                failures.append(f"{variant}: checksum changed between repetitions")
            elif traffic != tc:
                failures.append(f"{variant}: traffic counters changed between repetitions")
        rows.append({
            "schedule": variant, "engines": spec.engines, "y_batch": spec.y_batch,
            "nx": dims.nx, "ny": dims.ny, "nz": dims.nz, "reps": args.reps,
            "wall_min_s": min(walls), "wall_mean_s": statistics.fmean(walls),
            "wall_all_s": ";".join(f"{w:.6g}" for w in walls),
            "checksum_su": sums[0], "checksum_sv": sums[1], "checksum_sw": sums[2],
            "external_reads": traffic.external_reads,
            "external_writes": traffic.external_writes,
            "local_reads": traffic.local_reads, "local_writes": traffic.local_writes,
            "scratch_bytes_peak": traffic.scratch_bytes_peak, "host": host,
        })
    digests = {(r["checksum_su"], r["checksum_sv"], r["checksum_sw"]) for r in rows}
    if len(digests) > 1:
        failures.append("schedules disagree on output checksums")
    _write_rows(rows, BENCH_COLUMNS, args.out, args.format)
    for msg in failures:
        print(f"FAIL {msg}", file=sys.stderr)
    return 1 if failures else 0


# -- model / sweep -----------------------------------------------------------

def cmd_model(args, parser) -> int:
    p = _load(args, parser)
    if args.cells == 0:
        _write_rows([_zero_model_row()], MODEL_COLUMNS, args.out, args.format)
        return 0
    dims = _resolve_dims(args, parser)
    report = end_to_end(dims, args.engines, p.pipeline, p.memory, p.dma,
                        p.y_batch, p.flops, p.controllers)
    _write_rows([_model_row(report, dims)], MODEL_COLUMNS, args.out, args.format)
    return 0


def _parse_int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _parse_float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def cmd_sweep(args, parser) -> int:
    p = _load(args, parser)
    rows = []
    if args.cells_list:
        for cells in args.cells_list:
            dims = factor_cells(cells)
            report = end_to_end(dims, args.engines[0], p.pipeline, p.memory, p.dma,
                                p.y_batch, p.flops, p.controllers)
            rows.append(_model_row(report, dims))
    else:
        dims = _resolve_dims(args, parser)
        for engines in args.engines:
            report = end_to_end(dims, engines, p.pipeline, p.memory, p.dma,
                                p.y_batch, p.flops, p.controllers)
            rows.append(_model_row(report, dims))
    if not rows:
        parser.error("empty sweep")
    _write_rows(rows, MODEL_COLUMNS, args.out, args.format)
    return 0


# -- calibrate ----------------------------------------------------------------

def _builtin_observations():
    t_large = GRID_LARGEST.cells * 53 / (HEADLINE["gflops_kernel"].value * 1e9)
    return [
        (GRID_LADDER, 1, HEADLINE["ladder_final_ms"].value / 1e3),
        (GRID_LARGEST, 12, t_large),
    ]


def cmd_calibrate(args, parser) -> int:
    p = _load(args, parser)
    if args.obs:
        try:
            raw = json.loads(Path(args.obs).read_text())
            observations = [(_parse_grid(o["grid"]), int(o["engines"]), float(o["seconds"]))
                            for o in raw]
        except (OSError, ValueError, KeyError) as exc:
            parser.error(f"bad observations file {args.obs}: {exc}")
    else:
        observations = _builtin_observations()
    try:
        result = calibrate(observations, p.pipeline, p.y_batch, p.controllers, base=p.memory)
    except ValueError as exc:
        print(f"calibration failed: {exc}", file=sys.stderr)
        return 1
    print(f"eff_bandwidth_1 = {result.model.eff_bandwidth_1!r}")
    print(f"contention      = {result.model.contention!r}")
    for (dims, engines, seconds), resid in zip(observations, result.relative_residuals):
        print(f"  obs {dims.nx}x{dims.ny}x{dims.nz} engines={engines} "
              f"observed={seconds:.6g}s residual={resid:+.3e}")
    if args.out:
        fitted = ModelParams(pipeline=p.pipeline, memory=result.model, dma=p.dma,
                             flops=p.flops, ref=p.ref, y_batch=p.y_batch,
                             controllers=p.controllers)
        Path(args.out).write_text(dump_params(fitted))
        print(f"wrote fitted parameters to {args.out}")
    return 0


# -- validate ------------------------------------------------------------------

def _validation_checks(p: ModelParams):
    """Yields (name, ok, detail, citation) for every published-anchor identity."""
    ref = p.ref
    base = PipelineSpec(ref.column_depth, ref.column_ii, ref.base_clock_hz)
    col = pipeline_cycles(base, ref.column_length)
    cite = HEADLINE["column_run_total_cycles"].citation
    yield ("pipeline per-column run: 199 total / 57 full cycles",
           (col.total_cycles, col.full_cycles) == (199, 57),
           f"got {col.total_cycles}/{col.full_cycles}", cite)
    yield ("pipeline per-column utilisation: 28.6% +/- 0.5",
           abs(col.utilization * 100 - 28.6) <= 0.5, f"got {col.utilization:.2%}",
           HEADLINE["column_run_utilization"].citation)
    batched = pipeline_cycles(PipelineSpec(ref.column_depth, ref.batched_ii, ref.base_clock_hz),
                              ref.batch_elements)
    yield ("pipeline batched run: 4167 total cycles",
           batched.total_cycles == 4167, f"got {batched.total_cycles}",
           HEADLINE["batched_run_total_cycles"].citation)
    yield ("pipeline batched utilisation: 96.6% +/- 0.5",
           abs(batched.utilization * 100 - 96.6) <= 0.5, f"got {batched.utilization:.2%}",
           HEADLINE["batched_run_utilization"].citation)
    lat_a = pipeline_latency(PipelineSpec(ref.extracted_depth, 1, ref.base_clock_hz))
    yield ("latency 65 stages at 4 ns == 2.6e-7 s", lat_a == 2.6e-7, f"got {lat_a!r}",
           HEADLINE["latency_extracted"].citation)
    lat_b = pipeline_latency(PipelineSpec(ref.retimed_depth, 1, ref.retimed_latency_clock_hz))
    yield ("latency 72 stages at 3.2 ns == 2.304e-7 s", lat_b == 2.304e-7, f"got {lat_b!r}",
           HEADLINE["latency_retimed"].citation)

    vol2 = transfer_volume(GRID_LARGEST, "both")
    ref_vol = HEADLINE["volume_both_gb"]
    yield ("round-trip volume at 268.3M cells: 12.88 GB +/- 1%",
           abs(vol2 - ref_vol.value) <= ref_vol.rel_tol * ref_vol.value,
           f"got {vol2/1e9:.4g} GB", ref_vol.citation)
    vol1 = transfer_volume(GRID_LARGEST, "to_card")
    ref_vol1 = HEADLINE["volume_one_way_gb"]
    yield ("one-way volume at 268.3M cells: 6.44 GB +/- 1%",
           abs(vol1 - ref_vol1.value) <= ref_vol1.rel_tol * ref_vol1.value,
           f"got {vol1/1e9:.4g} GB", ref_vol1.citation)
    t_dma = dma_time(12.88e9, p.dma, "end_to_end")
    yield ("12.88 GB at end-to-end rate: 2.2 s +/- 2%",
           abs(t_dma - 2.2) <= 0.02 * 2.2, f"got {t_dma:.4g} s",
           HEADLINE["dma_round_trip_seconds"].citation)

    for topo, ref_row in DMA_TABLE.items():
        t = dma_time(1.6e9, p.dma, topo)
        yield (f"DMA 1.6 GB, {topo}: {ref_row.value * 1e3:.0f} ms exactly",
               t == ref_row.value, f"got {t!r}", ref_row.citation)

    t_ladder = kernel_time(GRID_LADDER, p.pipeline, p.memory, p.y_batch, 1, p.controllers)
    yield ("kernel time 512x512x64, one engine: 514.9 ms +/- 5%",
           abs(t_ladder - 0.5149) <= 0.05 * 0.5149, f"got {t_ladder * 1e3:.1f} ms",
           HEADLINE["ladder_final_ms"].citation)
    rep = end_to_end(GRID_LARGEST, 12, p.pipeline, p.memory, p.dma,
                     p.y_batch, p.flops, p.controllers)
    yield ("kernel GFLOP/s at 268.3M cells, 12 engines: 14.36 +/- 5%",
           abs(rep.gflops_kernel - 14.36) <= 0.05 * 14.36, f"got {rep.gflops_kernel:.2f}",
           HEADLINE["gflops_kernel"].citation)
    yield ("total GFLOP/s at 268.3M cells, 12 engines: 4.2 +/- 10%",
           abs(rep.gflops_total - 4.2) <= 0.10 * 4.2, f"got {rep.gflops_total:.2f}",
           HEADLINE["gflops_total"].citation)

    fractions = [end_to_end(GRID_STRATUS, e, p.pipeline, p.memory, p.dma,
                            p.y_batch, p.flops, p.controllers).dma_fraction
                 for e in range(1, 13)]
    yield ("DMA fraction at 67M cells, 12 engines: >= 0.65",
           fractions[-1] >= 0.65, f"got {fractions[-1]:.3f}",
           HEADLINE["dma_fraction_12"].citation)
    monotone = all(a <= b + 1e-15 for a, b in zip(fractions, fractions[1:]))
    yield ("DMA fraction non-decreasing over engines 1..12",
           monotone, f"got {', '.join(f'{f:.3f}' for f in fractions)}",
           HEADLINE["dma_fraction_12"].citation)


def cmd_validate(args, parser) -> int:
    p = _load(args, parser)
    print(f"validating against: {DATA_SOURCE}")
    failures = 0
    for name, ok, detail, citation in _validation_checks(p):
        print(f"{'PASS' if ok else 'FAIL'}  {name}  [{detail}]  <{citation}>")
        failures += 0 if ok else 1
    if failures:
        print(f"FAILED: {failures} failing check(s)")
        return 1
    print("OK: all checks passed")
    return 0


# -- parser ---------------------------------------------------------------------

def _add_common_model_args(sub):
    sub.add_argument("--params", metavar="FILE", help="parameter file (see model-defaults.params)")
    sub.add_argument("--out", metavar="FILE", help="write report rows to FILE")
    sub.add_argument("--format", choices=("csv", "json"), default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pwadvect", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    subs = parser.add_subparsers(dest="command", required=True)

    bench = subs.add_parser("bench", help="run schedules on the host and report timings/traffic")
    bench.add_argument("--grid", type=_parse_grid, metavar="NXxNYxNZ")
    bench.add_argument("--cells", type=float, help="cell count; cube-ish grid is derived")
    bench.add_argument("--schedule", action="append", type=_canon_schedule,
                       metavar="NAME", help="repeatable; default reference")
    bench.add_argument("--engines", type=int, default=1)
    bench.add_argument("--y-batch", type=int, default=64, dest="y_batch")
    bench.add_argument("--gen", choices=("uniform", "trig", "random"), default="random")
    bench.add_argument("--seed", type=int, default=42)
    bench.add_argument("--reps", type=int, default=5)
    _add_common_model_args(bench)
    bench.set_defaults(func=cmd_bench)

    model = subs.add_parser("model", help="predict kernel/DMA/total time for one configuration")
    model.add_argument("--grid", type=_parse_grid, metavar="NXxNYxNZ")
    model.add_argument("--cells", type=float)
    model.add_argument("--engines", type=int, default=1)
    _add_common_model_args(model)
    model.set_defaults(func=cmd_model)

    sweep = subs.add_parser("sweep", help="model a sweep over engine counts or grid sizes")
    sweep.add_argument("--grid", type=_parse_grid, metavar="NXxNYxNZ")
    sweep.add_argument("--cells", type=float)
    sweep.add_argument("--engines", type=_parse_int_list, default=[1],
                       metavar="E1,E2,...", help="engine counts")
    sweep.add_argument("--cells-list", type=_parse_float_list, dest="cells_list",
                       metavar="N1,N2,...", help="grid-size sweep (overrides --engines)")
    _add_common_model_args(sweep)
    sweep.set_defaults(func=cmd_sweep)

    cal = subs.add_parser("calibrate", help="fit bandwidth/contention to observed kernel times")
    cal.add_argument("--obs", metavar="FILE",
                     help='JSON [{"grid": "512x512x64", "engines": 1, "seconds": 0.51}, ...];'
                          " default: built-in published anchors")
    _add_common_model_args(cal)
    cal.set_defaults(func=cmd_calibrate)

    val = subs.add_parser("validate", help="check every published-anchor identity; exit 0 iff all hold")
    val.add_argument("--params", metavar="FILE")
    val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "schedule", "missing") is None:
        args.schedule = ["reference"]
    if getattr(args, "reps", 1) < 1:
        parser.error("--reps must be >= 1")
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
