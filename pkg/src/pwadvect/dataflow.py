"""Analytic model of the pipelined accelerator kernel.

Pipeline fill/drain arithmetic, clock retiming, batched compute cycles and a
two-parameter SDRAM phase model (effective bandwidth + per-engine contention
on a shared controller), serialized with compute. Forms and calibration are
derived in docs/model-notes.md section 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import GridDims
from .kernel import FlopProfile


@dataclass(frozen=True)
class PipelineSpec:
    """Pipeline depth (cycles), initiation interval (cycles/element), clock."""

    depth: int
    ii: int
    clock_hz: float

    def __post_init__(self):
        if self.depth < 1 or self.ii < 1 or self.clock_hz <= 0:
            raise ValueError(f"invalid pipeline spec {self}")


@dataclass(frozen=True)
class MemoryModel:
    """External-memory phase parameters of the modeled kernel.

    arrays_per_xstep counts external plane moves per X step (3 field planes
    read + 3 source planes written by default; role multiplicities are folded
    into eff_bandwidth_1). contention is the multiplicative bandwidth
    derating per extra engine sharing one controller. burst_bytes and
    outstanding describe the port configuration; they are carried for
    reporting and do not enter the default timing formula.
    """

    eff_bandwidth_1: float
    contention: float = 1.0
    arrays_per_xstep: int = 6
    burst_bytes: int = 256 * 8
    outstanding: int = 8

    def __post_init__(self):
        if self.eff_bandwidth_1 <= 0 or not 0 < self.contention <= 1:
            raise ValueError(f"invalid memory model {self}")
        if self.arrays_per_xstep <= 0 or self.burst_bytes <= 0 or self.outstanding <= 0:
            raise ValueError(f"invalid memory model {self}")


@dataclass(frozen=True)
class CycleReport:
    total_cycles: int
    fill_cycles: int
    drain_cycles: int
    full_cycles: int
    utilization: float


def pipeline_cycles(spec: PipelineSpec, n_elements: int) -> CycleReport:
    """Cycles to stream n_elements through the pipeline, one run.

    total = depth + ii*n; the pipeline is counted fully utilised outside one
    fill and one drain interval: full = max(0, total - 2*depth).
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    total = spec.depth + spec.ii * n_elements
    full = max(0, total - 2 * spec.depth)
    return CycleReport(total, spec.depth, spec.depth, full, full / total)


def pipeline_latency(spec: PipelineSpec) -> float:
    """Seconds for one element to traverse the pipeline."""
    return spec.depth / spec.clock_hz


def kernel_compute_cycles(dims: GridDims, spec: PipelineSpec, y_batch: int) -> int:
    """Pipeline cycles over the grid, processed in Y batches of whole columns.

    Nominal accounting: every batch is charged at the full y_batch*nz element
    count (the functional kernel's inner trip count is nz-1; see notes).
    """
    if y_batch > dims.ny:
        raise ValueError(f"y_batch={y_batch} exceeds ny={dims.ny}")
    runs = dims.nx * math.ceil(dims.ny / y_batch)
    return runs * pipeline_cycles(spec, y_batch * dims.nz).total_cycles


def kernel_memory_bytes(dims: GridDims, mem: MemoryModel, y_batch: int) -> int:
    """External bytes moved by the memory phases of one kernel run."""
    return dims.nx * math.ceil(dims.ny / y_batch) * mem.arrays_per_xstep * (y_batch * dims.nz * 8)


def kernel_memory_seconds(dims: GridDims, mem: MemoryModel, y_batch: int,
                          engines_on_controller: int = 1) -> float:
    """Serialized SDRAM phase time for one engine's share of the grid."""
    bw = mem.eff_bandwidth_1 * mem.contention ** (engines_on_controller - 1)
    return kernel_memory_bytes(dims, mem, y_batch) / bw


def _engine_share(dims: GridDims, engines: int) -> GridDims:
    # widest slab dominates; ceil split as in schedules.partition_domain
    return GridDims(math.ceil(dims.nx / engines), dims.ny, dims.nz)


def kernel_time(dims: GridDims, spec: PipelineSpec, mem: MemoryModel,
                y_batch: int, engines: int = 1, controllers: int = 2) -> float:
    """Modeled wall seconds for the kernel phase (no host transfers).

    Engines are spread as evenly as possible over the memory controllers;
    the reported time is the slowest engine: widest X slab, most crowded
    controller group.
    """
    if engines < 1 or controllers < 1:
        raise ValueError("engines and controllers must be >= 1")
    share = _engine_share(dims, engines)
    group = math.ceil(engines / controllers)
    compute = kernel_compute_cycles(share, spec, y_batch) / spec.clock_hz
    return compute + kernel_memory_seconds(share, mem, y_batch, group)


def gflops(cells: float, profile: FlopProfile, seconds: float) -> float:
    """Accounted GFLOP/s: cells x per-cell credit / seconds."""
    if seconds <= 0:
        raise ValueError("seconds must be positive")
    return cells * profile.total_per_cell / seconds / 1e9


@dataclass(frozen=True)
class CalibrationResult:
    model: MemoryModel
    relative_residuals: tuple[float, ...]  # (modeled - observed)/observed per point


def calibrate(observations, spec: PipelineSpec, y_batch: int,
              controllers: int = 2, base: MemoryModel | None = None) -> CalibrationResult:
    """Fit (eff_bandwidth_1, contention) to observed kernel times.

    observations: iterable of (dims, engines, seconds). Each observation
    pins the memory-phase rate bw * contention^(g-1) once the modeled
    compute time is subtracted; the fit is least squares in log space
    (first-order relative error). Needs observations spanning at least two
    controller group sizes, otherwise the system is singular.
    """
    base = base or MemoryModel(eff_bandwidth_1=1.0)
    obs = list(observations)
    if len(obs) < 2:
        raise ValueError("need at least two observations")
    rows, rhs = [], []
    for dims, engines, seconds in obs:
        share = _engine_share(dims, engines)
        group = math.ceil(engines / controllers)
        mem_seconds = seconds - kernel_compute_cycles(share, spec, y_batch) / spec.clock_hz
        if mem_seconds <= 0:
            raise ValueError(
                f"observation {dims} x{engines} is faster than modeled compute alone")
        rate = kernel_memory_bytes(share, base, y_batch) / mem_seconds
        rows.append([1.0, group - 1])
        rhs.append(math.log(rate))
    a = np.array(rows)
    if np.linalg.matrix_rank(a) < 2:
        raise ValueError("degenerate observation set: controller group sizes coincide")
    (ln_bw, ln_c), *_ = np.linalg.lstsq(a, np.array(rhs), rcond=None)
    model = MemoryModel(eff_bandwidth_1=math.exp(ln_bw),
                        contention=min(1.0, math.exp(ln_c)),
                        arrays_per_xstep=base.arrays_per_xstep,
                        burst_bytes=base.burst_bytes,
                        outstanding=base.outstanding)
    residuals = []
    for dims, engines, seconds in obs:
        modeled = kernel_time(dims, spec, model, y_batch, engines, controllers)
        residuals.append((modeled - seconds) / seconds)
    return CalibrationResult(model, tuple(residuals))
