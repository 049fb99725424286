"""Host <-> card transfer volumes, DMA timing, and end-to-end composition.

Volumes are computed from interior cells (3 fields x 8 bytes each way) in
decimal GB. DMA rates carry two calibrations: per-topology bandwidths
anchored at a 1.6 GB microbenchmark, and a single end-to-end rate for whole
round trips. Kernel and transfer phases are serialized (no overlap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .grid import GridDims
from .kernel import FlopProfile
from .dataflow import MemoryModel, PipelineSpec, gflops, kernel_time

# Interconnect wiring options of the measured card, with the measured DMA
# times (seconds) for a 1.6 GB host-to-card copy.
DMA_REFERENCE_BYTES = 1.6e9
DMA_REFERENCE_SECONDS = {
    "split_banks_4ch": 0.232,          # two separate banks, 2 DMA channels each
    "one_controller_4ch": 0.280,       # all four channels into one controller
    "connected_controllers_4ch": 0.239,  # both banks behind one interconnect
    "one_ch_per_controller": 0.342,    # single DMA channel per controller
}
TOPOLOGIES = tuple(DMA_REFERENCE_SECONDS)
END_TO_END_BANDWIDTH = 5.85e9  # bytes/s, decimal GB convention

_DIRECTIONS = ("to_card", "from_card", "both")


def _default_calibration() -> dict[str, float]:
    return {t: DMA_REFERENCE_BYTES / s for t, s in DMA_REFERENCE_SECONDS.items()}


@dataclass(frozen=True)
class DmaConfig:
    """Effective bytes/s per wiring topology plus the end-to-end rate."""

    calibration: dict[str, float] = field(default_factory=_default_calibration)
    end_to_end_bandwidth: float = END_TO_END_BANDWIDTH

    def __post_init__(self):
        missing = [t for t in TOPOLOGIES if t not in self.calibration]
        if missing:
            raise ValueError(f"calibration missing topologies {missing}")
        if any(bw <= 0 for bw in self.calibration.values()) or self.end_to_end_bandwidth <= 0:
            raise ValueError("bandwidths must be positive")


def transfer_volume(dims: GridDims, direction: str = "both") -> int:
    """Bytes moved between host and card for one kernel invocation."""
    if direction not in _DIRECTIONS:
        raise ValueError(f"direction must be one of {_DIRECTIONS}")
    one_way = 3 * dims.cells * 8
    return 2 * one_way if direction == "both" else one_way


def dma_time(nbytes: float, config: DmaConfig, topology: str = "split_banks_4ch") -> float:
    """Seconds to move nbytes; topology may also be "end_to_end"."""
    if nbytes < 0:
        raise ValueError("byte count must be >= 0")
    if topology == "end_to_end":
        return nbytes / config.end_to_end_bandwidth
    if topology not in config.calibration:
        raise ValueError(f"unknown topology {topology!r}; one of {TOPOLOGIES}")
    return nbytes / config.calibration[topology]


@dataclass(frozen=True)
class ModelReport:
    """Predicted breakdown of one offloaded kernel invocation."""

    cells: int
    engines: int
    kernel_seconds: float
    dma_seconds: float
    total_seconds: float
    gflops_kernel: float
    gflops_total: float
    dma_fraction: float

    FIELDS = ("cells", "engines", "kernel_seconds", "dma_seconds", "total_seconds",
              "gflops_kernel", "gflops_total", "dma_fraction")

    def as_row(self) -> dict:
        return {name: getattr(self, name) for name in self.FIELDS}


def end_to_end(dims: GridDims, engines: int, pipeline: PipelineSpec,
               mem: MemoryModel, dma: DmaConfig, y_batch: int = 64,
               profile: FlopProfile = FlopProfile(), controllers: int = 2) -> ModelReport:
    """Compose kernel-time and DMA models into one predicted breakdown."""
    kern = kernel_time(dims, pipeline, mem, y_batch, engines, controllers)
    xfer = dma_time(transfer_volume(dims, "both"), dma, "end_to_end")
    total = kern + xfer
    return ModelReport(
        cells=dims.cells,
        engines=engines,
        kernel_seconds=kern,
        dma_seconds=xfer,
        total_seconds=total,
        gflops_kernel=gflops(dims.cells, profile, kern),
        gflops_total=gflops(dims.cells, profile, total),
        dma_fraction=xfer / total,
    )


def scaling_table(dims: GridDims, engine_list, pipeline: PipelineSpec,
                  mem: MemoryModel, dma: DmaConfig, y_batch: int = 64,
                  profile: FlopProfile = FlopProfile(),
                  controllers: int = 2) -> list[ModelReport]:
    """One ModelReport per engine count; DMA time is constant across rows."""
    engine_list = list(engine_list)
    if not engine_list:
        raise ValueError("engine list must be non-empty")
    return [end_to_end(dims, e, pipeline, mem, dma, y_batch, profile, controllers)
            for e in engine_list]


def factor_cells(cells: float, nz: int = 64) -> GridDims:
    """Cube-ish dims for a requested cell count: fixed nz, ny a power of two
    near sqrt(cells/nz), nx rounded to match. Used by the --cells CLI flag."""
    if cells < nz:
        raise ValueError(f"cell count {cells} below one column of nz={nz}")
    columns = cells / nz
    ny = 2 ** round(math.log2(math.sqrt(columns)))
    nx = max(1, round(columns / ny))
    return GridDims(nx, ny, nz)
