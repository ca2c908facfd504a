"""Core domain types for the consolidation engine.

A data-intensive workload is characterized by its file size (FS, the
block-sized chunk it operates on) and its request size (RS, bytes moved
per file operation). Servers are described by the cache hierarchy that
bounds consolidation: last-level cache, system file cache, and disk
cache. Mutual throughput degradation between workload configurations is
recorded in a pairwise lookup table over the canonical (RS, FS) profiling
grid, and `PlacementState` tracks which workloads live on which server.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

from .errors import (
    DuplicateWorkload,
    MalformedTable,
    NonPositiveRuntime,
    NonPositiveSize,
    OffGridValue,
    RequestLargerThanFile,
    UnknownWorkload,
    ValidationError,
)
from .units import KB, format_size

if TYPE_CHECKING:
    from .throughput import ThroughputParams

# Canonical profiling grid: request sizes double from 1KB to 512KB,
# file sizes double from 1KB for 23 steps (up to 4GB). 230 grid points,
# 230 x 230 = 52,900 ordered pairs in a full degradation table.
RS_GRID: tuple[int, ...] = tuple(KB << k for k in range(10))
FS_GRID: tuple[int, ...] = tuple(KB << k for k in range(23))
TABLE_ENTRY_COUNT = (len(RS_GRID) * len(FS_GRID)) ** 2

# Degradation fractions live in [0, 1); raw sums at or above 1 are
# clamped here and flagged (see degradation module).
DEGRADATION_CLAMP = 0.999


class Operation(Enum):
    READ = "read"
    WRITE = "write"


def grid_index(value: int, grid: Sequence[int], *, snap: bool = False) -> int:
    """Index of `value` in `grid`, optionally snapping to the nearest
    point in log-space (ties and out-of-range values snap toward the
    larger / nearer end)."""
    if value <= 0:
        raise NonPositiveSize(f"size must be >= 1 byte, got {value}")
    grid = tuple(grid)
    if value in grid:
        return grid.index(value)
    if not snap:
        raise OffGridValue(f"{format_size(value)} is not on the profiling grid")
    if value <= grid[0]:
        return 0
    if value >= grid[-1]:
        return len(grid) - 1
    # grid is a doubling sequence, so log-space distance decides.
    target = math.log2(value)
    best = min(range(len(grid)), key=lambda k: (abs(target - math.log2(grid[k])), -k))
    return best


def snap_to_grid(value: int, grid: Sequence[int]) -> int:
    """Nearest grid point to `value` in log-space."""
    return grid[grid_index(value, grid, snap=True)]


@dataclass(frozen=True)
class WorkloadSpec:
    """One data-intensive workload.

    `request_size` and `file_size` are exact byte counts; they do not
    have to lie on the profiling grid (degradation-table lookups resolve
    them to grid points separately). `base_runtime` is the solo running
    time in seconds, when known.
    """

    id: str
    request_size: int
    file_size: int
    operation: Operation = Operation.WRITE
    base_runtime: float | None = None

    def __post_init__(self) -> None:
        if self.request_size < 1 or self.file_size < 1:
            raise NonPositiveSize(
                f"workload {self.id!r}: sizes must be >= 1 byte "
                f"(rs={self.request_size}, fs={self.file_size})"
            )
        if self.request_size > self.file_size:
            raise RequestLargerThanFile(
                f"workload {self.id!r}: rs={self.request_size} exceeds fs={self.file_size}"
            )
        if self.base_runtime is not None and not self.base_runtime > 0:
            raise NonPositiveRuntime(
                f"workload {self.id!r}: base_runtime must be > 0, got {self.base_runtime}"
            )

    def snapped(self, *, rs_grid: Sequence[int] = RS_GRID, fs_grid: Sequence[int] = FS_GRID) -> "WorkloadSpec":
        """Copy of this workload with (rs, fs) snapped to the grid."""
        rs = snap_to_grid(self.request_size, rs_grid)
        fs = snap_to_grid(self.file_size, fs_grid)
        if fs < rs:  # snapping can invert tiny rs<=fs gaps; keep the invariant
            fs = rs
        if rs == self.request_size and fs == self.file_size:
            return self
        return WorkloadSpec(self.id, rs, fs, self.operation, self.base_runtime)


class DegradationTable:
    """Pairwise degradation lookup D(i, j) on the canonical grid.

    `values[rs_i, fs_i, rs_j, fs_j]` is the fractional throughput
    degradation workload configuration i inflicts on a co-resident j.
    Entries are ordered pairs (no symmetry assumed), lie in [0, 1), and
    are non-decreasing along every grid axis. Lookups key on the (rs, fs)
    pair of each side only; read and write workloads share one table.
    """

    def __init__(self, values: np.ndarray, llc_size: int | None = None, *, validate: bool = True):
        values = np.asarray(values, dtype=float)
        self.rs_grid = RS_GRID
        self.fs_grid = FS_GRID
        self.values = values
        self.llc_size = llc_size
        if validate:
            self.validate()
        self.values.setflags(write=False)
        self._hash = hash((self.llc_size, self.values.tobytes()))

    def validate(self) -> None:
        shape = (len(RS_GRID), len(FS_GRID), len(RS_GRID), len(FS_GRID))
        if self.values.shape != shape:
            raise MalformedTable(f"expected table shape {shape}, got {self.values.shape}")
        if not np.isfinite(self.values).all():
            raise MalformedTable("table contains non-finite entries")
        if (self.values < 0.0).any() or (self.values >= 1.0).any():
            raise MalformedTable("table entries must lie in [0, 1)")
        for axis in range(4):
            if (np.diff(self.values, axis=axis) < 0).any():
                raise MalformedTable(f"table entries decrease along axis {axis}")

    def entry(self, rs_i: int, fs_i: int, rs_j: int, fs_j: int) -> float:
        """Exact-grid lookup by byte sizes."""
        return float(
            self.values[
                grid_index(rs_i, RS_GRID),
                grid_index(fs_i, FS_GRID),
                grid_index(rs_j, RS_GRID),
                grid_index(fs_j, FS_GRID),
            ]
        )

    def lookup(self, aggressor: WorkloadSpec, victim: WorkloadSpec, *, snap: bool = True) -> float:
        """D(aggressor, victim); off-grid sizes snap when `snap` is true."""
        return float(
            self.values[
                grid_index(aggressor.request_size, RS_GRID, snap=snap),
                grid_index(aggressor.file_size, FS_GRID, snap=snap),
                grid_index(victim.request_size, RS_GRID, snap=snap),
                grid_index(victim.file_size, FS_GRID, snap=snap),
            ]
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DegradationTable):
            return NotImplemented
        return self.llc_size == other.llc_size and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return (
            f"DegradationTable(llc_size={self.llc_size}, "
            f"min={self.values.min():.6f}, max={self.values.max():.6f})"
        )


@dataclass(frozen=True)
class ServerProfile:
    """A physical server's consolidation-relevant parameters.

    `alpha` scales the LLC capacity in the cache-side feasibility check
    (how far the cache may be overcommitted before throughput collapses).
    The degradation table holds the server's profiled pairwise D(i, j).
    """

    id: str
    llc_size: int
    system_file_cache: int
    disk_cache: int
    alpha: float = 1.0
    degradation_table: DegradationTable | None = None
    throughput_params: "ThroughputParams | None" = None

    def __post_init__(self) -> None:
        if self.llc_size <= 0 or self.system_file_cache <= 0 or self.disk_cache <= 0:
            raise ValidationError(f"server {self.id!r}: cache sizes must be positive")
        if not self.alpha >= 1.0:
            raise ValidationError(f"server {self.id!r}: alpha must be >= 1.0, got {self.alpha}")

    @property
    def cache_budget(self) -> float:
        """alpha * llc_size, the competing-data capacity of the cache dimension."""
        return self.alpha * self.llc_size

    @property
    def buffer_sum(self) -> int:
        """system_file_cache + disk_cache, the write model's last boundary."""
        return self.system_file_cache + self.disk_cache

    def table(self) -> DegradationTable:
        if self.degradation_table is None:
            raise ValidationError(f"server {self.id!r} has no degradation table attached")
        return self.degradation_table


def validate(spec: WorkloadSpec, profile: ServerProfile, *, snap: bool = False) -> WorkloadSpec:
    """Check a workload against the type invariants and the profiling grid.

    Returns the (possibly snapped) workload. With `snap=False` the sizes
    must lie exactly on the grid; otherwise they are snapped to the
    nearest grid point in log-space.
    """
    # Type invariants are enforced at construction; re-assert cheaply so
    # callers can validate specs built elsewhere.
    WorkloadSpec(spec.id, spec.request_size, spec.file_size, spec.operation, spec.base_runtime)
    _ = profile.cache_budget
    if snap:
        return spec.snapped()
    grid_index(spec.request_size, RS_GRID, snap=False)
    grid_index(spec.file_size, FS_GRID, snap=False)
    return spec


class PlacementState:
    """Mutable placement of workloads onto a fixed set of servers.

    Single-writer: the allocator mutates it sequentially. A workload id
    is resident on at most one server and never both resident and queued.
    """

    def __init__(self, servers: Sequence[ServerProfile]):
        ids = [s.id for s in servers]
        if len(set(ids)) != len(ids):
            raise ValidationError(f"duplicate server ids: {ids}")
        self.servers: tuple[ServerProfile, ...] = tuple(servers)
        self.resident: dict[str, list[WorkloadSpec]] = {s.id: [] for s in servers}
        self.queue: list[WorkloadSpec] = []

    def server(self, server_id: str) -> ServerProfile:
        for s in self.servers:
            if s.id == server_id:
                return s
        raise KeyError(server_id)

    def workload_ids(self) -> set[str]:
        ids = {w.id for ws in self.resident.values() for w in ws}
        ids.update(w.id for w in self.queue)
        return ids

    def locate(self, workload_id: str) -> str | None:
        """Server id hosting the workload, or None if absent/queued."""
        for sid, ws in self.resident.items():
            if any(w.id == workload_id for w in ws):
                return sid
        return None

    def place(self, workload: WorkloadSpec, server_id: str) -> None:
        if workload.id in self.workload_ids():
            raise DuplicateWorkload(f"workload {workload.id!r} is already resident or queued")
        self.resident[server_id].append(workload)

    def enqueue(self, workload: WorkloadSpec) -> None:
        if workload.id in self.workload_ids():
            raise DuplicateWorkload(f"workload {workload.id!r} is already resident or queued")
        self.queue.append(workload)

    def remove(self, workload_id: str) -> WorkloadSpec:
        sid = self.locate(workload_id)
        if sid is None:
            raise UnknownWorkload(f"workload {workload_id!r} is not resident on any server")
        ws = self.resident[sid]
        for k, w in enumerate(ws):
            if w.id == workload_id:
                return ws.pop(k)
        raise UnknownWorkload(workload_id)  # unreachable

    def clone(self) -> "PlacementState":
        other = PlacementState(self.servers)
        other.resident = {sid: list(ws) for sid, ws in self.resident.items()}
        other.queue = list(self.queue)
        return other


def ensure_unique_ids(workloads: Iterable[WorkloadSpec]) -> None:
    seen: set[str] = set()
    for w in workloads:
        if w.id in seen:
            raise DuplicateWorkload(f"duplicate workload id {w.id!r}")
        seen.add(w.id)
