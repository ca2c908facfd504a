"""Single-workload throughput model.

Plateau structure: throughput sits on one of up to three levels selected
by where the file size lands in the cache hierarchy (fits in LLC, fits
in file cache + disk cache, or spills to actual disk I/O; the last level
is observable only for writes). Within a level, throughput grows with
request size as a power law, since fewer and larger requests amortize
per-operation overhead.

The default parameters are synthetic: they preserve the level ordering
and monotonicities the placement algorithms rely on, not any measured
MB/s surface. Ship your own `ThroughputParams` to model real hardware.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from enum import Enum
from importlib import resources

from .errors import ValidationError
from .model import Operation, ServerProfile, WorkloadSpec


class ThroughputLevel(Enum):
    CACHE_FIT = "cache_fit"      # fs <= llc_size
    BUFFER_FIT = "buffer_fit"    # llc_size < fs <= file cache + disk cache (and all larger reads)
    DISK_BOUND = "disk_bound"    # writes with fs above the buffer sum


@dataclass(frozen=True)
class ThroughputParams:
    """Plateau bases (MB/s) plus the request-size power law.

    `levelN_base` apply at rs = rs_reference; levels must be strictly
    ordered level1 > level2 > level3 > 0 so throughput never increases
    with file size.
    """

    level1_base: float
    level2_base: float
    level3_base: float
    rs_exponent: float
    rs_reference: int

    def __post_init__(self) -> None:
        if not (self.level1_base > self.level2_base > self.level3_base > 0):
            raise ValidationError(
                "throughput levels must satisfy level1 > level2 > level3 > 0"
            )
        if not (0 < self.rs_exponent <= 1):
            raise ValidationError("rs_exponent must lie in (0, 1]")
        if self.rs_reference < 1:
            raise ValidationError("rs_reference must be a positive byte count")

    def base(self, level: ThroughputLevel) -> float:
        return {
            ThroughputLevel.CACHE_FIT: self.level1_base,
            ThroughputLevel.BUFFER_FIT: self.level2_base,
            ThroughputLevel.DISK_BOUND: self.level3_base,
        }[level]

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ThroughputParams":
        return cls(
            level1_base=float(data["level1_base"]),
            level2_base=float(data["level2_base"]),
            level3_base=float(data["level3_base"]),
            rs_exponent=float(data["rs_exponent"]),
            rs_reference=int(data["rs_reference"]),
        )


def default_params() -> ThroughputParams:
    """Packaged synthetic defaults (see data/throughput_defaults.json)."""
    raw = resources.files("cachepack").joinpath("data/throughput_defaults.json").read_text()
    return ThroughputParams.from_dict(json.loads(raw))


def throughput_level(spec: WorkloadSpec, profile: ServerProfile) -> ThroughputLevel:
    """Which plateau a workload's file size lands on for this server.

    Reads never report the disk-bound level: their observed surface has
    only two plateaus, so large-file reads stay on the buffer level.
    """
    if spec.file_size <= profile.llc_size:
        return ThroughputLevel.CACHE_FIT
    if spec.file_size <= profile.buffer_sum:
        return ThroughputLevel.BUFFER_FIT
    if spec.operation is Operation.WRITE:
        return ThroughputLevel.DISK_BOUND
    return ThroughputLevel.BUFFER_FIT


def single_throughput(spec: WorkloadSpec, profile: ServerProfile) -> float:
    """Modelled solo throughput in MB/s: plateau base scaled by the
    request-size power law."""
    params = profile.throughput_params or default_params()
    level = throughput_level(spec, profile)
    scale = (spec.request_size / params.rs_reference) ** params.rs_exponent
    return params.base(level) * scale
