"""Mutual throughput degradation algebra.

Each co-resident contributes additively to a workload's total
degradation D_j (pairwise entries come from the server's profiled
table). Degradation relates to wall-clock overhead via
D = O / (AR + O), so D < 0.5 exactly when the consolidation overhead is
smaller than the workload's solo runtime; that threshold is the
consolidation criterion on the degradation dimension, and the makespan
comparison below shows why crossing it makes back-to-back execution the
better schedule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .errors import (
    DegradationOutOfRange,
    NonPositiveRuntime,
    SelfDegradation,
)
from .model import DEGRADATION_CLAMP, DegradationTable, WorkloadSpec, ensure_unique_ids

DEGRADATION_LIMIT = 0.5  # strict upper bound for consolidation


@dataclass
class DegradationReport:
    """Per-workload degradation totals for a co-resident group.

    `contributions[j]` lists (aggressor id, D(i, j)) pairs; `totals[j]`
    is their sum, clamped just below 1 (flagged in `clamped`) when the
    raw sum reaches 1, since a degradation of 1 would mean infinite
    overhead.
    """

    totals: dict[str, float] = field(default_factory=dict)
    contributions: dict[str, list[tuple[str, float]]] = field(default_factory=dict)
    clamped: set[str] = field(default_factory=set)

    @property
    def max_degradation(self) -> float:
        return max(self.totals.values(), default=0.0)


def pairwise_degradation(
    table: DegradationTable,
    aggressor: WorkloadSpec,
    victim: WorkloadSpec,
    *,
    snap: bool = True,
) -> float:
    """Table lookup D(aggressor, victim). Ordered: D(i, j) and D(j, i)
    are independent entries."""
    return table.lookup(aggressor, victim, snap=snap)


def total_degradation(
    table: DegradationTable,
    workload: WorkloadSpec,
    co_resident: Sequence[WorkloadSpec],
    *,
    snap: bool = True,
) -> float:
    """Sum of pairwise degradations inflicted on `workload` by each
    co-resident, clamped just below 1."""
    if any(w.id == workload.id for w in co_resident):
        raise SelfDegradation(f"workload {workload.id!r} listed among its own co-residents")
    total = 0.0
    for other in co_resident:
        total += table.lookup(other, workload, snap=snap)
    return DEGRADATION_CLAMP if total >= 1.0 else total


def degradation_report(
    table: DegradationTable,
    group: Sequence[WorkloadSpec],
    *,
    snap: bool = True,
) -> DegradationReport:
    """Totals and per-pair contributions for every workload in the group."""
    ensure_unique_ids(group)
    report = DegradationReport()
    for victim in group:
        pairs = [
            (other.id, table.lookup(other, victim, snap=snap))
            for other in group
            if other.id != victim.id
        ]
        raw = 0.0
        for _, d in pairs:
            raw += d
        report.contributions[victim.id] = pairs
        if raw >= 1.0:
            report.totals[victim.id] = DEGRADATION_CLAMP
            report.clamped.add(victim.id)
        else:
            report.totals[victim.id] = raw
    return report


@dataclass(frozen=True)
class CriterionOneResult:
    passed: bool
    report: DegradationReport


def criterion_one(
    table: DegradationTable,
    group: Sequence[WorkloadSpec],
    *,
    snap: bool = True,
) -> CriterionOneResult:
    """Degradation-side consolidation criterion: every member of the
    group (the arriving workload included) must keep total degradation
    strictly below 0.5. Clamped totals fail by construction."""
    report = degradation_report(table, group, snap=snap)
    passed = all(d < DEGRADATION_LIMIT for d in report.totals.values())
    return CriterionOneResult(passed=passed, report=report)


def degradation_from_overhead(overhead: float, base_runtime: float) -> float:
    """D = O / (AR + O); zero overhead means zero degradation."""
    if not base_runtime > 0:
        raise NonPositiveRuntime(f"base_runtime must be > 0, got {base_runtime}")
    if overhead < 0:
        raise ValueError(f"overhead must be >= 0, got {overhead}")
    return overhead / (base_runtime + overhead)


def overhead_from_degradation(d: float, base_runtime: float) -> float:
    """Inverse of `degradation_from_overhead`: O = AR * d / (1 - d)."""
    if not base_runtime > 0:
        raise NonPositiveRuntime(f"base_runtime must be > 0, got {base_runtime}")
    if not 0.0 <= d < 1.0:
        raise DegradationOutOfRange(f"degradation must lie in [0, 1), got {d}")
    return base_runtime * d / (1.0 - d)


@dataclass(frozen=True)
class MakespanComparison:
    consolidated: float
    sequential: float
    consolidate_better: bool


def makespan_compare(group: Sequence[tuple[float, float]]) -> MakespanComparison:
    """Consolidated vs back-to-back makespan for (base_runtime, D) pairs.

    Consolidated, every workload runs together and finishes after its
    own runtime plus the overhead its degradation implies; sequentially,
    runtimes simply add. For two workloads with equal runtimes the
    consolidated schedule wins exactly when both degradations stay below
    0.5.
    """
    consolidated = 0.0
    sequential = 0.0
    for base_runtime, d in group:
        overhead = overhead_from_degradation(d, base_runtime)
        consolidated = max(consolidated, base_runtime + overhead)
        sequential += base_runtime
    return MakespanComparison(
        consolidated=consolidated,
        sequential=sequential,
        consolidate_better=consolidated < sequential,
    )
