"""Last-level-cache competition arithmetic.

Co-run workloads compete for LLC capacity with their request buffers and,
when the file fits in the cache at all, their file data. Once the total
competing data reaches the cache size, throughput drops sharply (the
degradation point). The `alpha` factor on a server profile captures how
far past nominal capacity the cache can be loaded before that happens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import NonPositiveObservation
from .model import ServerProfile, WorkloadSpec


@dataclass(frozen=True)
class CompetingSet:
    """Workloads whose file data stays cache-resident, plus the total
    competing bytes of the whole group (request buffers always count)."""

    members: frozenset[str]
    total_competing_bytes: int


def competing_set(workloads: Iterable[WorkloadSpec], profile: ServerProfile) -> CompetingSet:
    members = set()
    total = 0
    for w in workloads:
        total += w.request_size
        if w.file_size <= profile.llc_size:
            members.add(w.id)
            total += w.file_size
    return CompetingSet(frozenset(members), total)


def competing_data(
    workloads: Iterable[WorkloadSpec],
    profile: ServerProfile,
    *,
    include_large_files: bool = False,
) -> int:
    """Total bytes competing for the LLC.

    Every workload contributes its request size; file data contributes
    only when it fits within the cache (a file larger than the LLC never
    becomes cache-resident, so it does not compete). The legacy
    `include_large_files` variant counts every file size regardless,
    which over-predicts for large files and exists for comparison only.
    """
    total = 0
    for w in workloads:
        total += w.request_size
        if include_large_files or w.file_size <= profile.llc_size:
            total += w.file_size
    return total


@dataclass(frozen=True)
class TdpPrediction:
    reached: bool
    margin_bytes: int  # llc_size - competing data; negative when past capacity


def predict_tdp(
    workloads: Sequence[WorkloadSpec],
    profile: ServerProfile,
    *,
    include_large_files: bool = False,
) -> TdpPrediction:
    """Has this group reached the throughput degradation point?

    The point is reached exactly when the competing data meets or
    exceeds the LLC capacity.
    """
    total = competing_data(workloads, profile, include_large_files=include_large_files)
    return TdpPrediction(reached=total >= profile.llc_size, margin_bytes=profile.llc_size - total)


def criterion_two(workloads: Sequence[WorkloadSpec], profile: ServerProfile) -> bool:
    """Cache-side consolidation criterion: competing data must not exceed
    alpha * llc_size. Boundary equality is feasible."""
    return competing_data(workloads, profile) <= profile.cache_budget


def cache_in_use(workloads: Sequence[WorkloadSpec], profile: ServerProfile) -> float:
    """Fraction of the alpha-scaled cache budget in use; may exceed 1.0
    for hypothetical (uncommitted) groups."""
    return competing_data(workloads, profile) / profile.cache_budget


def calibrate_alpha(observed_tdp: float, profile: ServerProfile) -> float:
    """Empirical alpha from a measured degradation point.

    `observed_tdp` is the competing-data level (bytes, fractional values
    allowed for averaged measurements) at which throughput actually
    collapsed on this server.
    """
    if not observed_tdp > 0:
        raise NonPositiveObservation(f"observed TDP must be positive, got {observed_tdp}")
    return observed_tdp / profile.llc_size
