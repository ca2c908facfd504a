"""Workload placement onto two-dimensional server bins.

Each server is a bin with two load dimensions: the fraction of its
alpha-scaled cache budget occupied by competing data, and the maximum
total degradation among its residents. An arriving workload may go to
any server where, after the hypothetical addition, every resident's
degradation stays strictly below 50% and the cache budget is not
exceeded. Among the feasible servers the greedy policy commits the one
minimizing the global objective: the sum over all servers of the average
of the two load dimensions. When no server is feasible the workload
waits in a FIFO queue and is retried whenever a resident departs.

`brute_force_allocate` is the exhaustive baseline: it enumerates every
assignment of the arrival sequence to servers-or-queue and returns the
best feasible one, minimizing queued count first and the objective
second.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .contention import cache_in_use
from .degradation import DEGRADATION_LIMIT, total_degradation
from .errors import DuplicateWorkload, SearchSpaceTooLarge
from .model import PlacementState, ServerProfile, WorkloadSpec, ensure_unique_ids

EXHAUSTIVE_LIMIT = 12  # default cap on brute-force sequence length

QUEUED = "queued"
PLACED = "placed"


@dataclass(frozen=True)
class ServerLoads:
    """The two bin dimensions plus their mean."""

    cache_in_use: float
    max_degradation: float

    @property
    def avg_load(self) -> float:
        return (self.cache_in_use + self.max_degradation) / 2.0


@dataclass(frozen=True)
class ObjectiveValue:
    """Sum over servers of the per-server average load."""

    total: float
    per_server: dict[str, float]


@dataclass(frozen=True)
class AllocationDecision:
    workload_id: str
    outcome: str  # PLACED or QUEUED
    server: str | None
    snapshot: dict[str, ServerLoads]          # loads after the decision committed
    feasible: tuple[str, ...] = ()            # servers that could have hosted it
    objectives: dict[str, float | None] = field(default_factory=dict)
    # global objective if placed on each server; None where infeasible

    @property
    def placed(self) -> bool:
        return self.outcome == PLACED


def server_loads(server: ServerProfile, resident: Sequence[WorkloadSpec]) -> ServerLoads:
    """Loads of one server for a given resident set. A lone resident has
    zero degradation (empty pairwise sum)."""
    ciu = cache_in_use(resident, server)
    max_deg = 0.0
    if len(resident) > 1:
        table = server.table()
        for j, victim in enumerate(resident):
            others = [w for k, w in enumerate(resident) if k != j]
            max_deg = max(max_deg, total_degradation(table, victim, others))
    return ServerLoads(cache_in_use=ciu, max_degradation=max_deg)


def state_loads(state: PlacementState) -> dict[str, ServerLoads]:
    return {s.id: server_loads(s, state.resident[s.id]) for s in state.servers}


def objective_value(state: PlacementState) -> ObjectiveValue:
    per_server = {}
    total = 0.0
    for s in state.servers:
        avg = server_loads(s, state.resident[s.id]).avg_load
        per_server[s.id] = avg
        total += avg
    return ObjectiveValue(total=total, per_server=per_server)


def is_feasible(loads: ServerLoads) -> bool:
    """Commit rule: degradation strictly under 50%, cache budget not
    exceeded (boundary equality allowed)."""
    return loads.max_degradation < DEGRADATION_LIMIT and loads.cache_in_use <= 1.0


def feasible_servers(state: PlacementState, workload: WorkloadSpec) -> list[str]:
    """Servers that could host the workload right now."""
    out = []
    for s in state.servers:
        if is_feasible(server_loads(s, state.resident[s.id] + [workload])):
            out.append(s.id)
    return out


def _try_place(
    state: PlacementState,
    workload: WorkloadSpec,
    *,
    literal_rule: bool = False,
) -> AllocationDecision | None:
    """Evaluate all servers and commit the best feasible one.

    Returns None when no server is feasible (caller decides queueing).
    With `literal_rule` the candidate minimizing its *own* post-addition
    average wins; the default minimizes the global sum of averages,
    which is what the worked examples and the stated objective demand.
    """
    before = [server_loads(s, state.resident[s.id]) for s in state.servers]
    best_idx: int | None = None
    best_score = 0.0
    feasible: list[str] = []
    objectives: dict[str, float | None] = {}
    for idx, s in enumerate(state.servers):
        after = server_loads(s, state.resident[s.id] + [workload])
        if not is_feasible(after):
            objectives[s.id] = None
            continue
        feasible.append(s.id)
        global_sum = 0.0
        for k in range(len(state.servers)):
            global_sum += after.avg_load if k == idx else before[k].avg_load
        objectives[s.id] = global_sum
        score = after.avg_load if literal_rule else global_sum
        if best_idx is None or score < best_score:
            best_idx = idx
            best_score = score
    if best_idx is None:
        return None
    chosen = state.servers[best_idx]
    state.place(workload, chosen.id)
    snapshot = state_loads(state)
    assert is_feasible(snapshot[chosen.id])
    return AllocationDecision(
        workload_id=workload.id,
        outcome=PLACED,
        server=chosen.id,
        snapshot=snapshot,
        feasible=tuple(feasible),
        objectives=objectives,
    )


def greedy_allocate(
    state: PlacementState,
    workload: WorkloadSpec,
    *,
    literal_rule: bool = False,
) -> AllocationDecision:
    """Place one arriving workload, or queue it FIFO when nowhere fits."""
    if workload.id in state.workload_ids():
        raise DuplicateWorkload(f"workload {workload.id!r} is already resident or queued")
    decision = _try_place(state, workload, literal_rule=literal_rule)
    if decision is not None:
        return decision
    state.enqueue(workload)
    return AllocationDecision(
        workload_id=workload.id,
        outcome=QUEUED,
        server=None,
        snapshot=state_loads(state),
        feasible=(),
        objectives={s.id: None for s in state.servers},
    )


def release(
    state: PlacementState,
    workload_id: str,
    *,
    literal_rule: bool = False,
) -> list[AllocationDecision]:
    """Remove a completed workload, then retry the queue.

    Queued workloads are re-attempted in FIFO order; passes repeat until
    one places nothing. Entries that still fit nowhere keep their queue
    position. Returns the placement decisions made, in scan order.
    """
    state.remove(workload_id)
    decisions: list[AllocationDecision] = []
    progress = True
    while progress:
        progress = False
        pending, state.queue = state.queue, []
        for w in pending:
            decision = _try_place(state, w, literal_rule=literal_rule)
            if decision is None:
                state.queue.append(w)  # keeps FIFO order among the still-stuck
            else:
                decisions.append(decision)
                progress = True
    return decisions


@dataclass(frozen=True)
class BruteForceResult:
    assignment: dict[str, str | None]  # workload id -> server id, None = queued
    objective: ObjectiveValue
    queued_count: int
    codes: tuple[int, ...]  # per-arrival server index, len(servers) = queued


class _ServerTracker:
    """Incremental per-server bookkeeping for the exhaustive search.

    Mirrors `server_loads` arithmetic exactly: competing bytes stay an
    integer and degradation totals accumulate in residence order, so the
    incremental values are bit-identical to a from-scratch recomputation.
    Pairwise degradations are pre-gathered into a dict so the search
    loop never touches the table.
    """

    __slots__ = ("profile", "budget", "resident", "competing", "deg", "pair")

    def __init__(
        self,
        profile: ServerProfile,
        resident: Sequence[WorkloadSpec],
        involved: Sequence[WorkloadSpec],
    ):
        self.profile = profile
        self.budget = profile.cache_budget
        self.resident: list[WorkloadSpec] = []
        self.competing = 0
        self.deg: dict[str, float] = {}
        table = profile.table()
        matrix = {
            (a.id, v.id): table.lookup(a, v)
            for a in involved
            for v in involved
            if a.id != v.id
        }
        self.pair = lambda a, v: matrix[(a.id, v.id)]
        for w in resident:
            self.push(w)

    def contribution(self, w: WorkloadSpec) -> int:
        if w.file_size <= self.profile.llc_size:
            return w.request_size + w.file_size
        return w.request_size

    def push(self, w: WorkloadSpec) -> list[tuple[str, float]]:
        undo = [(j.id, self.deg[j.id]) for j in self.resident]
        d_new = 0.0
        for j in self.resident:
            self.deg[j.id] = self.deg[j.id] + self.pair(w, j)
            d_new += self.pair(j, w)
        self.deg[w.id] = d_new
        self.resident.append(w)
        self.competing += self.contribution(w)
        return undo

    def pop(self, w: WorkloadSpec, undo: list[tuple[str, float]]) -> None:
        self.resident.pop()
        self.competing -= self.contribution(w)
        del self.deg[w.id]
        for jid, old in undo:
            self.deg[jid] = old

    def feasible(self) -> bool:
        # same float expression as is_feasible via cache_in_use, so the
        # search can never disagree with the greedy commit rule
        if self.competing / self.budget > 1.0:
            return False
        max_deg = max(self.deg.values(), default=0.0)
        return max_deg < DEGRADATION_LIMIT

    def avg_load(self) -> float:
        ciu = self.competing / self.budget
        max_deg = 0.0
        if len(self.resident) > 1:
            max_deg = max(self.deg.values())
        return (ciu + max_deg) / 2.0


def brute_force_allocate(
    state: PlacementState,
    sequence: Sequence[WorkloadSpec],
    *,
    limit: int = EXHAUSTIVE_LIMIT,
) -> BruteForceResult:
    """Exhaustively search all server-or-queue assignments of `sequence`.

    Workloads are applied in sequence order; any assignment that commits
    an infeasible server state is rejected. Among valid assignments the
    result minimizes (queued count, objective total), ties broken by the
    lexicographically smallest assignment vector (servers in state
    order, then queue). Does not mutate `state`.
    """
    n = len(sequence)
    if n > limit:
        raise SearchSpaceTooLarge(
            f"sequence of {n} arrivals exceeds the exhaustive-search limit of {limit}"
        )
    ensure_unique_ids(sequence)
    for w in sequence:
        if w.id in state.workload_ids():
            raise DuplicateWorkload(f"workload {w.id!r} is already resident or queued")

    involved = [w for s in state.servers for w in state.resident[s.id]] + list(sequence)
    trackers = [_ServerTracker(s, state.resident[s.id], involved) for s in state.servers]
    m = len(trackers)
    queue_code = m

    def current_objective() -> float:
        total = 0.0
        for t in trackers:
            total += t.avg_load()
        return total

    best: dict = {"codes": None, "queued": n + 1, "objective": float("inf")}
    codes: list[int] = []

    def search(pos: int, queued: int) -> None:
        obj = current_objective()
        if queued > best["queued"] or (queued == best["queued"] and obj >= best["objective"]):
            return
        if pos == n:
            best["codes"] = tuple(codes)
            best["queued"] = queued
            best["objective"] = obj
            return
        w = sequence[pos]
        for code in range(m + 1):
            codes.append(code)
            if code == queue_code:
                search(pos + 1, queued + 1)
            else:
                tracker = trackers[code]
                undo = tracker.push(w)
                if tracker.feasible():
                    search(pos + 1, queued)
                tracker.pop(w, undo)
            codes.pop()

    search(0, 0)
    assert best["codes"] is not None  # queueing everything is always valid

    final = state.clone()
    assignment: dict[str, str | None] = {}
    for w, code in zip(sequence, best["codes"]):
        if code == queue_code:
            final.enqueue(w)
            assignment[w.id] = None
        else:
            final.place(w, state.servers[code].id)
            assignment[w.id] = state.servers[code].id
    return BruteForceResult(
        assignment=assignment,
        objective=objective_value(final),
        queued_count=best["queued"],
        codes=best["codes"],
    )
