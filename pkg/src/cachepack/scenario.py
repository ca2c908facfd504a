"""Scenario configuration, replay, and reporting.

A scenario fixes a fleet of servers with their initial resident
workloads and names one or more arrival sequences. Running a scenario
feeds a sequence through the greedy allocator (optionally overriding
every server's alpha, for sweeps) and records a full decision trace plus
summary metrics: the final per-server loads, each server's minimum
relative throughput (1 minus its worst resident degradation), the fleet
average of that minimum, the global objective, and the queue.

Configs are JSON; reports emit as JSON and flat CSV for plotting.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import IO, Sequence

from .allocator import (
    PLACED,
    QUEUED,
    AllocationDecision,
    ObjectiveValue,
    ServerLoads,
    brute_force_allocate,
    feasible_servers,
    greedy_allocate,
    is_feasible,
    objective_value,
    server_loads,
    state_loads,
)
from .errors import (
    InconsistentInitialState,
    UnknownSequence,
    ValidationError,
)
from .model import (
    FS_GRID,
    RS_GRID,
    Operation,
    PlacementState,
    ServerProfile,
    WorkloadSpec,
    grid_index,
)
from .presets import DEFAULT_ALPHA, PRESETS
from .synth import GeneratorParams, generate_table, load_table
from .throughput import ThroughputParams, default_params
from .units import format_size, parse_size

log = logging.getLogger(__name__)

DEFAULT_BASE_RUNTIME = 1.0  # uniform solo runtime assumed for scenario workloads


@dataclass(frozen=True)
class ScenarioOptions:
    snapping: bool = True
    exhaustive_limit: int = 12
    seed: int = 0


@dataclass
class ScenarioConfig:
    servers: list[ServerProfile]
    initial: dict[str, list[WorkloadSpec]]
    sequences: dict[str, list[WorkloadSpec]]
    alpha_sweep: list[float]
    options: ScenarioOptions = field(default_factory=ScenarioOptions)

    def sequence(self, name: str | int) -> list[WorkloadSpec]:
        key = str(name)
        if key not in self.sequences:
            raise UnknownSequence(
                f"no sequence {key!r}; defined: {sorted(self.sequences)}"
            )
        return self.sequences[key]


def _normalized_workload(
    wid: str,
    rs: int,
    fs: int,
    operation: Operation,
    base_runtime: float,
    snapping: bool,
) -> WorkloadSpec:
    spec = WorkloadSpec(wid, rs, fs, operation, base_runtime)
    if not snapping:
        grid_index(rs, RS_GRID, snap=False)
        grid_index(fs, FS_GRID, snap=False)
        return spec
    snapped = spec.snapped()
    if (snapped.request_size, snapped.file_size) != (rs, fs):
        log.warning(
            "workload %s: (%s, %s) is off-grid, snapped to (%s, %s)",
            wid,
            format_size(rs),
            format_size(fs),
            format_size(snapped.request_size),
            format_size(snapped.file_size),
        )
    return snapped


def _convert(fn, value, what: str):
    try:
        return fn(value)
    except (ValueError, TypeError, KeyError) as exc:
        raise ValidationError(f"bad {what}: {value!r}") from exc


def _parse_workload(entry, wid: str, snapping: bool) -> WorkloadSpec:
    operation = Operation.WRITE
    base_runtime = DEFAULT_BASE_RUNTIME
    if isinstance(entry, dict):
        if "rs" not in entry or "fs" not in entry:
            raise ValidationError(f"workload entry needs rs and fs: {entry!r}")
        rs = _convert(parse_size, entry["rs"], "request size")
        fs = _convert(parse_size, entry["fs"], "file size")
        wid = str(entry.get("id", wid))
        if "operation" in entry:
            operation = _convert(Operation, entry["operation"], "operation")
        if "base_runtime" in entry:
            base_runtime = _convert(float, entry["base_runtime"], "base runtime")
    elif isinstance(entry, (list, tuple)) and len(entry) == 2:
        rs = _convert(parse_size, entry[0], "request size")
        fs = _convert(parse_size, entry[1], "file size")
    else:
        raise ValidationError(f"unreadable workload entry: {entry!r}")
    return _normalized_workload(wid, rs, fs, operation, base_runtime, snapping)


def _parse_server(entry: dict, index: int, options: ScenarioOptions, generator_overrides: dict, base_dir: Path) -> ServerProfile:
    if "preset" in entry:
        preset = entry["preset"]
        if preset not in PRESETS:
            raise ValidationError(f"unknown server preset {preset!r}")
        base = PRESETS[preset]
        server_id = str(entry.get("id", f"{preset.lower()}-{index}"))
        llc = base["llc_size"]
        sfc = base["system_file_cache"]
        dc = base["disk_cache"]
    else:
        try:
            server_id = str(entry["id"])
            llc = _convert(parse_size, entry["llc_size"], "llc_size")
            sfc = _convert(parse_size, entry["system_file_cache"], "system_file_cache")
            dc = _convert(parse_size, entry["disk_cache"], "disk_cache")
        except KeyError as exc:
            raise ValidationError(f"server entry missing field {exc}") from exc
    alpha = _convert(float, entry.get("alpha", DEFAULT_ALPHA), "alpha")
    throughput = default_params()
    if "throughput_params" in entry:
        throughput = ThroughputParams.from_dict(entry["throughput_params"])
    profile = ServerProfile(
        id=server_id,
        llc_size=llc,
        system_file_cache=sfc,
        disk_cache=dc,
        alpha=alpha,
        throughput_params=throughput,
    )
    if "table" in entry:
        table = load_table(base_dir / entry["table"])
    else:
        # each server gets its own deterministic profile, derived from the
        # scenario seed and the server's position
        params = GeneratorParams(seed=options.seed + index, **generator_overrides)
        table = generate_table(profile, params)
    return replace(profile, degradation_table=table)


def load_config(
    source: str | Path | dict,
    *,
    seed: int | None = None,
    snapping: bool | None = None,
    exhaustive_limit: int | None = None,
) -> ScenarioConfig:
    """Parse a scenario config from a JSON file, a dict, or the name
    ``builtin`` (the bundled demo scenario). Keyword arguments override
    the config's own options block."""
    base_dir = Path.cwd()
    if isinstance(source, (str, Path)):
        if str(source) == "builtin":
            raw = json.loads(
                resources.files("cachepack").joinpath("data/reference_scenario.json").read_text()
            )
        else:
            path = Path(source)
            raw = json.loads(path.read_text(encoding="utf-8"))
            base_dir = path.parent
    else:
        raw = source

    opts_raw = dict(raw.get("options", {}))
    generator_overrides = dict(opts_raw.pop("generator", {}))
    allowed = {"baseline_coefficient", "cache_penalty", "noise_amplitude"}
    if not set(generator_overrides) <= allowed:
        raise ValidationError(
            f"unknown generator options {sorted(set(generator_overrides) - allowed)}"
        )
    options = ScenarioOptions(
        snapping=bool(opts_raw.get("snapping", True)) if snapping is None else snapping,
        exhaustive_limit=(
            int(opts_raw.get("exhaustive_limit", 12))
            if exhaustive_limit is None
            else exhaustive_limit
        ),
        seed=int(opts_raw.get("seed", 0)) if seed is None else seed,
    )

    servers: list[ServerProfile] = []
    initial: dict[str, list[WorkloadSpec]] = {}
    for index, entry in enumerate(raw.get("servers", []), start=1):
        profile = _parse_server(entry, index, options, generator_overrides, base_dir)
        if profile.id in initial:
            raise ValidationError(f"duplicate server id {profile.id!r}")
        servers.append(profile)
        initial[profile.id] = [
            _parse_workload(item, f"{profile.id}.w{k}", options.snapping)
            for k, item in enumerate(entry.get("initial", []), start=1)
        ]
    if not servers:
        raise ValidationError("scenario defines no servers")

    sequences: dict[str, list[WorkloadSpec]] = {}
    for name, items in raw.get("sequences", {}).items():
        key = str(name)
        sequences[key] = [
            _parse_workload(item, f"seq{key}.w{k}", options.snapping)
            for k, item in enumerate(items, start=1)
        ]

    alpha_sweep = [_convert(float, a, "alpha sweep value") for a in raw.get("alpha_sweep", [])]
    return ScenarioConfig(
        servers=servers,
        initial=initial,
        sequences=sequences,
        alpha_sweep=alpha_sweep,
        options=options,
    )


def reference_scenario() -> ScenarioConfig:
    """The bundled four-server demo scenario."""
    return load_config("builtin")


def build_state(config: ScenarioConfig, alpha: float | None = None) -> PlacementState:
    """Fresh placement state with initial residents committed.

    `alpha` overrides every server's threshold uniformly (the sweep
    semantics); the initial loads must be feasible under the effective
    alpha or the scenario is rejected.
    """
    servers = list(config.servers)
    if alpha is not None:
        servers = [replace(s, alpha=float(alpha)) for s in servers]
    state = PlacementState(servers)
    for server in servers:
        for w in config.initial[server.id]:
            state.place(w, server.id)
        loads = server_loads(server, state.resident[server.id])
        if not is_feasible(loads):
            raise InconsistentInitialState(
                f"server {server.id!r} starts infeasible under alpha={server.alpha}: "
                f"cache_in_use={loads.cache_in_use:.3f}, "
                f"max_degradation={loads.max_degradation:.3f}"
            )
    return state


@dataclass
class RunReport:
    sequence: str
    alpha: float | None
    decisions: list[AllocationDecision]
    workloads: dict[str, WorkloadSpec]
    final_loads: dict[str, ServerLoads]
    min_throughput: dict[str, float]
    average_min_throughput: float
    objective: ObjectiveValue
    queued: list[str]

    @property
    def queued_count(self) -> int:
        return len(self.queued)

    def to_dict(self) -> dict:
        return {
            "sequence": self.sequence,
            "alpha": self.alpha,
            "decisions": [
                {
                    "workload": d.workload_id,
                    "request_size": self.workloads[d.workload_id].request_size,
                    "file_size": self.workloads[d.workload_id].file_size,
                    "outcome": d.outcome,
                    "server": d.server,
                    "feasible": list(d.feasible),
                    "objectives": d.objectives,
                    "loads": {
                        sid: {
                            "cache_in_use": loads.cache_in_use,
                            "max_degradation": loads.max_degradation,
                            "avg_load": loads.avg_load,
                        }
                        for sid, loads in d.snapshot.items()
                    },
                }
                for d in self.decisions
            ],
            "final": {
                sid: {
                    "cache_in_use": loads.cache_in_use,
                    "max_degradation": loads.max_degradation,
                    "avg_load": loads.avg_load,
                    "min_relative_throughput": self.min_throughput[sid],
                }
                for sid, loads in self.final_loads.items()
            },
            "average_min_throughput": self.average_min_throughput,
            "objective": {"total": self.objective.total, "per_server": self.objective.per_server},
            "queued": list(self.queued),
        }


def _report_from_state(
    sequence_name: str,
    alpha: float | None,
    state: PlacementState,
    decisions: list[AllocationDecision],
    workloads: dict[str, WorkloadSpec],
) -> RunReport:
    final_loads = state_loads(state)
    min_throughput = {
        sid: 1.0 - loads.max_degradation for sid, loads in final_loads.items()
    }
    avg = sum(min_throughput.values()) / len(min_throughput)
    return RunReport(
        sequence=sequence_name,
        alpha=alpha,
        decisions=decisions,
        workloads=workloads,
        final_loads=final_loads,
        min_throughput=min_throughput,
        average_min_throughput=avg,
        objective=objective_value(state),
        queued=[w.id for w in state.queue],
    )


def run_scenario(
    config: ScenarioConfig,
    sequence_name: str | int,
    alpha: float | None = None,
    *,
    literal_rule: bool = False,
) -> RunReport:
    """Replay one arrival sequence through the greedy allocator."""
    sequence = config.sequence(sequence_name)
    state = build_state(config, alpha)
    decisions = [greedy_allocate(state, w, literal_rule=literal_rule) for w in sequence]
    workloads = {w.id: w for ws in config.initial.values() for w in ws}
    workloads.update({w.id: w for w in sequence})
    return _report_from_state(str(sequence_name), alpha, state, decisions, workloads)


@dataclass(frozen=True)
class OracleComparison:
    greedy: RunReport
    oracle: RunReport
    gap: float


def compare_with_oracle(
    config: ScenarioConfig,
    sequence_name: str | int,
    alpha: float | None = None,
) -> OracleComparison:
    """Greedy vs exhaustive baseline on identical inputs.

    The gap is the greedy objective's relative excess over the oracle
    objective; it is non-negative whenever both queue equally."""
    greedy_report = run_scenario(config, sequence_name, alpha)
    sequence = config.sequence(sequence_name)
    state = build_state(config, alpha)
    result = brute_force_allocate(state, sequence, limit=config.options.exhaustive_limit)

    decisions: list[AllocationDecision] = []
    for w in sequence:
        feasible = tuple(feasible_servers(state, w))
        target = result.assignment[w.id]
        if target is None:
            state.enqueue(w)
            outcome, server = QUEUED, None
        else:
            state.place(w, target)
            outcome, server = PLACED, target
        decisions.append(
            AllocationDecision(
                workload_id=w.id,
                outcome=outcome,
                server=server,
                snapshot=state_loads(state),
                feasible=feasible,
            )
        )
    workloads = {w.id: w for ws in config.initial.values() for w in ws}
    workloads.update({w.id: w for w in sequence})
    oracle_report = _report_from_state(str(sequence_name), alpha, state, decisions, workloads)
    gap = (greedy_report.objective.total - result.objective.total) / max(
        result.objective.total, 1e-9
    )
    return OracleComparison(greedy=greedy_report, oracle=oracle_report, gap=gap)


def run_sweep(
    config: ScenarioConfig,
    sequence_names: Sequence[str | int] | None = None,
    alphas: Sequence[float] | None = None,
) -> list[RunReport]:
    """Run every (sequence, alpha) combination of the sweep."""
    names = [str(n) for n in (sequence_names or sorted(config.sequences))]
    values = list(alphas if alphas is not None else config.alpha_sweep) or [None]
    return [run_scenario(config, name, a) for name in names for a in values]


def write_trace_csv(report: RunReport, out: IO[str]) -> None:
    """One row per decision with post-commit loads for every server."""
    server_ids = list(report.final_loads)
    writer = csv.writer(out, lineterminator="\n")
    header = ["index", "workload", "request_size", "file_size", "outcome", "server"]
    for sid in server_ids:
        header += [f"{sid}_cache_in_use", f"{sid}_max_degradation"]
    writer.writerow(header)
    for k, d in enumerate(report.decisions, start=1):
        w = report.workloads[d.workload_id]
        row = [k, d.workload_id, w.request_size, w.file_size, d.outcome, d.server or ""]
        for sid in server_ids:
            loads = d.snapshot[sid]
            row += [f"{loads.cache_in_use:.9f}", f"{loads.max_degradation:.9f}"]
        writer.writerow(row)


def write_summary_csv(reports: Sequence[RunReport], out: IO[str]) -> None:
    """One row per (sequence, alpha) run."""
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["sequence", "alpha", "queued", "objective", "average_min_throughput"]
    )
    for r in reports:
        writer.writerow(
            [
                r.sequence,
                "" if r.alpha is None else r.alpha,
                r.queued_count,
                f"{r.objective.total:.9f}",
                f"{r.average_min_throughput:.9f}",
            ]
        )
