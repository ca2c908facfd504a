"""Cache-contention aware workload consolidation.

Predicts last-level-cache contention and mutual throughput degradation
for co-run data-intensive workloads, enforces the two consolidation
criteria (per-workload degradation under 50%, competing data within the
alpha-scaled cache budget), and places arriving workloads onto servers
with a greedy two-dimensional bin-packing policy, benchmarked against an
exhaustive baseline.
"""

from .allocator import (
    AllocationDecision,
    BruteForceResult,
    ObjectiveValue,
    ServerLoads,
    brute_force_allocate,
    greedy_allocate,
    objective_value,
    release,
    server_loads,
)
from .contention import (
    CompetingSet,
    TdpPrediction,
    cache_in_use,
    calibrate_alpha,
    competing_data,
    competing_set,
    criterion_two,
    predict_tdp,
)
from .degradation import (
    CriterionOneResult,
    DegradationReport,
    MakespanComparison,
    criterion_one,
    degradation_from_overhead,
    makespan_compare,
    overhead_from_degradation,
    pairwise_degradation,
    total_degradation,
)
from .model import (
    FS_GRID,
    RS_GRID,
    DegradationTable,
    Operation,
    PlacementState,
    ServerProfile,
    WorkloadSpec,
    snap_to_grid,
    validate,
)
from .presets import PRESETS, make_server
from .scenario import (
    RunReport,
    ScenarioConfig,
    compare_with_oracle,
    load_config,
    reference_scenario,
    run_scenario,
    run_sweep,
)
from .synth import GeneratorParams, generate_table, load_table, save_table
from .throughput import (
    ThroughputLevel,
    ThroughputParams,
    single_throughput,
    throughput_level,
)

__version__ = "0.1.0"
