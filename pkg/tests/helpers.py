"""Shared fixtures: hand-built monotone tables and seeded random instances."""

from __future__ import annotations

import random

import numpy as np

import cachepack as cp
from cachepack.model import FS_GRID, RS_GRID, DegradationTable, PlacementState
from cachepack.synth import GeneratorParams, generate_table
from cachepack.units import KB, MB

RS_IDX = {v: k for k, v in enumerate(RS_GRID)}
FS_IDX = {v: k for k, v in enumerate(FS_GRID)}


def step_table(llc_size, steps):
    """Monotone table from (rs_i, fs_i, rs_j, fs_j) -> value anchor points.

    Every cell gets the max anchor value over anchors it dominates
    componentwise, which keeps per-axis monotonicity exact.
    """
    values = np.zeros((len(RS_GRID), len(FS_GRID), len(RS_GRID), len(FS_GRID)))
    for (rs_i, fs_i, rs_j, fs_j), v in steps:
        region = values[RS_IDX[rs_i]:, FS_IDX[fs_i]:, RS_IDX[rs_j]:, FS_IDX[fs_j]:]
        np.maximum(region, v, out=region)
    return DegradationTable(values, llc_size=llc_size)


def zero_table(llc_size):
    return step_table(llc_size, [])


def mk_profile(server_id, llc_size, table, *, alpha=1.0, sfc=100 * MB, dc=10 * MB):
    return cp.ServerProfile(
        id=server_id,
        llc_size=llc_size,
        system_file_cache=sfc,
        disk_cache=dc,
        alpha=alpha,
        degradation_table=table,
    )


def worked_example_state():
    """Two loaded servers and an arrival that fits both.

    Server A sits at (30% cache, 40% max degradation) and would move to
    (35%, 45%); server B sits at (40%, 45%) and would move to (42%, 48%).
    The global-sum rule must pick B (80 vs 82.5 percent points) even
    though B's own post-allocation average is the larger one.
    """
    table_a = step_table(40 * KB, [
        ((1 * KB, 1 * KB, 2 * KB, 4 * KB), 0.05),
        ((2 * KB, 4 * KB, 1 * KB, 1 * KB), 0.05),
        ((2 * KB, 4 * KB, 2 * KB, 4 * KB), 0.40),
    ])
    table_b = step_table(100 * KB, [
        ((1 * KB, 1 * KB, 4 * KB, 8 * KB), 0.03),
        ((4 * KB, 8 * KB, 4 * KB, 8 * KB), 0.20),
        ((8 * KB, 8 * KB, 4 * KB, 8 * KB), 0.25),
    ])
    server_a = mk_profile("A", 40 * KB, table_a)
    server_b = mk_profile("B", 100 * KB, table_b)
    state = PlacementState([server_a, server_b])
    state.place(cp.WorkloadSpec("a1", 2 * KB, 4 * KB), "A")
    state.place(cp.WorkloadSpec("a2", 2 * KB, 4 * KB), "A")
    state.place(cp.WorkloadSpec("b1", 4 * KB, 8 * KB), "B")
    state.place(cp.WorkloadSpec("b2", 4 * KB, 8 * KB), "B")
    state.place(cp.WorkloadSpec("b3", 8 * KB, 8 * KB), "B")
    arrival = cp.WorkloadSpec("W", 1 * KB, 1 * KB)
    return state, arrival


def illustrative_bin():
    """Three residents at exactly 78% cache-in-use and 56% max degradation
    (an over-threshold state the allocator itself would never commit)."""
    table = step_table(
        4000 * KB, [((16 * KB, 1 * MB, 512 * KB, 512 * KB), 0.28)]
    )
    server = mk_profile("S", 4000 * KB, table)
    residents = [
        cp.WorkloadSpec("x1", 16 * KB, 1 * MB),
        cp.WorkloadSpec("x2", 32 * KB, 1 * MB),
        cp.WorkloadSpec("x3", 512 * KB, 512 * KB),
    ]
    return server, residents


_TABLE_CACHE: dict = {}


def cached_synth_table(llc_size, params):
    key = (llc_size, params)
    if key not in _TABLE_CACHE:
        probe = mk_profile("probe", llc_size, zero_table(llc_size))
        _TABLE_CACHE[key] = generate_table(probe, params)
    return _TABLE_CACHE[key]


def preset_servers(seed, count, *, alphas=(1.0, 1.1, 1.2, 1.3, 1.4, 1.5), table_seeds=8):
    """Deterministic preset fleet; tables come from a small seed pool so
    repeated instances share cached tables."""
    rng = random.Random(seed * 977 + 11)
    servers = []
    for i in range(count):
        preset = "M1" if i % 2 == 0 else "M2"
        alpha = rng.choice(list(alphas))
        params = GeneratorParams(seed=rng.randrange(table_seeds))
        table = cached_synth_table(6 * MB, params)
        servers.append(cp.make_server(preset, f"s{i + 1}", alpha=alpha, table=table))
    return servers


def grid_workload(rng, wid, max_fs):
    fs = rng.choice([f for f in FS_GRID if f <= max_fs])
    rs = rng.choice([r for r in RS_GRID if r <= fs])
    return cp.WorkloadSpec(wid, rs, fs)


def noqueue_instance(seed):
    """Random fleet plus arrivals sized so every arrival always fits:
    greedy and the exhaustive baseline both place everything, which makes
    objective dominance exact."""
    rng = random.Random(seed)
    m = rng.randint(2, 4)
    servers = preset_servers(seed, m)
    state = PlacementState(servers)
    for s in servers:
        for k in range(rng.randint(0, 2)):
            state.place(grid_workload(rng, f"{s.id}.w{k}", 256 * KB), s.id)
    arrivals = [grid_workload(rng, f"a{k}", 512 * KB) for k in range(rng.randint(3, 8))]
    return state, arrivals


def fuzz_instance(seed):
    """Heavier random instance: large files, queue pressure, and release
    events mixed into the arrival stream."""
    rng = random.Random(seed * 31 + 7)
    m = rng.randint(2, 4)
    servers = preset_servers(seed, m)
    state = PlacementState(servers)
    for s in servers:
        for k in range(rng.randint(0, 2)):
            state.place(grid_workload(rng, f"{s.id}.w{k}", 1 * MB), s.id)
    events = []
    for k in range(rng.randint(8, 15)):
        events.append(("arrive", grid_workload(rng, f"a{k}", 64 * MB)))
        if rng.random() < 0.3:
            events.append(("release", None))
    return state, events, rng
