import numpy as np
import pytest

import cachepack as cp
from cachepack.errors import (
    DuplicateWorkload,
    MalformedTable,
    NonPositiveRuntime,
    NonPositiveSize,
    OffGridValue,
    RequestLargerThanFile,
    UnknownWorkload,
    ValidationError,
)
from cachepack.model import (
    FS_GRID,
    RS_GRID,
    TABLE_ENTRY_COUNT,
    DegradationTable,
    PlacementState,
    grid_index,
    snap_to_grid,
)
from cachepack.units import GB, KB, MB
from helpers import mk_profile, step_table, zero_table


class TestGrids:
    def test_grid_shapes(self):
        assert len(RS_GRID) == 10
        assert len(FS_GRID) == 23
        assert len(RS_GRID) * len(FS_GRID) == 230
        assert TABLE_ENTRY_COUNT == 52_900

    def test_grids_double_from_1kb(self):
        assert RS_GRID[0] == KB and FS_GRID[0] == KB
        assert all(b == 2 * a for a, b in zip(RS_GRID, RS_GRID[1:]))
        assert all(b == 2 * a for a, b in zip(FS_GRID, FS_GRID[1:]))
        assert RS_GRID[-1] == 512 * KB

    def test_snap_in_log_space(self):
        # 1280KB sits between 1MB and 2MB; log-distance favors 1MB
        assert snap_to_grid(1280 * KB, FS_GRID) == 1 * MB
        # 3MB is log-closer to 4MB than to 2MB
        assert snap_to_grid(3 * MB, FS_GRID) == 4 * MB
        assert snap_to_grid(1, FS_GRID) == KB
        assert snap_to_grid(100 * GB, FS_GRID) == FS_GRID[-1]

    def test_exact_membership_required_without_snap(self):
        assert grid_index(64 * KB, RS_GRID) == 6
        with pytest.raises(OffGridValue):
            grid_index(3 * KB, RS_GRID)


class TestWorkloadSpec:
    def test_valid_spec(self):
        w = cp.WorkloadSpec("w", 64 * KB, 64 * MB, cp.Operation.READ, base_runtime=2.0)
        assert w.request_size == 64 * KB
        assert w.base_runtime == 2.0

    def test_zero_size_rejected(self):
        with pytest.raises(NonPositiveSize):
            cp.WorkloadSpec("w", 0, KB)

    def test_request_larger_than_file_rejected(self):
        with pytest.raises(RequestLargerThanFile):
            cp.WorkloadSpec("w", 2 * KB, KB)

    def test_non_positive_runtime_rejected(self):
        with pytest.raises(NonPositiveRuntime):
            cp.WorkloadSpec("w", KB, KB, base_runtime=0.0)

    def test_snapped_preserves_identity_fields(self):
        w = cp.WorkloadSpec("w", 3 * KB, 1280 * KB, cp.Operation.READ, 1.5)
        s = w.snapped()
        assert (s.request_size, s.file_size) == (4 * KB, 1 * MB)
        assert (s.id, s.operation, s.base_runtime) == ("w", cp.Operation.READ, 1.5)


class TestValidate:
    def test_on_grid_passes(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        w = cp.WorkloadSpec("w", 64 * KB, 64 * MB, cp.Operation.READ)
        assert cp.validate(w, profile) is w

    def test_off_grid_rejected_without_snapping(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        w = cp.WorkloadSpec("w", 3 * KB, 1 * MB)
        with pytest.raises(OffGridValue):
            cp.validate(w, profile)

    def test_off_grid_snaps_on_request(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        w = cp.WorkloadSpec("w", 3 * KB, 1 * MB)
        snapped = cp.validate(w, profile, snap=True)
        assert (snapped.request_size, snapped.file_size) == (4 * KB, 1 * MB)


class TestServerProfile:
    def test_alpha_below_one_rejected(self):
        with pytest.raises(ValidationError):
            mk_profile("m", 6 * MB, zero_table(6 * MB), alpha=0.9)

    def test_non_positive_cache_rejected(self):
        with pytest.raises(ValidationError):
            cp.ServerProfile("m", 0, MB, MB)

    def test_cache_budget(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB), alpha=1.3)
        assert profile.cache_budget == 1.3 * 6 * MB
        assert profile.buffer_sum == 110 * MB


class TestDegradationTable:
    def test_entry_and_lookup(self):
        table = step_table(6 * MB, [((4 * KB, 8 * KB, 16 * KB, 32 * KB), 0.25)])
        assert table.entry(4 * KB, 8 * KB, 16 * KB, 32 * KB) == 0.25
        assert table.entry(1 * KB, 1 * KB, 1 * KB, 1 * KB) == 0.0
        i = cp.WorkloadSpec("i", 4 * KB, 8 * KB)
        j = cp.WorkloadSpec("j", 16 * KB, 32 * KB)
        assert table.lookup(i, j) == 0.25
        assert table.lookup(j, i) == 0.0  # ordered pairs are independent

    def test_lookup_snapping_policy(self):
        table = zero_table(6 * MB)
        off = cp.WorkloadSpec("w", 3 * KB, 1 * MB)
        assert table.lookup(off, off) == 0.0
        with pytest.raises(OffGridValue):
            table.lookup(off, off, snap=False)

    def test_range_violation_rejected(self):
        values = np.zeros((10, 23, 10, 23))
        values[-1, -1, -1, -1] = 1.0
        with pytest.raises(MalformedTable):
            DegradationTable(values)

    def test_monotonicity_violation_rejected(self):
        values = np.zeros((10, 23, 10, 23))
        values[0, 0, 0, 0] = 0.5  # larger cells stay 0 -> decreasing
        with pytest.raises(MalformedTable):
            DegradationTable(values)

    def test_wrong_shape_rejected(self):
        with pytest.raises(MalformedTable):
            DegradationTable(np.zeros((10, 21, 10, 21)))


class TestPlacementState:
    def test_duplicate_ids_rejected(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        state = PlacementState([profile])
        w = cp.WorkloadSpec("w", KB, KB)
        state.place(w, "m")
        with pytest.raises(DuplicateWorkload):
            state.place(cp.WorkloadSpec("w", KB, KB), "m")
        with pytest.raises(DuplicateWorkload):
            state.enqueue(cp.WorkloadSpec("w", KB, KB))

    def test_queued_id_cannot_become_resident(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        state = PlacementState([profile])
        state.enqueue(cp.WorkloadSpec("q", KB, KB))
        with pytest.raises(DuplicateWorkload):
            state.place(cp.WorkloadSpec("q", KB, KB), "m")

    def test_remove_unknown(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        state = PlacementState([profile])
        with pytest.raises(UnknownWorkload):
            state.remove("ghost")

    def test_clone_is_independent(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        state = PlacementState([profile])
        state.place(cp.WorkloadSpec("w", KB, KB), "m")
        copy = state.clone()
        copy.place(cp.WorkloadSpec("w2", KB, KB), "m")
        copy.enqueue(cp.WorkloadSpec("q", KB, KB))
        assert [w.id for w in state.resident["m"]] == ["w"]
        assert state.queue == []

    def test_locate(self):
        profile = mk_profile("m", 6 * MB, zero_table(6 * MB))
        state = PlacementState([profile])
        state.place(cp.WorkloadSpec("w", KB, KB), "m")
        assert state.locate("w") == "m"
        assert state.locate("nope") is None
