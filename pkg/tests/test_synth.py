import numpy as np
import pytest

import cachepack as cp
from cachepack.errors import GridMismatch, MalformedTable, ValidationError
from cachepack.model import FS_GRID, RS_GRID, TABLE_ENTRY_COUNT
from cachepack.synth import GeneratorParams, generate_table, load_table, save_table
from cachepack.units import KB, MB
from helpers import cached_synth_table, mk_profile, zero_table


@pytest.fixture(scope="module")
def m1_profile():
    return mk_profile("M1", 6 * MB, zero_table(6 * MB), alpha=1.0)


@pytest.fixture(scope="module")
def table(m1_profile):
    return cached_synth_table(6 * MB, GeneratorParams())


def pair_competing(llc, rs_i, fs_i, rs_j, fs_j):
    return (rs_i + (fs_i if fs_i <= llc else 0)) + (rs_j + (fs_j if fs_j <= llc else 0))


class TestGeneratorParams:
    def test_noise_must_stay_under_baseline(self):
        with pytest.raises(ValidationError):
            GeneratorParams(noise_amplitude=0.06, baseline_coefficient=0.05)

    def test_negative_coefficients_rejected(self):
        with pytest.raises(ValidationError):
            GeneratorParams(baseline_coefficient=-0.1)
        with pytest.raises(ValidationError):
            GeneratorParams(cache_penalty=-0.1)


class TestGenerate:
    def test_full_contract(self, table):
        assert table.values.size == TABLE_ENTRY_COUNT == 52_900
        assert table.values.min() >= 0.0
        assert table.values.max() < 1.0
        for axis in range(4):
            assert (np.diff(table.values, axis=axis) >= 0).all()

    def test_minimal_corner_is_the_smallest_entry(self, table):
        assert table.entry(KB, KB, KB, KB) == table.values.min()

    def test_maximal_corner_is_the_largest_entry(self, table):
        top_fs = FS_GRID[-1]
        assert table.entry(512 * KB, top_fs, 512 * KB, top_fs) == table.values.max()

    def test_seed_determinism(self, m1_profile):
        a = generate_table(m1_profile, GeneratorParams(seed=7))
        b = generate_table(m1_profile, GeneratorParams(seed=7))
        c = generate_table(m1_profile, GeneratorParams(seed=8))
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_cache_penalty_applies_past_the_straddle(self, table):
        params = GeneratorParams()
        # (512KB, 2MB) + (512KB, 4MB) jointly hold 7MB of a 6MB cache
        over = table.entry(512 * KB, 2 * MB, 512 * KB, 4 * MB)
        assert pair_competing(6 * MB, 512 * KB, 2 * MB, 512 * KB, 4 * MB) > 6 * MB
        assert over > params.cache_penalty
        # one grid step smaller stays at 5MB and keeps only the baseline
        under = table.entry(512 * KB, 2 * MB, 512 * KB, 2 * MB)
        assert pair_competing(6 * MB, 512 * KB, 2 * MB, 512 * KB, 2 * MB) <= 6 * MB
        assert under < 0.25

    def test_cache_loss_pairs_exceed_quarter(self, table):
        # wherever a pair jointly overflows the LLC (with request sizes
        # past 8KB), each co-runner alone costs over 25%, so two of them
        # already break the 50% rule
        rs = np.asarray(RS_GRID)
        fs = np.asarray(FS_GRID)
        contrib = rs[:, None] + np.where(fs <= 6 * MB, fs, 0)[None, :]
        overflow = (contrib[:, :, None, None] + contrib[None, None, :, :]) > 6 * MB
        big_rs = rs > 8 * KB
        mask = overflow & big_rs[:, None, None, None] & big_rs[None, None, :, None]
        assert mask.any()
        assert (table.values[mask] > 0.25).all()

    def test_group_capacity_detection_is_not_pairwise(self, table, m1_profile):
        # four mid-size workloads exhaust the cache as a group while
        # every snapped pair stays below the pairwise cliff
        group = [cp.WorkloadSpec(f"w{i}", 256 * KB, 1280 * KB) for i in range(4)]
        assert cp.predict_tdp(group, m1_profile).reached
        snapped = group[0].snapped()
        assert (snapped.request_size, snapped.file_size) == (256 * KB, 1 * MB)
        assert pair_competing(6 * MB, 256 * KB, 1 * MB, 256 * KB, 1 * MB) <= 6 * MB
        assert table.lookup(group[0], group[1]) < 0.25


class TestFileFormat:
    def test_round_trip_identity(self, table, tmp_path):
        path = tmp_path / "table.csv"
        save_table(table, path)
        loaded = load_table(path)
        assert loaded == table
        assert loaded.llc_size == 6 * MB

    def test_save_is_byte_deterministic(self, m1_profile, tmp_path):
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        save_table(generate_table(m1_profile, GeneratorParams(seed=7)), p1)
        save_table(generate_table(m1_profile, GeneratorParams(seed=7)), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_sorted_records_and_lf_endings(self, table, tmp_path):
        path = tmp_path / "table.csv"
        save_table(table, path)
        data = path.read_bytes()
        assert b"\r" not in data
        lines = data.decode().splitlines()
        assert len(lines) == 1 + TABLE_ENTRY_COUNT
        keys = [tuple(int(x) for x in line.split(",")[:4]) for line in lines[1:]]
        assert keys == sorted(keys)

    def test_missing_entry_rejected(self, table, tmp_path):
        path = tmp_path / "short.csv"
        save_table(table, path)
        lines = path.read_text().splitlines()
        path.write_text("\n".join(lines[:-1]) + "\n")
        with pytest.raises(MalformedTable):
            load_table(path)

    def test_out_of_range_entry_rejected(self, table, tmp_path):
        path = tmp_path / "bad.csv"
        save_table(table, path)
        lines = path.read_text().splitlines()
        key = lines[1].rsplit(",", 1)[0]
        lines[1] = key + ",1.200000000"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedTable):
            load_table(path)

    def test_duplicate_record_rejected(self, table, tmp_path):
        path = tmp_path / "dup.csv"
        save_table(table, path)
        lines = path.read_text().splitlines()
        lines[2] = lines[1]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedTable):
            load_table(path)

    def test_off_grid_key_rejected(self, table, tmp_path):
        path = tmp_path / "offgrid.csv"
        save_table(table, path)
        lines = path.read_text().splitlines()
        parts = lines[1].split(",")
        parts[0] = "1000"
        lines[1] = ",".join(parts)
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedTable):
            load_table(path)

    def test_grid_mismatch_rejected(self, table, tmp_path):
        path = tmp_path / "grid.csv"
        save_table(table, path)
        lines = path.read_text().splitlines()
        lines[0] = lines[0].replace("rs_grid=1024x10", "rs_grid=1024x9")
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(GridMismatch):
            load_table(path)

    def test_garbage_header_rejected(self, tmp_path):
        path = tmp_path / "garbage.csv"
        path.write_text("not a header\n")
        with pytest.raises(MalformedTable):
            load_table(path)

    def test_non_monotone_file_rejected(self, table, tmp_path):
        path = tmp_path / "nonmono.csv"
        save_table(table, path)
        lines = path.read_text().splitlines()
        # force the global maximum onto the minimal corner
        key = lines[1].rsplit(",", 1)[0]
        lines[1] = key + ",0.900000000"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(MalformedTable):
            load_table(path)
