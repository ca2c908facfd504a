"""Synthetic degradation-table generator and the table file format.

Real pairwise degradation data comes from a profiling campaign (52,900
co-run measurements per server). This generator is an explicit stand-in:
it reproduces the qualitative structure the placement algorithms need
(a linear contention floor that grows with workload size, a sharp penalty
when a pair's combined competing data overflows the LLC, and exact
per-axis monotonicity) without claiming any measured value. Users with
real profiles should write them in the CSV format below and skip the
generator entirely.

File format: one header line
``llc_size=<bytes>,rs_grid=<start>x<count>,fs_grid=<start>x<count>,entries=<n>``
followed by one ``rs_i,fs_i,rs_j,fs_j,d`` record per entry (sizes in
bytes, d with nine decimals), sorted lexicographically by the four keys.
UTF-8, LF line endings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GridMismatch, MalformedTable, ValidationError
from .model import FS_GRID, RS_GRID, TABLE_ENTRY_COUNT, DegradationTable, ServerProfile


@dataclass(frozen=True)
class GeneratorParams:
    """Knobs for the synthetic table.

    `baseline_coefficient` is the contention floor one co-runner adds at
    the largest grid sizes; `cache_penalty` is added on top whenever the
    pair's combined competing data exceeds the LLC; noise is uniform,
    seeded, and small enough that the monotonicity pass never has to
    move an entry by more than the noise band.
    """

    seed: int = 0
    baseline_coefficient: float = 0.05
    cache_penalty: float = 0.35
    noise_amplitude: float = 0.01

    def __post_init__(self) -> None:
        if self.baseline_coefficient < 0 or self.cache_penalty < 0:
            raise ValidationError("generator coefficients must be non-negative")
        if not 0 <= self.noise_amplitude < self.baseline_coefficient:
            raise ValidationError(
                "noise_amplitude must satisfy 0 <= noise < baseline_coefficient"
            )


def generate_table(profile: ServerProfile, params: GeneratorParams = GeneratorParams()) -> DegradationTable:
    """Produce all 52,900 pairwise entries for one server.

    Deterministic in (profile, params). The raw surface is baseline
    contention scaled by the pair's log-space sizes, plus the cache
    penalty where the pair jointly overflows the LLC; a cumulative-max
    pass along each grid axis then makes monotonicity exact.
    """
    n_rs, n_fs = len(RS_GRID), len(FS_GRID)
    rs_pos = np.arange(n_rs) / (n_rs - 1)
    fs_pos = np.arange(n_fs) / (n_fs - 1)
    weight = (rs_pos[:, None] + fs_pos[None, :]) / 2.0  # (rs, fs) in [0, 1]

    rs = np.asarray(RS_GRID, dtype=np.int64)
    fs = np.asarray(FS_GRID, dtype=np.int64)
    contrib = rs[:, None] + np.where(fs <= profile.llc_size, fs, 0)[None, :]

    pair_weight = (weight[:, :, None, None] + weight[None, None, :, :]) / 2.0
    raw = params.baseline_coefficient * (0.25 + 0.75 * pair_weight)
    overflow = (contrib[:, :, None, None] + contrib[None, None, :, :]) > profile.llc_size
    raw = raw + params.cache_penalty * overflow

    rng = np.random.default_rng(params.seed)
    raw = raw + rng.uniform(0.0, params.noise_amplitude, size=raw.shape)

    raw = np.minimum(raw, 0.999)
    for axis in range(4):
        raw = np.maximum.accumulate(raw, axis=axis)
    values = np.round(raw, 9)
    return DegradationTable(values, llc_size=profile.llc_size)


def _header_line(table: DegradationTable) -> str:
    return (
        f"llc_size={table.llc_size or 0},"
        f"rs_grid={RS_GRID[0]}x{len(RS_GRID)},"
        f"fs_grid={FS_GRID[0]}x{len(FS_GRID)},"
        f"entries={TABLE_ENTRY_COUNT}"
    )


def save_table(table: DegradationTable, path: str | Path) -> None:
    """Write a table in the CSV contract format (deterministic bytes)."""
    lines = [_header_line(table)]
    values = table.values
    for a, rs_i in enumerate(RS_GRID):
        for b, fs_i in enumerate(FS_GRID):
            for c, rs_j in enumerate(RS_GRID):
                row = values[a, b, c]
                for d, fs_j in enumerate(FS_GRID):
                    lines.append(f"{rs_i},{fs_i},{rs_j},{fs_j},{row[d]:.9f}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _parse_header(line: str) -> int:
    fields = {}
    for part in line.strip().split(","):
        if "=" not in part:
            raise MalformedTable(f"bad header field {part!r}")
        key, _, value = part.partition("=")
        fields[key] = value
    try:
        llc_size = int(fields["llc_size"])
        rs_spec = fields["rs_grid"]
        fs_spec = fields["fs_grid"]
        entries = int(fields["entries"])
    except (KeyError, ValueError) as exc:
        raise MalformedTable(f"unreadable header: {line!r}") from exc
    if rs_spec != f"{RS_GRID[0]}x{len(RS_GRID)}" or fs_spec != f"{FS_GRID[0]}x{len(FS_GRID)}":
        raise GridMismatch(
            f"table declares grids {rs_spec}/{fs_spec}, expected "
            f"{RS_GRID[0]}x{len(RS_GRID)}/{FS_GRID[0]}x{len(FS_GRID)}"
        )
    if entries != TABLE_ENTRY_COUNT:
        raise MalformedTable(f"header declares {entries} entries, expected {TABLE_ENTRY_COUNT}")
    return llc_size


def load_table(path: str | Path) -> DegradationTable:
    """Read a table file, checking the full contract (cardinality, range,
    grid coverage, monotonicity)."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise MalformedTable(f"{path}: empty file")
    llc_size = _parse_header(lines[0])

    rs_index = {v: k for k, v in enumerate(RS_GRID)}
    fs_index = {v: k for k, v in enumerate(FS_GRID)}
    values = np.full((len(RS_GRID), len(FS_GRID), len(RS_GRID), len(FS_GRID)), np.nan)
    count = 0
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise MalformedTable(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
        try:
            rs_i, fs_i, rs_j, fs_j = (int(p) for p in parts[:4])
            d = float(parts[4])
        except ValueError as exc:
            raise MalformedTable(f"{path}:{lineno}: unparseable record") from exc
        try:
            key = (rs_index[rs_i], fs_index[fs_i], rs_index[rs_j], fs_index[fs_j])
        except KeyError as exc:
            raise MalformedTable(f"{path}:{lineno}: size {exc} is not on the grid") from exc
        if not math.isfinite(d) or not 0.0 <= d < 1.0:
            raise MalformedTable(f"{path}:{lineno}: entry {d} outside [0, 1)")
        if not math.isnan(values[key]):
            raise MalformedTable(f"{path}:{lineno}: duplicate entry for {parts[:4]}")
        values[key] = d
        count += 1
    if count != TABLE_ENTRY_COUNT:
        raise MalformedTable(f"{path}: {count} entries, expected {TABLE_ENTRY_COUNT}")
    return DegradationTable(values, llc_size=llc_size or None)
