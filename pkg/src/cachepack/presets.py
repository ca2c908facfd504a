"""Built-in server profiles.

M1 and M2 mirror the two commodity servers used throughout the worked
examples: both carry a 6MB last-level cache; they differ in system file
cache (980MB vs 455MB) and disk cache (12MB vs 8MB). The default alpha
of 1.3 is the calibrated overcommit threshold for this class of machine.
"""

from __future__ import annotations

from .model import DegradationTable, ServerProfile
from .synth import GeneratorParams, generate_table
from .throughput import ThroughputParams, default_params
from .units import MB

DEFAULT_ALPHA = 1.3

PRESETS: dict[str, dict[str, int]] = {
    "M1": {"llc_size": 6 * MB, "system_file_cache": 980 * MB, "disk_cache": 12 * MB},
    "M2": {"llc_size": 6 * MB, "system_file_cache": 455 * MB, "disk_cache": 8 * MB},
}


def make_server(
    preset: str,
    server_id: str | None = None,
    *,
    alpha: float = DEFAULT_ALPHA,
    table: DegradationTable | None = None,
    generator: GeneratorParams | None = None,
    throughput_params: ThroughputParams | None = None,
) -> ServerProfile:
    """Instantiate a preset server, generating its degradation table
    unless one is supplied."""
    if preset not in PRESETS:
        raise KeyError(f"unknown server preset {preset!r}; choose from {sorted(PRESETS)}")
    base = PRESETS[preset]
    profile = ServerProfile(
        id=server_id or preset,
        llc_size=base["llc_size"],
        system_file_cache=base["system_file_cache"],
        disk_cache=base["disk_cache"],
        alpha=alpha,
        degradation_table=table,
        throughput_params=throughput_params or default_params(),
    )
    if table is None:
        table = generate_table(profile, generator or GeneratorParams())
        profile = ServerProfile(
            id=profile.id,
            llc_size=profile.llc_size,
            system_file_cache=profile.system_file_cache,
            disk_cache=profile.disk_cache,
            alpha=profile.alpha,
            degradation_table=table,
            throughput_params=profile.throughput_params,
        )
    return profile
