"""Byte-size helpers. Binary units throughout: 1KB = 1024 bytes."""

from __future__ import annotations

import re

KB = 1024
MB = 1024 * KB
GB = 1024 * MB

_SUFFIXES = {
    "": 1,
    "B": 1,
    "K": KB,
    "KB": KB,
    "M": MB,
    "MB": MB,
    "G": GB,
    "GB": GB,
}

_SIZE_RE = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*([A-Za-z]*)\s*$")


def parse_size(value: int | float | str) -> int:
    """Parse a byte count from an int or a string like '32KB', '1M', '2GB'."""
    if isinstance(value, bool):
        raise ValueError(f"not a size: {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"fractional byte count: {value!r}")
        return int(value)
    m = _SIZE_RE.match(value)
    if not m:
        raise ValueError(f"cannot parse size: {value!r}")
    number, suffix = m.groups()
    factor = _SUFFIXES.get(suffix.upper())
    if factor is None:
        raise ValueError(f"unknown size suffix in {value!r}")
    size = float(number) * factor
    if not size.is_integer():
        raise ValueError(f"size {value!r} is not a whole number of bytes")
    return int(size)


def format_size(nbytes: int) -> str:
    """Render a byte count compactly ('64KB', '3MB', '1229KB')."""
    for unit, factor in (("GB", GB), ("MB", MB), ("KB", KB)):
        if nbytes >= factor and nbytes % factor == 0:
            return f"{nbytes // factor}{unit}"
    for unit, factor in (("GB", GB), ("MB", MB), ("KB", KB)):
        if nbytes >= factor:
            return f"{nbytes / factor:.1f}{unit}"
    return f"{nbytes}B"
