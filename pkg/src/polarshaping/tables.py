"""Standard table assets: reliability sequence and interleaver patterns.

Assets live under ``data/`` as ASCII decimal, one 0-based index per line,
so they stay auditable:

* ``q_sequence.txt``        1024 lines, sub-channel indices in ascending
                            reliability order (last = most reliable)
* ``subblock_pattern.txt``  32 lines, block permutation for the sub-block
                            interleaver
* ``polar_interleaver.txt`` 164 lines, input-interleaver pattern for
                            payload lengths up to 164

Each file is validated as a permutation at load time.
"""

from __future__ import annotations

import functools
from importlib import resources

import numpy as np

__all__ = [
    "ASSET_NAMES",
    "load_asset",
    "reliability_sequence",
    "subblock_pattern",
    "polar_interleaver_base",
]

ASSET_NAMES = {
    "q_sequence": ("q_sequence.txt", 1024),
    "subblock_pattern": ("subblock_pattern.txt", 32),
    "polar_interleaver": ("polar_interleaver.txt", 164),
}


class AssetError(ValueError):
    pass


def _parse_asset(text: str, name: str, expected_len: int) -> np.ndarray:
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise AssetError(f"{name}: line {lineno}: not an integer: {line!r}")
    arr = np.asarray(values, dtype=np.int64)
    if arr.size != expected_len:
        raise AssetError(f"{name}: expected {expected_len} entries, got {arr.size}")
    if not np.array_equal(np.sort(arr), np.arange(expected_len)):
        bad = int(np.setdiff1d(np.arange(expected_len), arr)[0]) \
            if np.setdiff1d(np.arange(expected_len), arr).size else int(arr.max())
        raise AssetError(f"{name}: not a permutation of 0..{expected_len - 1} "
                         f"(problem near value {bad})")
    return arr


@functools.lru_cache(maxsize=None)
def load_asset(key: str) -> np.ndarray:
    if key not in ASSET_NAMES:
        raise AssetError(f"unknown asset {key!r}; know {sorted(ASSET_NAMES)}")
    fname, expected = ASSET_NAMES[key]
    text = resources.files("polarshaping.data").joinpath(fname).read_text()
    arr = _parse_asset(text, fname, expected)
    arr.flags.writeable = False
    return arr


def reliability_sequence(mother_len: int = 1024) -> np.ndarray:
    """Sub-channel indices below ``mother_len`` in ascending reliability."""
    q = load_asset("q_sequence")
    if mother_len == 1024:
        return q
    if mother_len > 1024 or mother_len < 1 or mother_len & (mother_len - 1):
        raise ValueError(f"mother_len must be a power of two <= 1024, got {mother_len}")
    out = q[q < mother_len]
    out.flags.writeable = False
    return out


def subblock_pattern() -> np.ndarray:
    return load_asset("subblock_pattern")


def polar_interleaver_base() -> np.ndarray:
    return load_asset("polar_interleaver")
