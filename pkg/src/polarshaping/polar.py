"""Polar transform and CRC-aided successive cancellation list decoding."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ._scl import LLR_CAP, scl_kernel

__all__ = [
    "LLR_CAP",
    "FrozenPattern",
    "DecodeCandidate",
    "polar_transform",
    "scl_decode",
    "crc_select",
]


def _as_bits(x) -> np.ndarray:
    b = np.asarray(x, dtype=np.int8)
    if b.ndim != 1:
        raise ValueError("bit vector must be one-dimensional")
    if b.size and (b.min() < 0 or b.max() > 1):
        raise ValueError("bit vector entries must be 0 or 1")
    return b


def polar_transform(u) -> np.ndarray:
    """Multiply a bit vector by the Kronecker-power kernel [[1,0],[1,1]].

    The transform is its own inverse over GF(2).
    """
    x = _as_bits(u).copy()
    N = x.size
    if N & (N - 1) or N == 0:
        raise ValueError(f"length must be a power of two, got {N}")
    step = 1
    while step < N:
        view = x.reshape(-1, 2 * step)
        view[:, :step] ^= view[:, step:]
        step *= 2
    return x


@dataclass(frozen=True)
class FrozenPattern:
    """Frozen-position mask plus the bit values forced at those positions."""

    frozen_mask: np.ndarray   # bool, True where the input bit is fixed
    frozen_values: np.ndarray  # int8, read only where frozen_mask is True

    def __post_init__(self):
        mask = np.asarray(self.frozen_mask, dtype=bool)
        vals = _as_bits(self.frozen_values)
        if mask.shape != vals.shape:
            raise ValueError("mask and values must have equal length")
        object.__setattr__(self, "frozen_mask", mask)
        object.__setattr__(self, "frozen_values", vals)

    @classmethod
    def from_free_positions(cls, length: int, free_positions: Sequence[int],
                            frozen_values: Optional[np.ndarray] = None) -> "FrozenPattern":
        mask = np.ones(length, dtype=bool)
        mask[np.asarray(free_positions, dtype=np.intp)] = False
        vals = (np.zeros(length, dtype=np.int8) if frozen_values is None
                else _as_bits(frozen_values))
        return cls(mask, vals)

    @property
    def length(self) -> int:
        return self.frozen_mask.size

    @property
    def num_free(self) -> int:
        return int((~self.frozen_mask).sum())


@dataclass(frozen=True)
class DecodeCandidate:
    u_hat: np.ndarray
    path_metric: float


def scl_decode(llr, pattern: FrozenPattern, list_size: int) -> list[DecodeCandidate]:
    """List-decode channel LLRs against a frozen pattern.

    Returns at most ``list_size`` candidates sorted by ascending path
    metric; every candidate honours the frozen values.  ``list_size == 1``
    is plain successive cancellation.
    """
    llr = np.ascontiguousarray(llr, dtype=np.float64)
    if llr.ndim != 1:
        raise ValueError("llr must be one-dimensional")
    if not np.all(np.isfinite(llr)):
        raise ValueError("llr values must be finite")
    N = llr.size
    if N == 0 or N & (N - 1):
        raise ValueError(f"length must be a power of two, got {N}")
    if pattern.length != N:
        raise ValueError(f"pattern length {pattern.length} != llr length {N}")
    if list_size < 1:
        raise ValueError("list_size must be at least 1")

    out_u = np.empty((list_size, N), dtype=np.int8)
    out_pm = np.empty(list_size, dtype=np.float64)
    n_out = scl_kernel(llr, pattern.frozen_mask,
                       np.ascontiguousarray(pattern.frozen_values),
                       list_size, out_u, out_pm)
    return [DecodeCandidate(out_u[i].copy(), float(out_pm[i]))
            for i in range(n_out)]


def crc_select(candidates: Sequence[DecodeCandidate], info_positions,
               crc_check: Callable[[np.ndarray], bool]) -> Optional[DecodeCandidate]:
    """Pick the lowest-metric candidate whose info bits pass the CRC.

    ``crc_check`` receives the bits extracted at ``info_positions``.
    Returns None when no candidate passes (a detected block error).
    """
    if not candidates:
        raise ValueError("candidate list is empty")
    idx = np.asarray(info_positions, dtype=np.intp)
    for cand in candidates:
        if crc_check(cand.u_hat[idx]):
            return cand
    return None
