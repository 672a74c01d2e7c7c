"""Bit-level stages of the control-channel coding chain.

Covers CRC-payload interleaving, frozen-set construction, the sub-block
interleaver, rate-matching bit selection, the triangular code-bit
interleaver, and scrambling.  All interleavers are expressed as gather
permutations: ``out[i] = in[perm[i]]``.
"""

from __future__ import annotations

import numpy as np

from . import tables

__all__ = [
    "polar_interleaver_pattern",
    "polar_interleave",
    "polar_deinterleave",
    "build_frozen_sets",
    "subblock_perm",
    "subblock_interleave",
    "subblock_deinterleave",
    "selection_indices",
    "bit_select",
    "triangle_rows",
    "triangular_perm",
    "triangular_interleave",
    "triangular_deinterleave",
    "scramble",
    "generate_scrambler",
]

MAX_INTERLEAVED_LEN = 164


def polar_interleaver_pattern(k: int) -> np.ndarray:
    """Payload interleaver permutation for k bits.

    The tabulated pattern covers k <= 164; beyond that the interleaver is
    the identity (block lengths in that regime are simulated without it,
    and the mapping does not change error statistics on a memoryless
    channel).
    """
    if k < 1:
        raise ValueError("k must be positive")
    if k > MAX_INTERLEAVED_LEN:
        return np.arange(k, dtype=np.int64)
    base = tables.polar_interleaver_base()
    offset = MAX_INTERLEAVED_LEN - k
    pat = base[base >= offset] - offset
    return np.ascontiguousarray(pat)


def polar_interleave(c) -> np.ndarray:
    c = np.asarray(c)
    return c[polar_interleaver_pattern(c.size)]


def polar_deinterleave(c_prime) -> np.ndarray:
    c_prime = np.asarray(c_prime)
    inv = np.argsort(polar_interleaver_pattern(c_prime.size))
    return c_prime[inv]


def build_frozen_sets(mother_len: int, num_info: int):
    """Split sub-channels into (info_positions, frozen_positions).

    The ``num_info`` most reliable indices carry data; the rest are frozen
    to zero.  Both outputs are sorted ascending.
    """
    if num_info > mother_len:
        raise ValueError(f"num_info {num_info} exceeds mother_len {mother_len}")
    seq = tables.reliability_sequence(mother_len)
    info = np.sort(seq[mother_len - num_info:])
    frozen = np.sort(seq[:mother_len - num_info])
    return info, frozen


def subblock_perm(n: int) -> np.ndarray:
    """Gather permutation of the 32-block sub-block interleaver."""
    if n % 32:
        raise ValueError(f"length must be divisible by 32, got {n}")
    pat = tables.subblock_pattern()
    width = n // 32
    return (pat.repeat(width) * width
            + np.tile(np.arange(width, dtype=np.int64), 32))


def subblock_interleave(d) -> np.ndarray:
    d = np.asarray(d)
    return d[subblock_perm(d.size)]


def subblock_deinterleave(y) -> np.ndarray:
    y = np.asarray(y)
    return y[np.argsort(subblock_perm(y.size))]


def selection_indices(mother_len: int, tx_len: int, num_info: int) -> np.ndarray:
    """Rate-matching selection: which interleaved positions are sent.

    Repetition when tx_len > mother_len; otherwise puncture the head at
    low rates (num_info/tx_len <= 7/16) or shorten the tail.
    """
    N, E = mother_len, tx_len
    if E < 1:
        raise ValueError("tx_len must be positive")
    if E > N:
        return np.arange(E, dtype=np.int64) % N
    if num_info / E <= 7 / 16:
        return np.arange(N - E, N, dtype=np.int64)
    return np.arange(E, dtype=np.int64)


def bit_select(y, tx_len: int, num_info: int) -> np.ndarray:
    y = np.asarray(y)
    return y[selection_indices(y.size, tx_len, num_info)]


def triangle_rows(length: int) -> int:
    """Smallest t with t*(t+1)/2 >= length."""
    if length < 1:
        raise ValueError("length must be positive")
    t = int(np.ceil((np.sqrt(8 * length + 1) - 1) / 2))
    while t * (t + 1) // 2 < length:
        t += 1
    while t > 1 and (t - 1) * t // 2 >= length:
        t -= 1
    return t


def triangular_perm(length: int) -> np.ndarray:
    """Row-write/column-read permutation of the triangular interleaver.

    Bits fill rows of length t, t-1, ..., 1 (tail slots beyond ``length``
    stay empty) and are read out column by column, skipping empty slots.
    """
    t = triangle_rows(length)
    row_offset = np.zeros(t, dtype=np.int64)
    for r in range(1, t):
        row_offset[r] = row_offset[r - 1] + (t - (r - 1))
    out = np.empty(length, dtype=np.int64)
    k = 0
    for col in range(t):
        for row in range(t - col):
            idx = row_offset[row] + col
            if idx < length:
                out[k] = idx
                k += 1
    assert k == length
    return out


def triangular_interleave(e) -> np.ndarray:
    e = np.asarray(e)
    return e[triangular_perm(e.size)]


def triangular_deinterleave(f) -> np.ndarray:
    f = np.asarray(f)
    return f[np.argsort(triangular_perm(f.size))]


def scramble(bits, seq) -> np.ndarray:
    """Elementwise XOR with the scrambling sequence; its own inverse."""
    bits = np.asarray(bits, dtype=np.int8)
    seq = np.asarray(seq, dtype=np.int8)
    if bits.shape != seq.shape:
        raise ValueError("scrambling sequence length mismatch")
    return bits ^ seq


_LFSR_BITS = 31
_LFSR_TAP = 3  # feedback x^31 + x^3 + 1


def _splitmix64(seed: int) -> int:
    mask = (1 << 64) - 1
    z = (seed + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


def generate_scrambler(seed: int | str, length: int) -> np.ndarray:
    """Deterministic binary sequence from a 31-bit LFSR (x^31 + x^3 + 1).

    ``seed="zeros"`` disables scrambling (all-zero sequence).  Integer
    seeds pick the register start state through a splitmix64 finaliser;
    the register is never left all-zero.
    """
    if length < 1:
        raise ValueError("length must be positive")
    if seed == "zeros":
        return np.zeros(length, dtype=np.int8)
    reg = _splitmix64(int(seed)) & ((1 << _LFSR_BITS) - 1)
    if reg == 0:
        reg = 1
    out = np.empty(length, dtype=np.int8)
    for k in range(length):
        out[k] = reg & 1
        fb = (reg ^ (reg >> _LFSR_TAP)) & 1
        reg = (reg >> 1) | (fb << (_LFSR_BITS - 1))
    return out
