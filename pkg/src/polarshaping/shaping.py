"""Shaping-bit insertion for the polar coding chain.

A list decoder run at the transmitter (the precoder) chooses the bits on
a few reliable sub-channels inside the tail segment of the transform
input so that the tail of the codeword, XORed with the pre-interleaving
image of the scrambling sequence, is biased towards zeros.  A modified
code-bit interleaver then routes exactly those codeword positions onto
the amplitude-class bit levels of the QAM mapper, which makes the
transmitted symbols follow the three-level shaped distribution.

The tail segment works because the transform matrix is block lower
triangular: the last ``segment_len`` output bits depend only on the last
``segment_len`` input bits, so a short precoder controls them exactly
and everything upstream of the transform treats the extended payload as
ordinary data.
"""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.optimize import isotonic_regression

from . import chain, tables
from .config import CodeConfig
from .crc import crc_attach
from .modulation import Constellation, get_constellation, qam_map
from .polar import FrozenPattern, polar_transform, scl_decode

__all__ = [
    "shaping_set",
    "equivalent_scrambler",
    "build_u_prime",
    "precode_shaping",
    "insert_shaping",
    "modified_triangular_perm",
    "CalibrationTable",
    "calibrate_s_to_p",
    "calibrate_sweep",
    "ChainSetup",
    "make_chain",
    "shaped_encode",
]


def shaping_set(seq: np.ndarray, mother_len: int, mod_bits: int,
                num_shaping: int) -> np.ndarray:
    """Most reliable sub-channels usable by the precoder, sorted ascending.

    Candidates are restricted to the tail segment the precoder controls;
    outside it a shaping bit could never influence the shaped codeword
    positions.
    """
    segment_len = mother_len // (mod_bits // 2)
    if num_shaping > segment_len:
        raise ValueError(f"num_shaping {num_shaping} exceeds segment length {segment_len}")
    if num_shaping == 0:
        return np.empty(0, dtype=np.int64)
    seg_start = mother_len - segment_len
    in_segment = seq[seq >= seg_start]
    return np.sort(in_segment[-num_shaping:])


def equivalent_scrambler(scramble_seq: np.ndarray, sb_perm: np.ndarray,
                         cb_perm: np.ndarray) -> np.ndarray:
    """Pre-interleaving image of the scrambling sequence.

    Returns the length-N vector whose XOR onto the codeword before the
    sub-block and code-bit interleavers equals scrambling with the given
    sequence after them.  Requires the full codeword to be transmitted
    (tx_len == mother_len).
    """
    v = np.asarray(scramble_seq, dtype=np.int8)
    if v.size != sb_perm.size:
        raise ValueError("equivalent scrambler requires tx_len == mother_len")
    composite = sb_perm[cb_perm]          # out[i] = d[composite[i]]
    v_bar = np.empty_like(v)
    v_bar[composite] = v
    return v_bar


def build_u_prime(c_prime: np.ndarray, config: CodeConfig,
                  seq: Optional[np.ndarray] = None):
    """Place interleaved payload bits around the reserved shaping holes.

    Returns ``(u, info_positions, hole_positions)`` where ``u`` carries
    ``c_prime`` on the most reliable non-hole sub-channels (ascending
    order), zeros elsewhere, and the hole positions are still unset.
    """
    c_prime = np.asarray(c_prime, dtype=np.int8)
    N = config.mother_len
    K = c_prime.size
    if K + config.shaping_bits > N:
        raise ValueError("payload and shaping bits exceed the transform length")
    if seq is None:
        seq = tables.reliability_sequence(N)
    holes = shaping_set(seq, N, config.mod_bits, config.shaping_bits)
    hole_mask = np.zeros(N, dtype=bool)
    hole_mask[holes] = True
    remaining = seq[~hole_mask[seq]]
    info_positions = np.sort(remaining[remaining.size - K:])
    u = np.zeros(N, dtype=np.int8)
    u[info_positions] = c_prime
    return u, info_positions, holes


def precode_shaping(u_hat_segment: np.ndarray, hole_mask: np.ndarray,
                    equiv_seq_segment: np.ndarray, ones_prob: float,
                    list_size: int) -> np.ndarray:
    """Choose shaping bits by list-decoding constant-magnitude LLRs.

    ``u_hat_segment`` holds the known bits of the tail segment (entries
    under ``hole_mask`` are ignored).  The decoder input is
    ``log((1-p)/p)`` with the sign flipped wherever the equivalent
    scrambler is one, so the selected codeword is biased towards ones
    probability ``p`` after descrambling.  Returns the hole bits in
    ascending position order.
    """
    if not 0 < ones_prob <= 0.5:
        raise ValueError(f"ones_prob must lie in (0, 0.5], got {ones_prob}")
    hole_mask = np.asarray(hole_mask, dtype=bool)
    u_hat_segment = np.asarray(u_hat_segment, dtype=np.int8)
    if u_hat_segment.shape != hole_mask.shape:
        raise ValueError("segment and hole mask lengths differ")
    if not hole_mask.any():
        return np.empty(0, dtype=np.int8)
    magnitude = np.log((1.0 - ones_prob) / ones_prob)
    llr = magnitude * (1.0 - 2.0 * np.asarray(equiv_seq_segment, dtype=np.float64))
    pattern = FrozenPattern(~hole_mask, np.where(hole_mask, 0, u_hat_segment))
    best = scl_decode(llr, pattern, list_size)[0]
    return best.u_hat[hole_mask]


def insert_shaping(c_prime: np.ndarray, shaping_bits_vec: np.ndarray,
                   u_partial: np.ndarray, hole_positions: np.ndarray):
    """Fill the reserved holes, completing the transform input.

    Returns ``(extended_payload, u)``: the payload with the shaping bits
    appended (what the downstream stages conceptually transport) and the
    completed transform input.
    """
    shaping_bits_vec = np.asarray(shaping_bits_vec, dtype=np.int8)
    if shaping_bits_vec.size != hole_positions.size:
        raise ValueError("shaping bit count does not match hole count")
    u = np.asarray(u_partial, dtype=np.int8).copy()
    u[hole_positions] = shaping_bits_vec
    extended = np.concatenate([np.asarray(c_prime, dtype=np.int8), shaping_bits_vec])
    return extended, u


def modified_triangular_perm(tx_len: int, mod_bits: int,
                             segment_origin: np.ndarray) -> np.ndarray:
    """Triangular permutation with swaps that pin the shaped bits.

    ``segment_origin[i]`` marks rate-matched positions that descend from
    the shaped codeword tail.  Output positions on bit levels 3 and 4
    (1-based within each symbol) must carry exactly those bits; scanning
    the targets in order, any mismatch is swapped with the lowest
    non-target position currently holding a segment bit.  Positions the
    standard pattern already satisfies are left alone.
    """
    origin = np.asarray(segment_origin, dtype=bool)
    if origin.size != tx_len:
        raise ValueError("origin mask length must equal tx_len")
    perm = chain.triangular_perm(tx_len).copy()
    level = np.arange(tx_len) % mod_bits
    target = (level == 2) | (level == 3)
    if int(origin.sum()) != int(target.sum()):
        raise ValueError("segment bit count does not match the shaped bit levels")
    donors = [q for q in np.flatnonzero(~target) if origin[perm[q]]]
    di = 0
    for pos in np.flatnonzero(target):
        if origin[perm[pos]]:
            continue
        q = donors[di]
        di += 1
        perm[pos], perm[q] = perm[q], perm[pos]
    assert di == len(donors)
    return perm


@dataclass(frozen=True)
class CalibrationTable:
    """Measured shaping-bit count vs. achieved ones probability.

    Rows come from Monte-Carlo precoding runs; the stored curve is the
    isotonic (non-increasing) projection of the raw averages so lookups
    are monotone.  The zero-shaping row is exactly 0.5: without holes the
    codeword is a bijection of uniform bits.
    """

    mother_len: int
    mod_bits: int
    list_size: int
    s_values: np.ndarray
    p_hat: np.ndarray
    realizations: np.ndarray

    def lookup_p(self, num_shaping: int) -> float:
        if num_shaping < 0 or num_shaping > self.s_values.max():
            raise ValueError(f"shaping bit count {num_shaping} outside table range")
        exact = np.flatnonzero(self.s_values == num_shaping)
        if exact.size:
            return float(self.p_hat[exact[0]])
        return float(np.interp(num_shaping, self.s_values, self.p_hat))

    def lookup_s(self, ones_prob: float) -> int:
        return int(self.s_values[np.argmin(np.abs(self.p_hat - ones_prob))])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["S", "p_hat", "realizations"])
            for s, p, r in zip(self.s_values, self.p_hat, self.realizations):
                w.writerow([int(s), f"{p:.6f}", int(r)])

    @classmethod
    def from_rows(cls, mother_len, mod_bits, list_size, s_values, p_raw,
                  realizations) -> "CalibrationTable":
        s_values = np.asarray(s_values, dtype=np.int64)
        order = np.argsort(s_values)
        s_values = s_values[order]
        p = np.asarray(p_raw, dtype=np.float64)[order]
        p = isotonic_regression(p, increasing=False).x
        reals = np.asarray(realizations, dtype=np.int64)[order]
        return cls(mother_len, mod_bits, list_size, s_values, p, reals)

    @classmethod
    def from_csv_text(cls, text: str, mother_len: int, mod_bits: int,
                      list_size: int) -> "CalibrationTable":
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ValueError("empty calibration table")
        return cls.from_rows(
            mother_len, mod_bits, list_size,
            [int(r["S"]) for r in rows],
            [float(r["p_hat"]) for r in rows],
            [int(r["realizations"]) for r in rows])

    @classmethod
    def load(cls, mother_len: int, mod_bits: int, list_size: int,
             path=None) -> "CalibrationTable":
        if path is not None:
            text = Path(path).read_text()
        else:
            name = f"calibration_{mother_len}_{mod_bits}_{list_size}.csv"
            res = resources.files("polarshaping.data").joinpath(name)
            if not res.is_file():
                raise FileNotFoundError(
                    f"no packaged calibration table {name}; run the "
                    f"'calibrate' command and pass its output path")
            text = res.read_text()
        return cls.from_csv_text(text, mother_len, mod_bits, list_size)


def calibrate_s_to_p(mother_len: int, mod_bits: int, num_shaping: int,
                     num_realizations: int = 500, list_size: int = 8,
                     seed: int = 0) -> float:
    """Average ones fraction of the shaped segment at one shaping count.

    Follows the offline procedure: fill every non-hole position of the
    segment with fresh random bits, precode, transform, and average the
    ones density over realizations.  The scrambler is left at zero (the
    XOR makes the statistic scrambler-independent) and the precoder LLR
    magnitude is immaterial because every input has the same magnitude.
    """
    if num_realizations < 1:
        raise ValueError("num_realizations must be at least 1")
    if num_shaping == 0:
        return 0.5
    segment_len = mother_len // (mod_bits // 2)
    seg_start = mother_len - segment_len
    seq = tables.reliability_sequence(mother_len)
    holes = shaping_set(seq, mother_len, mod_bits, num_shaping) - seg_start
    hole_mask = np.zeros(segment_len, dtype=bool)
    hole_mask[holes] = True
    zeros = np.zeros(segment_len, dtype=np.int8)
    rng = np.random.default_rng(np.random.SeedSequence(
        entropy=(seed, mother_len, mod_bits, num_shaping)))
    ones = 0
    for _ in range(num_realizations):
        u_seg = rng.integers(0, 2, segment_len).astype(np.int8)
        bits = precode_shaping(u_seg, hole_mask, zeros, 0.25, list_size)
        u_seg[holes] = bits
        ones += int(polar_transform(u_seg).sum())
    return ones / (num_realizations * segment_len)


def calibrate_sweep(mother_len: int, mod_bits: int, s_values=None,
                    num_realizations: int = 500, list_size: int = 8,
                    seed: int = 0, workers: int = 1) -> CalibrationTable:
    """Calibration table over a range of shaping-bit counts."""
    segment_len = mother_len // (mod_bits // 2)
    if s_values is None:
        s_values = np.arange(segment_len + 1)
    s_values = np.asarray(s_values, dtype=np.int64)
    if s_values[0] != 0:
        s_values = np.concatenate([[0], s_values])

    def one(s):
        return calibrate_s_to_p(mother_len, mod_bits, int(s),
                                num_realizations, list_size, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            p_raw = list(pool.map(one, s_values))
    else:
        p_raw = [one(s) for s in s_values]
    return CalibrationTable.from_rows(
        mother_len, mod_bits, list_size, s_values, p_raw,
        np.full(s_values.size, num_realizations))


@dataclass(frozen=True)
class ChainSetup:
    """Precomputed state for encoding/decoding one configuration."""

    config: CodeConfig
    const: Constellation
    info_positions: np.ndarray
    hole_positions: np.ndarray
    rx_pattern: FrozenPattern
    sb_perm: np.ndarray
    sb_inv: np.ndarray
    sel_idx: np.ndarray
    cb_perm: np.ndarray
    cb_inv: np.ndarray
    scramble_seq: np.ndarray
    equiv_seq: Optional[np.ndarray]
    ones_prob: float
    avg_power: float

    @property
    def segment_start(self) -> int:
        return self.config.mother_len - self.config.shaped_segment_len

    @property
    def hole_mask_segment(self) -> np.ndarray:
        mask = np.zeros(self.config.shaped_segment_len, dtype=bool)
        mask[self.hole_positions - self.segment_start] = True
        return mask


def make_chain(config: CodeConfig,
               calibration: Union[CalibrationTable, float, None] = None) -> ChainSetup:
    """Resolve tables, permutations and the demapper prior for a config.

    ``calibration`` may be a loaded table, an explicit ones-probability
    (useful for experiments at uncalibrated lengths), or None to load the
    packaged table when shaping is enabled.
    """
    from .analysis import avg_power as shaped_avg_power  # local: avoid cycle

    N, E, S = config.mother_len, config.tx_len, config.shaping_bits
    seq = tables.reliability_sequence(N)
    const = get_constellation(config.mod_bits)

    if S == 0:
        info_positions, _ = chain.build_frozen_sets(N, config.info_len)
        holes = np.empty(0, dtype=np.int64)
        ones_prob = 0.5
    else:
        _, info_positions, holes = build_u_prime(
            np.zeros(config.info_len, dtype=np.int8), config, seq)
        if isinstance(calibration, (int, float)):
            ones_prob = float(calibration)
        else:
            table = calibration if calibration is not None else \
                CalibrationTable.load(N, config.mod_bits, config.precoder_list_size)
            ones_prob = table.lookup_p(S)
        if not 0 < ones_prob <= 0.5:
            raise ValueError(f"calibrated ones probability {ones_prob} out of range")

    sb_perm = chain.subblock_perm(N)
    sel_idx = chain.selection_indices(N, E, config.info_len)
    if S == 0:
        cb_perm = chain.triangular_perm(E)
    else:
        origin = sb_perm[sel_idx] >= N - config.shaped_segment_len
        cb_perm = modified_triangular_perm(E, config.mod_bits, origin)

    scramble_seq = chain.generate_scrambler(config.scrambler_seed, E)
    equiv_seq = (equivalent_scrambler(scramble_seq, sb_perm, cb_perm)
                 if E == N else None)

    free = np.sort(np.concatenate([info_positions, holes]))
    rx_pattern = FrozenPattern.from_free_positions(N, free)

    return ChainSetup(
        config=config,
        const=const,
        info_positions=info_positions,
        hole_positions=holes,
        rx_pattern=rx_pattern,
        sb_perm=sb_perm,
        sb_inv=np.argsort(sb_perm),
        sel_idx=sel_idx,
        cb_perm=cb_perm,
        cb_inv=np.argsort(cb_perm),
        scramble_seq=scramble_seq,
        equiv_seq=equiv_seq,
        ones_prob=ones_prob,
        avg_power=shaped_avg_power(config.mod_bits, ones_prob),
    )


def shaped_encode(payload: np.ndarray, setup: ChainSetup,
                  trace: bool = False):
    """Full transmit pipeline from payload bits to channel symbols.

    With shaping disabled this is exactly the conventional chain (CRC,
    payload interleaving, polar transform, sub-block interleaving, bit
    selection, triangular interleaving, scrambling, QAM mapping); with
    shaping on, the precoder fills the reserved holes before the
    transform and the modified interleaver is used.
    """
    cfg = setup.config
    payload = np.asarray(payload, dtype=np.int8)
    if payload.size != cfg.payload_len:
        raise ValueError(f"payload must have {cfg.payload_len} bits")
    c = crc_attach(payload)
    c_prime = chain.polar_interleave(c)
    u = np.zeros(cfg.mother_len, dtype=np.int8)
    u[setup.info_positions] = c_prime
    if cfg.shaping_bits > 0:
        seg = u[setup.segment_start:]
        s_bits = precode_shaping(seg, setup.hole_mask_segment,
                                 setup.equiv_seq[setup.segment_start:],
                                 setup.ones_prob, cfg.precoder_list_size)
        _, u = insert_shaping(c_prime, s_bits, u, setup.hole_positions)
    d = polar_transform(u)
    y = d[setup.sb_perm]
    e = y[setup.sel_idx]
    f = e[setup.cb_perm]
    b = chain.scramble(f, setup.scramble_seq)
    x = qam_map(b, setup.const)
    if trace:
        return x, {"u": u, "d": d, "y": y, "e": e, "f": f, "b": b}
    return x
