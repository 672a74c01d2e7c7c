"""Gray-labelled square QAM on the odd-integer grid, with soft demapping.

Constellation points take real and imaginary parts in
{+-1, +-3, ..., +-(2^(M/2)-1)}; no normalisation is applied (the link
SNR definition absorbs the scale).  Odd-numbered label bits drive the
in-phase axis, even-numbered bits the quadrature axis.  Bit levels 3 and
4 (1-based) select the amplitude class of the two axes: a 1 there puts
|Re| respectively |Im| above 2^(M/2-1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ._scl import LLR_CAP

__all__ = ["Constellation", "qam_map", "qam_demap", "MAG_BIT_RE", "MAG_BIT_IM"]

MAG_BIT_RE = 3  # 1-based bit level deciding the |Re| amplitude class
MAG_BIT_IM = 4


def _pam_amplitude(bits: np.ndarray) -> int:
    """Signed amplitude of one axis from its label bits (sign bit first)."""
    def magnitude(rest):
        if rest.size == 0:
            return 1
        return (1 << rest.size) - (1 - 2 * int(rest[0])) * magnitude(rest[1:])
    return (1 - 2 * int(bits[0])) * magnitude(bits[1:])


@dataclass(frozen=True)
class Constellation:
    """Lookup tables for one modulation order.

    ``points[i]`` is the complex symbol whose label bits are the binary
    expansion of ``i`` (first label bit = most significant).  ``pam_amps``
    and ``pam_bits`` describe a single axis the same way.
    """

    mod_bits: int
    points: np.ndarray        # (2**M,) complex128
    bit_table: np.ndarray     # (2**M, M) int8
    pam_amps: np.ndarray      # (2**(M/2),) float64, signed amplitudes
    pam_bits: np.ndarray      # (2**(M/2), M/2) int8

    @classmethod
    def make(cls, mod_bits: int) -> "Constellation":
        if mod_bits < 4 or mod_bits % 2:
            raise ValueError(f"mod_bits must be an even number >= 4, got {mod_bits}")
        half = mod_bits // 2
        pam_bits = ((np.arange(1 << half)[:, None] >> np.arange(half - 1, -1, -1)) & 1)
        pam_bits = pam_bits.astype(np.int8)
        pam_amps = np.array([_pam_amplitude(row) for row in pam_bits], dtype=np.float64)

        bit_table = ((np.arange(1 << mod_bits)[:, None]
                      >> np.arange(mod_bits - 1, -1, -1)) & 1).astype(np.int8)
        i_idx = np.zeros(1 << mod_bits, dtype=np.int64)
        q_idx = np.zeros(1 << mod_bits, dtype=np.int64)
        for j in range(half):
            i_idx = (i_idx << 1) | bit_table[:, 2 * j]
            q_idx = (q_idx << 1) | bit_table[:, 2 * j + 1]
        points = pam_amps[i_idx] + 1j * pam_amps[q_idx]

        for arr in (points, bit_table, pam_amps, pam_bits):
            arr.flags.writeable = False
        return cls(mod_bits, points, bit_table, pam_amps, pam_bits)

    @property
    def inner_threshold(self) -> float:
        return float(1 << (self.mod_bits // 2 - 1))

    def average_power(self, point_probs=None) -> float:
        probs = (np.full(self.points.size, 1.0 / self.points.size)
                 if point_probs is None else np.asarray(point_probs, float))
        return float(np.sum(probs * np.abs(self.points) ** 2))


_CACHE: dict[int, Constellation] = {}


def get_constellation(mod_bits: int) -> Constellation:
    if mod_bits not in _CACHE:
        _CACHE[mod_bits] = Constellation.make(mod_bits)
    return _CACHE[mod_bits]


def qam_map(bits, const: Constellation) -> np.ndarray:
    """Map a bit vector to symbols, M consecutive bits per symbol."""
    bits = np.asarray(bits, dtype=np.int64)
    m = const.mod_bits
    if bits.size % m:
        raise ValueError(f"bit count {bits.size} not divisible by {m}")
    groups = bits.reshape(-1, m)
    idx = groups @ (1 << np.arange(m - 1, -1, -1, dtype=np.int64))
    return const.points[idx]


def _axis_log_prior(const: Constellation, ones_prob: float) -> np.ndarray:
    """Log prior over one axis: amplitude class `outer` has mass ones_prob."""
    half = const.mod_bits // 2
    outer = np.abs(const.pam_amps) > const.inner_threshold
    per_inner = (1.0 - ones_prob) / (1 << (half - 1))
    per_outer = ones_prob / (1 << (half - 1))
    return np.log(np.where(outer, per_outer, per_inner))


def qam_demap(received, const: Constellation, noise_var: float,
              ones_prob: float = 0.5) -> np.ndarray:
    """Per-bit LLRs (natural log, positive favours 0) for received symbols.

    ``noise_var`` is the total complex noise variance.  ``ones_prob`` is
    the prior probability that a magnitude-class bit (levels 3 and 4) is
    one; all remaining bit levels are uniform, which makes the symbol
    prior separable per axis and lets the demapper work on one PAM axis
    at a time.  Exact reference evaluation over all 2^M points is
    available for testing via :func:`demap_reference`.
    """
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    if not 0 < ones_prob <= 0.5:
        raise ValueError("ones_prob must lie in (0, 0.5]")
    r = np.asarray(received, dtype=np.complex128)
    half = const.mod_bits // 2
    log_prior = _axis_log_prior(const, ones_prob)

    llr = np.empty((r.size, const.mod_bits), dtype=np.float64)
    for axis, comp in ((0, r.real), (1, r.imag)):
        # (num_symbols, num_amps) joint log weights for this axis
        w = log_prior[None, :] - (comp[:, None] - const.pam_amps[None, :]) ** 2 / noise_var
        for j in range(half):
            zero = const.pam_bits[:, j] == 0
            llr[:, 2 * j + axis] = (logsumexp(w[:, zero], axis=1)
                                    - logsumexp(w[:, ~zero], axis=1))
    return np.clip(llr.reshape(-1), -LLR_CAP, LLR_CAP)


def demap_reference(received, const: Constellation, noise_var: float,
                    point_probs) -> np.ndarray:
    """Direct-sum demapper over all constellation points (test oracle)."""
    if noise_var <= 0:
        raise ValueError("noise_var must be positive")
    r = np.asarray(received, dtype=np.complex128)
    logp = np.log(np.asarray(point_probs, dtype=np.float64))
    w = logp[None, :] - np.abs(r[:, None] - const.points[None, :]) ** 2 / noise_var
    llr = np.empty((r.size, const.mod_bits), dtype=np.float64)
    for j in range(const.mod_bits):
        zero = const.bit_table[:, j] == 0
        llr[:, j] = logsumexp(w[:, zero], axis=1) - logsumexp(w[:, ~zero], axis=1)
    return llr.reshape(-1)
