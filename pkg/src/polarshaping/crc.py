"""24-bit CRC used for codeword selection and error detection.

Generator x^24+x^23+x^21+x^20+x^17+x^15+x^13+x^12+x^8+x^4+x^2+x+1,
zero-initialised register, no final XOR, no identity masking.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["CRC_LEN", "CRC_POLY_EXPONENTS", "crc_bits", "crc_attach", "crc_check"]

CRC_LEN = 24
CRC_POLY_EXPONENTS = (24, 23, 21, 20, 17, 15, 13, 12, 8, 4, 2, 1, 0)

# generator coefficients from x^23 down to x^0 (the x^24 term is implicit
# in the shift-register feedback)
_POLY_TAPS = np.zeros(CRC_LEN, dtype=np.int8)
for _e in CRC_POLY_EXPONENTS:
    if _e < CRC_LEN:
        _POLY_TAPS[CRC_LEN - 1 - _e] = 1
_POLY_TAPS.flags.writeable = False


@njit(cache=True, nogil=True)
def _crc_remainder(bits, taps):
    reg = np.zeros(taps.size, dtype=np.int8)
    for k in range(bits.size):
        fb = reg[0] ^ bits[k]
        for i in range(taps.size - 1):
            reg[i] = reg[i + 1] ^ (fb & taps[i])
        reg[taps.size - 1] = fb & taps[taps.size - 1]
    return reg


def crc_bits(payload) -> np.ndarray:
    """CRC parity bits for a payload, highest-degree bit first."""
    bits = np.ascontiguousarray(payload, dtype=np.int8)
    if bits.size == 0:
        raise ValueError("payload must be non-empty")
    return _crc_remainder(bits, _POLY_TAPS)


def crc_attach(payload) -> np.ndarray:
    """Return payload with its 24 parity bits appended."""
    bits = np.ascontiguousarray(payload, dtype=np.int8)
    return np.concatenate([bits, crc_bits(bits)])


def crc_check(codeword) -> bool:
    """True when the trailing parity bits match the leading payload."""
    bits = np.ascontiguousarray(codeword, dtype=np.int8)
    if bits.size <= CRC_LEN:
        raise ValueError(f"codeword must be longer than {CRC_LEN} bits")
    expected = crc_bits(bits[:-CRC_LEN])
    return bool(np.array_equal(expected, bits[-CRC_LEN:]))
