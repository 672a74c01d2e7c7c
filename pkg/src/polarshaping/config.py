"""Validated parameter records for a transmission."""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["CodeConfig"]

_ALLOWED_MOD_BITS = (4, 8)


@dataclass(frozen=True)
class CodeConfig:
    """All chain parameters for one transport block.

    ``shaping_bits == 0`` is the conventional chain; a positive count
    switches on the precoder, the modified code-bit interleaver and the
    non-uniform demapper prior, and requires ``tx_len == mother_len``.
    """

    payload_len: int                 # information bits per block
    mother_len: int = 1024           # polar transform length, power of two
    tx_len: int = 1024               # transmitted bits after rate matching
    mod_bits: int = 8                # bits per QAM symbol (4 or 8)
    shaping_bits: int = 0
    crc_len: int = 24
    list_size: int = 8               # receiver SCL list
    precoder_list_size: int = 8
    scrambler_seed: int | str = "zeros"

    def __post_init__(self):
        N = self.mother_len
        if N < 2 or N > 1024 or N & (N - 1):
            raise ValueError(f"mother_len must be a power of two in [2, 1024], got {N}")
        if self.payload_len < 1:
            raise ValueError("payload_len must be positive")
        if self.crc_len != 24:
            raise ValueError("only the 24-bit CRC is supported")
        if self.mod_bits not in _ALLOWED_MOD_BITS:
            raise ValueError(f"mod_bits must be one of {_ALLOWED_MOD_BITS}")
        if self.tx_len < 1 or self.tx_len % self.mod_bits:
            raise ValueError("tx_len must be positive and divisible by mod_bits")
        if self.info_len > N:
            raise ValueError(f"payload+crc ({self.info_len}) exceeds mother_len {N}")
        if self.list_size < 1 or self.precoder_list_size < 1:
            raise ValueError("list sizes must be at least 1")
        S = self.shaping_bits
        if S < 0:
            raise ValueError("shaping_bits must be non-negative")
        if S > 0:
            if self.tx_len != N:
                raise ValueError("shaping requires tx_len == mother_len "
                                 "(no puncturing, shortening or repetition)")
            if S > self.shaped_segment_len:
                raise ValueError(f"shaping_bits {S} exceeds the shaped segment "
                                 f"length {self.shaped_segment_len}")
            if self.info_len + S > N:
                raise ValueError("payload+crc+shaping bits exceed mother_len")

    @property
    def info_len(self) -> int:
        """Payload plus CRC bits."""
        return self.payload_len + self.crc_len

    @property
    def shaped_segment_len(self) -> int:
        """Length of the trailing codeword segment the precoder controls."""
        return self.mother_len // (self.mod_bits // 2)

    @property
    def num_symbols(self) -> int:
        return self.tx_len // self.mod_bits
