"""Polar-coded modulation with integrated probabilistic shaping.

Library layout:

* :mod:`polarshaping.polar` - polar transform and SCL decoding
* :mod:`polarshaping.chain` - CRC-era chain stages (interleavers,
  rate matching, scrambling)
* :mod:`polarshaping.modulation` - Gray QAM mapping and soft demapping
* :mod:`polarshaping.shaping` - precoder, modified interleaver,
  calibration, full transmit pipeline
* :mod:`polarshaping.analysis` - shaped PMF, entropies, achievable rates
* :mod:`polarshaping.simulate` - AWGN Monte-Carlo BLER engine
* :mod:`polarshaping.cli` - command-line interface
"""

from .analysis import (RatePoint, ShapedPmf, achievable_rate_bmd,
                       asymptotic_shaping_bits, avg_power, binary_entropy,
                       optimize_p, shaped_pmf, symbol_entropy)
from .config import CodeConfig
from .crc import crc_attach, crc_check
from .modulation import Constellation, get_constellation, qam_demap, qam_map
from .polar import (DecodeCandidate, FrozenPattern, crc_select,
                    polar_transform, scl_decode)
from .shaping import (CalibrationTable, ChainSetup, calibrate_s_to_p,
                      calibrate_sweep, make_chain, shaped_encode)
from .simulate import (ChannelSample, SimResult, awgn, receiver_decode,
                       required_snr, run_bler, sweep_shaping_bits)

__version__ = "0.1.0"

__all__ = [
    "CodeConfig", "FrozenPattern", "DecodeCandidate", "polar_transform",
    "scl_decode", "crc_select", "crc_attach", "crc_check",
    "Constellation", "get_constellation", "qam_map", "qam_demap",
    "ShapedPmf", "shaped_pmf", "binary_entropy", "symbol_entropy",
    "avg_power", "asymptotic_shaping_bits", "RatePoint",
    "achievable_rate_bmd", "optimize_p",
    "CalibrationTable", "ChainSetup", "make_chain", "shaped_encode",
    "calibrate_s_to_p", "calibrate_sweep",
    "ChannelSample", "SimResult", "awgn", "receiver_decode", "run_bler",
    "required_snr", "sweep_shaping_bits",
    "__version__",
]
