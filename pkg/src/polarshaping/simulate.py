"""AWGN Monte-Carlo link simulation: transmit, receive, estimate BLER.

Every trial owns an RNG stream derived from (master seed, SNR index,
trial index), and early stopping is only evaluated on fixed-size batch
boundaries, so results are bit-identical regardless of worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence, Union

import numpy as np

from . import chain
from ._scl import LLR_CAP
from .config import CodeConfig
from .crc import crc_check
from .modulation import qam_demap
from .polar import crc_select, scl_decode
from .shaping import (CalibrationTable, ChainSetup, make_chain,
                      precode_shaping, shaped_encode)

__all__ = [
    "ChannelSample",
    "SimResult",
    "awgn",
    "receiver_decode",
    "run_bler",
    "required_snr",
    "sweep_shaping_bits",
]

BATCH_SIZE = 250  # stopping decisions happen on these boundaries


@dataclass(frozen=True)
class ChannelSample:
    received: np.ndarray
    noise_var: float  # total variance per complex symbol

    def __post_init__(self):
        if self.noise_var < 0:
            raise ValueError("noise variance must be non-negative")


@dataclass(frozen=True)
class SimResult:
    snr_db: float
    trials: int
    block_errors: int
    bler: float
    ci95: float
    wall_time_s: float


def awgn(symbols: np.ndarray, snr_linear: float, average_power: float,
         rng: np.random.Generator) -> ChannelSample:
    """Add circular complex Gaussian noise at the given SNR.

    The SNR is signal power over noise power, so the total noise variance
    per symbol is ``average_power / snr_linear``.
    """
    if snr_linear <= 0:
        raise ValueError("snr must be positive")
    x = np.asarray(symbols, dtype=np.complex128)
    noise_var = average_power / snr_linear
    scale = np.sqrt(noise_var / 2.0)
    w = rng.normal(scale=scale, size=x.size) + 1j * rng.normal(scale=scale, size=x.size)
    return ChannelSample(x + w, float(noise_var))


def _recover_rate_matching(llr_f: np.ndarray, setup: ChainSetup) -> np.ndarray:
    """Undo bit selection: combine repeats, neutral-fill punctures,
    saturate shortened positions towards bit zero."""
    cfg = setup.config
    N, E = cfg.mother_len, cfg.tx_len
    if E >= N:
        llr_y = np.zeros(N)
        np.add.at(llr_y, setup.sel_idx, llr_f)
    elif cfg.info_len / E <= 7 / 16:
        llr_y = np.zeros(N)
        llr_y[setup.sel_idx] = llr_f
    else:
        llr_y = np.full(N, LLR_CAP)
        llr_y[setup.sel_idx] = llr_f
    return np.clip(llr_y, -LLR_CAP, LLR_CAP)


def receiver_decode(sample: ChannelSample, setup: ChainSetup,
                    check_shaping: bool = False):
    """Demap, unwind the chain, list-decode and CRC-select.

    Returns ``(payload_or_None, detected_ok)``.  The decoder treats the
    shaping holes as extra information positions and drops them after
    selection.  With ``check_shaping`` the precoder is re-run on the
    decoded bits and the result compared against the received shaping
    bits as an extra error-detection stage.

    End-to-end operation targets tx_len >= mother_len: the frozen set is
    built purely from the reliability order, without the rate-matching
    aware pre-freezing a standards decoder would add, so punctured or
    shortened blocks are recovered only on a best-effort basis.
    """
    cfg = setup.config
    llr_b = qam_demap(sample.received, setup.const, sample.noise_var,
                      setup.ones_prob)
    llr_f = (1.0 - 2.0 * setup.scramble_seq) * llr_b
    llr_e = llr_f[setup.cb_inv]
    llr_y = _recover_rate_matching(llr_e, setup)
    llr_d = llr_y[setup.sb_inv]

    candidates = scl_decode(llr_d, setup.rx_pattern, cfg.list_size)

    def payload_crc_ok(info_bits: np.ndarray) -> bool:
        return crc_check(chain.polar_deinterleave(info_bits))

    best = crc_select(candidates, setup.info_positions, payload_crc_ok)
    if best is None:
        return None, False

    c_prime = best.u_hat[setup.info_positions]
    payload = chain.polar_deinterleave(c_prime)[:cfg.payload_len]
    ok = True
    if check_shaping and cfg.shaping_bits > 0:
        u = np.zeros(cfg.mother_len, dtype=np.int8)
        u[setup.info_positions] = c_prime
        seg = u[setup.segment_start:]
        expected = precode_shaping(seg, setup.hole_mask_segment,
                                   setup.equiv_seq[setup.segment_start:],
                                   setup.ones_prob, cfg.precoder_list_size)
        ok = bool(np.array_equal(expected, best.u_hat[setup.hole_positions]))
    return payload, ok


def _trial_rng(master_seed: int, snr_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence(entropy=(master_seed, snr_index, trial_index)))


def _run_trial(setup: ChainSetup, snr_linear: float, master_seed: int,
               snr_index: int, trial_index: int) -> bool:
    """True when the trial ends in a block error."""
    rng = _trial_rng(master_seed, snr_index, trial_index)
    payload = rng.integers(0, 2, setup.config.payload_len).astype(np.int8)
    x = shaped_encode(payload, setup)
    sample = awgn(x, snr_linear, setup.avg_power, rng)
    decoded, ok = receiver_decode(sample, setup)
    return decoded is None or not ok or not np.array_equal(decoded, payload)


def run_bler(config_or_setup: Union[CodeConfig, ChainSetup],
             snr_db_list: Sequence[float], max_trials: int,
             target_errors: int = 100, master_seed: int = 0,
             workers: int = 1,
             calibration: Union[CalibrationTable, float, None] = None,
             stop_below: Optional[float] = None) -> list[SimResult]:
    """Estimate BLER per SNR point.

    Each point runs until ``target_errors`` block errors (checked at
    batch boundaries) or ``max_trials``; ``target_errors <= 0`` disables
    early stopping.  ``stop_below`` optionally abandons a point once a
    rough 95% upper bound on its BLER falls under the given value (used
    by the SNR search; off by default).
    """
    if max_trials < 1:
        raise ValueError("max_trials must be at least 1")
    setup = (config_or_setup if isinstance(config_or_setup, ChainSetup)
             else make_chain(config_or_setup, calibration))
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    results = []
    try:
        for snr_index, snr_db in enumerate(snr_db_list):
            snr_linear = 10.0 ** (snr_db / 10.0)
            t0 = time.perf_counter()
            errors = 0
            trials = 0
            while trials < max_trials:
                batch = min(BATCH_SIZE, max_trials - trials)
                idx = range(trials, trials + batch)
                if pool is not None:
                    flags = pool.map(
                        lambda i: _run_trial(setup, snr_linear, master_seed,
                                             snr_index, i), idx)
                else:
                    flags = (_run_trial(setup, snr_linear, master_seed,
                                        snr_index, i) for i in idx)
                errors += sum(flags)
                trials += batch
                if target_errors > 0 and errors >= target_errors:
                    break
                if stop_below is not None and trials >= 4 * BATCH_SIZE:
                    if (errors + 4) / trials < stop_below:
                        break
            bler = errors / trials
            ci = 1.96 * np.sqrt(max(bler * (1 - bler), 0.0) / trials)
            results.append(SimResult(float(snr_db), trials, errors, bler,
                                     float(ci), time.perf_counter() - t0))
    finally:
        if pool is not None:
            pool.shutdown()
    return results


def _point_bler(setup: ChainSetup, snr_db: float, target_bler: float,
                target_errors: int, master_seed: int, workers: int) -> SimResult:
    max_trials = int(np.ceil(2.0 * target_errors / target_bler))
    return run_bler(setup, [snr_db], max_trials=max_trials,
                    target_errors=target_errors, master_seed=master_seed,
                    workers=workers, stop_below=0.6 * target_bler)[0]


def required_snr(config_or_setup: Union[CodeConfig, ChainSetup],
                 target_bler: float, lo_db: float, hi_db: float,
                 tol_db: float = 0.05, target_errors: int = 100,
                 master_seed: int = 0, workers: int = 1,
                 calibration: Union[CalibrationTable, float, None] = None,
                 max_expand: int = 6):
    """Bisect for the SNR that reaches the target BLER.

    Returns ``(snr_db, evaluations)`` where evaluations is the list of
    SimResults inspected.  The initial bracket is widened in 1 dB steps
    if it does not straddle the target.
    """
    setup = (config_or_setup if isinstance(config_or_setup, ChainSetup)
             else make_chain(config_or_setup, calibration))
    evals = []

    def bler_at(snr_db):
        res = _point_bler(setup, snr_db, target_bler, target_errors,
                          master_seed, workers)
        evals.append(res)
        return res.bler

    for _ in range(max_expand):
        if bler_at(lo_db) > target_bler:
            break
        lo_db -= 1.0
    for _ in range(max_expand):
        if bler_at(hi_db) < target_bler:
            break
        hi_db += 1.0
    while hi_db - lo_db > tol_db:
        mid = 0.5 * (lo_db + hi_db)
        if bler_at(mid) > target_bler:
            lo_db = mid
        else:
            hi_db = mid
    return 0.5 * (lo_db + hi_db), evals


def sweep_shaping_bits(base_config: CodeConfig, s_values: Sequence[int],
                       target_bler: float, lo_db: float, hi_db: float,
                       tol_db: float = 0.05, target_errors: int = 100,
                       master_seed: int = 0, workers: int = 1,
                       calibration: Union[CalibrationTable, float, None] = None):
    """Required SNR at the target BLER for each shaping-bit count.

    Returns a list of ``(s, required_snr_db)`` rows.  Brackets are warm
    started from the previous row.
    """
    rows = []
    cur_lo, cur_hi = lo_db, hi_db
    for s in s_values:
        cfg = replace(base_config, shaping_bits=int(s))
        snr_db, _ = required_snr(cfg, target_bler, cur_lo, cur_hi,
                                 tol_db=tol_db, target_errors=target_errors,
                                 master_seed=master_seed, workers=workers,
                                 calibration=calibration)
        rows.append((int(s), float(snr_db)))
        cur_lo, cur_hi = snr_db - 1.5, snr_db + 1.0
    return rows
