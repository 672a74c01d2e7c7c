"""Information-theoretic quantities for the shaped QAM input.

Entropies and rates are in bits (log2); demapper LLRs elsewhere use the
natural log.  Achievable rate under bit-metric decoding is

    rate = H(X) - sum_j H(B_j | R)

evaluated on the AWGN channel r = x + w with the signal-to-noise ratio
defined as E|X|^2 / E|W|^2, so the noise variance at a given snr follows
the (shaping-dependent) average transmit power.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .modulation import Constellation, get_constellation

__all__ = [
    "ShapedPmf",
    "shaped_pmf",
    "binary_entropy",
    "symbol_entropy",
    "avg_power",
    "asymptotic_shaping_bits",
    "RatePoint",
    "achievable_rate_bmd",
    "optimize_p",
]


@dataclass(frozen=True)
class ShapedPmf:
    """Three-level symbol distribution from biasing one bit per axis.

    Points whose |Re| and |Im| both stay below the axis midpoint carry
    (1-p)^2 / 2^(M-2) each, both-above points p^2 / 2^(M-2), and mixed
    points p(1-p) / 2^(M-2).  p = 0.5 recovers the uniform constellation.
    """

    mod_bits: int
    ones_prob: float
    point_probs: np.ndarray  # aligned with Constellation.points

    @property
    def constellation(self) -> Constellation:
        return get_constellation(self.mod_bits)


def shaped_pmf(mod_bits: int, ones_prob: float) -> ShapedPmf:
    if mod_bits not in (4, 8):
        raise ValueError(f"mod_bits must be 4 or 8, got {mod_bits}")
    if not 0 < ones_prob <= 0.5:
        raise ValueError(f"ones_prob must lie in (0, 0.5], got {ones_prob}")
    const = get_constellation(mod_bits)
    thr = const.inner_threshold
    outer_re = np.abs(const.points.real) > thr
    outer_im = np.abs(const.points.imag) > thr
    p = ones_prob
    scale = 1 << (mod_bits - 2)
    probs = np.where(outer_re & outer_im, p * p,
                     np.where(~outer_re & ~outer_im, (1 - p) * (1 - p),
                              p * (1 - p))) / scale
    probs.flags.writeable = False
    return ShapedPmf(mod_bits, float(ones_prob), probs)


def binary_entropy(p) -> float | np.ndarray:
    p = np.asarray(p, dtype=np.float64)
    out = np.zeros_like(p)
    mask = (p > 0) & (p < 1)
    pm = p[mask]
    out[mask] = -pm * np.log2(pm) - (1 - pm) * np.log2(1 - pm)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    return float(out) if out.ndim == 0 else out


def symbol_entropy(mod_bits: int, ones_prob: float) -> float:
    """H(X) of the shaped constellation: (M - 2) + 2 h2(p)."""
    if not 0 < ones_prob <= 0.5:
        raise ValueError("ones_prob must lie in (0, 0.5]")
    return (mod_bits - 2) + 2 * binary_entropy(ones_prob)


def avg_power(mod_bits: int, ones_prob: float) -> float:
    """Mean |X|^2; decreases as the outer amplitude classes thin out."""
    const = get_constellation(mod_bits)
    amps = np.abs(const.pam_amps)
    inner = amps[amps < const.inner_threshold]
    outer = amps[amps > const.inner_threshold]
    per_dim = (1 - ones_prob) * np.mean(inner ** 2) + ones_prob * np.mean(outer ** 2)
    return float(2 * per_dim)


def asymptotic_shaping_bits(mother_len: int, mod_bits: int, ones_prob: float) -> int:
    """Shaping-bit count that achieves ones-probability p in the infinite-
    length limit: floor(segment_len * (1 - h2(p)))."""
    segment = mother_len // (mod_bits // 2)
    return int(np.floor(segment * (1.0 - binary_entropy(ones_prob))))


@dataclass(frozen=True)
class RatePoint:
    snr_linear: float
    ones_prob: float
    rate: float          # bits per channel use, clamped at 0
    error_estimate: float


def _axis_tables(const: Constellation, ones_prob: float):
    half = const.mod_bits // 2
    amps = const.pam_amps
    outer = np.abs(amps) > const.inner_threshold
    probs = np.where(outer, ones_prob, 1.0 - ones_prob) / (1 << (half - 1))
    return amps, probs, const.pam_bits


def _rate_gauss_hermite(const: Constellation, ones_prob: float,
                        noise_var: float, order: int) -> float:
    """Per-axis conditional bit entropies via Gauss-Hermite quadrature.

    The axis priors are independent, so each H(B_j|R) reduces to a 1-D
    integral over the matching received component.
    """
    amps, probs, bits = _axis_tables(const, ones_prob)
    half = const.mod_bits // 2
    nodes, weights = np.polynomial.hermite.hermgauss(order)
    # E over r = a + w, w ~ N(0, nv/2) per axis: r = a + sqrt(nv) * node
    r = amps[:, None] + np.sqrt(noise_var) * nodes[None, :]      # (A, Q)
    logw = (np.log(probs)[None, :, None]
            - (r[:, None, :] - amps[None, :, None]) ** 2 / noise_var)  # (A, A', Q)
    log_den = logsumexp(logw, axis=1)                             # (A, Q)
    cond_bits = 0.0
    for j in range(half):
        sel = bits[:, j][None, :, None] == bits[:, j][:, None, None]
        log_num = logsumexp(np.where(sel, logw, -np.inf), axis=1)
        # -E log2 P(true bit | r), averaged over amplitudes and noise
        h = -(log_num - log_den) / np.log(2.0)
        cond_bits += np.sum(probs[:, None] * h * weights[None, :]) / np.sqrt(np.pi)
    h_axis = half - 1 + binary_entropy(ones_prob)
    return 2.0 * (h_axis - cond_bits)


def _rate_monte_carlo(const: Constellation, ones_prob: float, noise_var: float,
                      samples: int, seed: int) -> tuple[float, float]:
    """Cross-check integrator on the full 2-D constellation."""
    pmf = shaped_pmf(const.mod_bits, ones_prob)
    rng = np.random.default_rng(seed)
    logp = np.log(pmf.point_probs)
    m = const.mod_bits
    total = 0.0
    total_sq = 0.0
    done = 0
    chunk = max(1, min(samples, 1 << 15))
    while done < samples:
        k = min(chunk, samples - done)
        idx = rng.choice(const.points.size, size=k, p=pmf.point_probs)
        w = rng.normal(scale=np.sqrt(noise_var / 2), size=(k, 2))
        r = const.points[idx] + w[:, 0] + 1j * w[:, 1]
        logw = logp[None, :] - np.abs(r[:, None] - const.points[None, :]) ** 2 / noise_var
        log_den = logsumexp(logw, axis=1)
        info = np.zeros(k)
        for j in range(m):
            true_bit = const.bit_table[idx, j]
            match = const.bit_table[:, j][None, :] == true_bit[:, None]
            log_num = logsumexp(np.where(match, logw, -np.inf), axis=1)
            info += (log_num - log_den) / np.log(2.0)
        total += float(np.sum(info))
        total_sq += float(np.sum(info ** 2))
        done += k
    mean = total / samples
    var = max(total_sq / samples - mean ** 2, 0.0)
    h_x = symbol_entropy(m, ones_prob)
    return h_x + mean, 2 * np.sqrt(var / samples)


def achievable_rate_bmd(mod_bits: int, ones_prob: float, snr_linear: float,
                        method: str = "gauss-hermite", order: int = 24,
                        samples: int = 100_000, seed: int = 0) -> RatePoint:
    """Bit-metric-decoding rate of the shaped constellation at one SNR.

    ``method`` is "gauss-hermite" (deterministic, default) or
    "monte-carlo" (independent estimator used for cross-checks).
    """
    if snr_linear <= 0:
        raise ValueError("snr must be positive")
    if not 0 < ones_prob <= 0.5:
        raise ValueError("ones_prob must lie in (0, 0.5]")
    const = get_constellation(mod_bits)
    noise_var = avg_power(mod_bits, ones_prob) / snr_linear
    if method == "gauss-hermite":
        rate = _rate_gauss_hermite(const, ones_prob, noise_var, order)
        err = 0.0
    elif method == "monte-carlo":
        rate, err = _rate_monte_carlo(const, ones_prob, noise_var, samples, seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    return RatePoint(float(snr_linear), float(ones_prob), max(rate, 0.0), err)


_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def optimize_p(mod_bits: int, snr_linear: float, tolerance: float = 1e-3,
               order: int = 24) -> float:
    """Golden-section maximiser of the rate over p in (0, 0.5]."""
    def f(p):
        return achievable_rate_bmd(mod_bits, p, snr_linear, order=order).rate

    lo, hi = 1e-4, 0.5
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tolerance:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = f(x1)
    best = (lo + hi) / 2
    # the boundary p = 0.5 is a valid maximiser the bracket cannot reach
    if f(0.5) >= f(best):
        return 0.5
    return float(best)
