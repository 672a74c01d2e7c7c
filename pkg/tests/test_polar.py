"""Polar transform and list decoder against hand values and brute force."""

from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polarshaping import (DecodeCandidate, FrozenPattern, crc_select,
                          polar_transform, scl_decode)


def exhaustive_best(llr, pattern):
    """Independent maximum-likelihood search over all free-bit settings.

    The ML codeword minimises sum(|llr| over positions disagreeing with
    the hard decisions), which is the same quantity the decoder's path
    metric accumulates.
    """
    free = np.flatnonzero(~pattern.frozen_mask)
    hard = (np.asarray(llr) < 0).astype(np.int8)
    best_metric, best_u = None, None
    for assign in product([0, 1], repeat=free.size):
        u = pattern.frozen_values.copy()
        u[free] = assign
        d = polar_transform(u)
        metric = float(np.sum(np.abs(llr) * (d != hard)))
        if best_metric is None or metric < best_metric - 1e-12:
            best_metric, best_u = metric, u
    return best_metric, best_u


class TestPolarTransform:
    def test_all_zero_input(self):
        assert not polar_transform(np.zeros(8, dtype=np.int8)).any()

    def test_kernel_by_hand(self):
        # [0,1] times [[1,0],[1,1]] over GF(2)
        assert polar_transform([0, 1]).tolist() == [1, 1]
        assert polar_transform([1, 0]).tolist() == [1, 0]
        assert polar_transform([1, 1]).tolist() == [0, 1]

    def test_involution_n256(self, rng):
        for _ in range(100):
            u = rng.integers(0, 2, 256).astype(np.int8)
            assert np.array_equal(polar_transform(polar_transform(u)), u)

    @given(st.integers(min_value=1, max_value=10), st.data())
    def test_involution_and_linearity(self, log_n, data):
        n = 1 << log_n
        a = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)),
                     dtype=np.int8)
        b = np.array(data.draw(st.lists(st.integers(0, 1), min_size=n, max_size=n)),
                     dtype=np.int8)
        assert np.array_equal(polar_transform(polar_transform(a)), a)
        assert np.array_equal(polar_transform(a ^ b),
                              polar_transform(a) ^ polar_transform(b))

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            polar_transform([0, 1, 1])


class TestSclDecode:
    def test_n2_frozen_positive_llrs(self):
        # brute force over the two codewords {00, 11}: metrics 0 vs 5
        pattern = FrozenPattern.from_free_positions(2, [1])
        best = scl_decode(np.array([2.0, 3.0]), pattern, 2)[0]
        assert best.u_hat.tolist() == [0, 0]

    def test_n2_frozen_negative_llrs(self):
        # codeword [1,1] (u=[0,1]) wins: mismatch cost 0 vs 3
        pattern = FrozenPattern.from_free_positions(2, [1])
        best = scl_decode(np.array([-1.0, -2.0]), pattern, 2)[0]
        assert best.u_hat.tolist() == [0, 1]

    def test_noiseless_allinfo_n8(self, rng):
        pattern = FrozenPattern.from_free_positions(8, np.arange(8))
        for _ in range(25):
            u = rng.integers(0, 2, 8).astype(np.int8)
            llr = 4.0 * (1 - 2 * polar_transform(u).astype(float))
            best = scl_decode(llr, pattern, 1)[0]
            assert np.array_equal(best.u_hat, u)

    @pytest.mark.parametrize("n", [2, 4, 8, 16])
    def test_matches_exhaustive_ml(self, n, rng):
        for _ in range(20):
            nfree = int(rng.integers(0, min(n, 8) + 1))
            free = rng.choice(n, size=nfree, replace=False)
            fvals = rng.integers(0, 2, n).astype(np.int8)
            pattern = FrozenPattern.from_free_positions(n, free, fvals)
            llr = 3.0 * rng.normal(size=n)
            cands = scl_decode(llr, pattern, max(1, 2 ** nfree))
            oracle_metric, oracle_u = exhaustive_best(llr, pattern)
            assert cands[0].path_metric == pytest.approx(oracle_metric, abs=1e-9)
            assert np.array_equal(polar_transform(cands[0].u_hat),
                                  polar_transform(oracle_u))

    def test_metrics_sorted_and_frozen_respected(self, rng):
        n = 64
        free = rng.choice(n, size=30, replace=False)
        fvals = rng.integers(0, 2, n).astype(np.int8)
        pattern = FrozenPattern.from_free_positions(n, free, fvals)
        cands = scl_decode(rng.normal(size=n), pattern, 8)
        metrics = [c.path_metric for c in cands]
        assert metrics == sorted(metrics)
        for c in cands:
            assert np.array_equal(c.u_hat[pattern.frozen_mask],
                                  fvals[pattern.frozen_mask])

    def test_noiseless_roundtrip_any_pattern(self, rng):
        for _ in range(10):
            n = int(rng.choice([32, 128, 1024]))
            k = int(rng.integers(1, n))
            free = np.sort(rng.choice(n, size=k, replace=False))
            pattern = FrozenPattern.from_free_positions(n, free)
            u = np.zeros(n, dtype=np.int8)
            u[free] = rng.integers(0, 2, k)
            scale = float(rng.uniform(0.5, 10.0))
            llr = scale * (1 - 2 * polar_transform(u).astype(float))
            best = scl_decode(llr, pattern, 1)[0]
            assert np.array_equal(best.u_hat, u)

    def test_list_one_is_successive_cancellation(self, rng):
        # with list 1, every decision follows the sign of the leaf llr
        n = 16
        pattern = FrozenPattern.from_free_positions(n, np.arange(n))
        llr = rng.normal(size=n)
        one = scl_decode(llr, pattern, 1)
        assert len(one) == 1

    def test_deterministic_tiebreak_prefers_zero(self):
        # all-zero llrs: every assignment has metric 0; bit 0 must win
        pattern = FrozenPattern.from_free_positions(4, np.arange(4))
        best = scl_decode(np.zeros(4), pattern, 4)[0]
        assert best.u_hat.tolist() == [0, 0, 0, 0]

    def test_invalid_args(self):
        pattern = FrozenPattern.from_free_positions(4, [0])
        with pytest.raises(ValueError):
            scl_decode(np.zeros(2), pattern, 1)
        with pytest.raises(ValueError):
            scl_decode(np.zeros(4), pattern, 0)


class TestCrcSelect:
    @staticmethod
    def parity_ok(bits):
        return bits.sum() % 2 == 0

    def test_single_valid_candidate(self):
        cand = DecodeCandidate(np.array([1, 1, 0, 0], dtype=np.int8), 0.5)
        got = crc_select([cand], [0, 1, 2], lambda b: self.parity_ok(b))
        assert got is cand

    def test_all_invalid_returns_none(self):
        cands = [DecodeCandidate(np.array([1, 0, 0, 0], dtype=np.int8), 0.1),
                 DecodeCandidate(np.array([0, 1, 0, 0], dtype=np.int8), 0.7)]
        assert crc_select(cands, [0, 1, 2], self.parity_ok) is None

    def test_worse_metric_with_valid_check_wins(self):
        # constructed by flipping one bit of a parity-valid word: the
        # better-metric candidate fails the check, the worse one passes
        good = DecodeCandidate(np.array([1, 1, 0], dtype=np.int8), 2.0)
        flipped = DecodeCandidate(np.array([1, 0, 0], dtype=np.int8), 1.0)
        got = crc_select([flipped, good], [0, 1, 2], self.parity_ok)
        assert got is good

    def test_empty_candidates_rejected(self):
        with pytest.raises(ValueError):
            crc_select([], [0], self.parity_ok)
