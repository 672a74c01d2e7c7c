"""Interleavers, rate matching and scrambling."""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from polarshaping import chain, tables


class TestPolarInterleaver:
    def test_identity_beyond_table(self):
        pat = chain.polar_interleaver_pattern(792)
        assert np.array_equal(pat, np.arange(792))

    def test_permutation_for_all_supported_k(self):
        for k in range(1, 165):
            pat = chain.polar_interleaver_pattern(k)
            assert np.array_equal(np.sort(pat), np.arange(k)), k

    @given(st.integers(min_value=1, max_value=200))
    def test_roundtrip(self, k):
        rng = np.random.default_rng(k)
        c = rng.integers(0, 2, k).astype(np.int8)
        assert np.array_equal(chain.polar_deinterleave(chain.polar_interleave(c)), c)

    def test_known_head_of_full_pattern(self):
        # first entries of the 164-long table
        pat = chain.polar_interleaver_pattern(164)
        assert pat[:6].tolist() == [0, 2, 4, 7, 9, 14]


class TestFrozenSets:
    def test_all_info(self):
        info, frozen = chain.build_frozen_sets(64, 64)
        assert frozen.size == 0 and np.array_equal(info, np.arange(64))

    def test_all_frozen(self):
        info, frozen = chain.build_frozen_sets(64, 0)
        assert info.size == 0 and frozen.size == 64

    def test_restricted_sequence_top_four(self):
        # the table restricted below 8 orders [0,1,2,4,3,5,6,7], so the
        # four most reliable sub-channels are exactly {3,5,6,7}
        seq8 = tables.reliability_sequence(8)
        assert seq8.tolist() == [0, 1, 2, 4, 3, 5, 6, 7]
        info, frozen = chain.build_frozen_sets(8, 4)
        assert info.tolist() == [3, 5, 6, 7]
        assert frozen.tolist() == [0, 1, 2, 4]

    def test_overfull_rejected(self):
        with pytest.raises(ValueError):
            chain.build_frozen_sets(32, 33)


class TestSubblockInterleaver:
    def test_n32_is_block_pattern(self):
        d = np.arange(32)
        assert np.array_equal(chain.subblock_interleave(d), tables.subblock_pattern())

    def test_roundtrip_n1024(self, rng):
        d = rng.integers(0, 2, 1024).astype(np.int8)
        y = chain.subblock_interleave(d)
        assert np.array_equal(chain.subblock_deinterleave(y), d)

    def test_formula_matches_definition(self, rng):
        n = 256
        width = n // 32
        pat = tables.subblock_pattern()
        d = rng.integers(0, 2, n).astype(np.int8)
        y = chain.subblock_interleave(d)
        for pos in range(n):
            src = pat[pos // width] * width + pos % width
            assert y[pos] == d[src]

    def test_tail_blocks_stay_in_tail(self):
        # blocks 24..31 permute among themselves, so the shaped segment
        # stays in the tail quarter for 8 bit-level modulation
        pat = tables.subblock_pattern()
        assert set(pat[24:].tolist()) == set(range(24, 32))

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            chain.subblock_interleave(np.zeros(48, dtype=np.int8))


class TestBitSelection:
    def test_full_length_identity(self):
        sel = chain.selection_indices(1024, 1024, 500)
        assert np.array_equal(sel, np.arange(1024))

    def test_puncture_branch(self):
        # low rate: drop the head, keep the tail
        sel = chain.selection_indices(512, 256, 96)
        assert np.array_equal(sel, np.arange(256, 512))

    def test_shorten_branch(self):
        sel = chain.selection_indices(512, 256, 200)
        assert np.array_equal(sel, np.arange(256))

    def test_repetition_branch(self):
        sel = chain.selection_indices(256, 300, 100)
        expect = np.concatenate([np.arange(256), np.arange(44)])
        assert np.array_equal(sel, expect)

    def test_output_length(self, rng):
        y = rng.integers(0, 2, 512).astype(np.int8)
        assert chain.bit_select(y, 320, 100).size == 320


class TestTriangularInterleaver:
    def test_three_bits_by_hand(self):
        # rows [e1 e2] / [e3], columns read e1 e3 e2
        e = np.array([10, 20, 30])
        assert chain.triangular_interleave(e).tolist() == [10, 30, 20]

    def test_six_bits_by_hand(self):
        e = np.array([1, 2, 3, 4, 5, 6])
        assert chain.triangular_interleave(e).tolist() == [1, 4, 6, 2, 5, 3]

    def test_row_count_1024(self):
        assert chain.triangle_rows(1024) == 45  # 45*46/2 = 1035 >= 1024

    @given(st.integers(min_value=1, max_value=600))
    def test_bijection(self, e_len):
        perm = chain.triangular_perm(e_len)
        assert np.array_equal(np.sort(perm), np.arange(e_len))

    def test_roundtrip_1024(self, rng):
        e = rng.integers(0, 2, 1024).astype(np.int8)
        f = chain.triangular_interleave(e)
        assert np.array_equal(chain.triangular_deinterleave(f), e)


class TestScrambling:
    def test_zero_sequence_is_identity(self, rng):
        f = rng.integers(0, 2, 64).astype(np.int8)
        assert np.array_equal(chain.scramble(f, np.zeros(64, np.int8)), f)

    def test_involution(self, rng):
        f = rng.integers(0, 2, 128).astype(np.int8)
        v = rng.integers(0, 2, 128).astype(np.int8)
        assert np.array_equal(chain.scramble(chain.scramble(f, v), v), f)

    def test_xor_table(self):
        out = chain.scramble(np.array([1, 0, 1], np.int8), np.array([1, 1, 0], np.int8))
        assert out.tolist() == [0, 1, 1]

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            chain.scramble(np.zeros(4, np.int8), np.zeros(5, np.int8))


class TestScramblerGenerator:
    def test_same_seed_same_sequence(self):
        a = chain.generate_scrambler(99, 2048)
        b = chain.generate_scrambler(99, 2048)
        assert np.array_equal(a, b)

    def test_different_seeds_differ(self):
        a = chain.generate_scrambler(1, 2048)
        b = chain.generate_scrambler(2, 2048)
        assert not np.array_equal(a, b)

    def test_zeros_mode(self):
        assert not chain.generate_scrambler("zeros", 512).any()

    def test_ones_fraction_balanced(self):
        v = chain.generate_scrambler(7, 1_000_000)
        assert 0.49 <= v.mean() <= 0.51
