import random

import pytest

from pbitcut.errors import InsufficientSeedBits
from pbitcut.fixedpoint import Q0_20
from pbitcut.rng import (
    DEFAULT_TAPS,
    STATE_MASK,
    Lfsr21,
    SeedBlock,
    derive_seed,
    expand_seed,
    full_period,
)


def oracle_step_bits(state, taps=DEFAULT_TAPS):
    """Independent bit-list model: stages 1..21 as a list (stage s at
    index s-1); feedback = XOR of tap stages, shifted into stage 1."""
    bits = [(state >> i) & 1 for i in range(21)]
    fb = 0
    for t in taps:
        fb ^= bits[t - 1]
    bits = [fb] + bits[:20]
    return sum(b << i for i, b in enumerate(bits))


def oracle_value(state):
    """Two's-complement read of 21 bits, scaled by 2^-20."""
    raw = state - (1 << 21) if state & (1 << 20) else state
    return raw / 2**20, raw


class TestStep:
    def test_golden_sequence_from_one(self):
        # frozen from the bit-list oracle
        lfsr = Lfsr21(1)
        got = [lfsr.step() for _ in range(6)]
        assert got == [2, 4, 8, 16, 32, 64]

    def test_golden_sequence_alternating(self):
        lfsr = Lfsr21(0x155555)
        got = [lfsr.step() for _ in range(4)]
        assert got == [699050, 1398100, 699048, 1398096]

    def test_matches_bit_oracle(self):
        rnd = random.Random(5)
        for _ in range(200):
            state = rnd.randint(1, STATE_MASK)
            lfsr = Lfsr21(state)
            s = state
            for _ in range(50):
                s = oracle_step_bits(s)
                assert lfsr.step() == s

    def test_never_zero(self):
        rnd = random.Random(6)
        for _ in range(10_000):
            lfsr = Lfsr21(rnd.randint(1, STATE_MASK))
            assert lfsr.step() != 0

    def test_zero_state_rejected(self):
        with pytest.raises(ValueError):
            Lfsr21(0)
        with pytest.raises(ValueError):
            Lfsr21(1 << 21)

    def test_custom_taps_follow_oracle(self):
        lfsr = Lfsr21(0x12345, taps=(21, 2))
        s = 0x12345
        for _ in range(64):
            s = oracle_step_bits(s, taps=(21, 2))
            assert lfsr.step() == s


class TestPeriod:
    def test_maximal_length(self):
        assert full_period(1) == 2**21 - 1

    def test_period_independent_of_seed(self):
        assert full_period(0x1ABCDE) == 2**21 - 1


class TestDraw:
    def test_draw_is_step_then_interpret(self):
        rnd = random.Random(8)
        for _ in range(500):
            state = rnd.randint(1, STATE_MASK)
            expected_state = oracle_step_bits(state)
            _, expected_raw = oracle_value(expected_state)
            lfsr = Lfsr21(state)
            got = lfsr.draw()
            assert lfsr.state == expected_state
            assert got.raw == expected_raw
            assert got.fmt == Q0_20

    def test_half_value(self):
        # 0x140000 steps to 0x80000 (bit20 and bit18 set, feedback 0)
        lfsr = Lfsr21(0x140000)
        got = lfsr.draw()
        assert lfsr.state == 0x80000
        assert got.value == 0.5

    def test_all_ones_is_minus_one_ulp(self):
        # 0xFFFFF steps to all-ones: raw -1, value -2^-20
        lfsr = Lfsr21(0xFFFFF)
        got = lfsr.draw()
        assert lfsr.state == STATE_MASK
        assert got.raw == -1

    def test_range(self):
        lfsr = Lfsr21(0x55555)
        for _ in range(5000):
            v = lfsr.draw()
            assert -1 <= v.value <= 1 - 2**-20

    def test_statistics(self):
        # empirical mean and 64-bin uniformity over 10^6 draws
        from scipy.stats import chi2

        lfsr = Lfsr21(0x0F1E2D)
        counts = [0] * 64
        total = 0
        n = 1_000_000
        for _ in range(n):
            raw = lfsr.draw().raw
            total += raw
            counts[(raw + (1 << 20)) >> 15] += 1
        mean = total / n / 2**20
        assert -0.01 < mean < 0.01
        expected = n / 64
        stat = sum((c - expected) ** 2 / expected for c in counts)
        assert stat < chi2.ppf(0.999, 63)  # p > 0.001


class TestSeedBlock:
    def test_hex_round_trip(self):
        text = "0123456789abcdef" * 8
        seed = SeedBlock.from_hex(text)
        assert seed.to_hex() == text

    def test_hex_length_enforced(self):
        with pytest.raises(ValueError):
            SeedBlock.from_hex("ab" * 63)
        with pytest.raises(ValueError):
            SeedBlock.from_hex("ab" * 65)

    def test_slice_layout(self):
        # windows are consecutive 21-bit fields from the LSB
        bits = (0x155aa << 21 * 2) | (0x00001 << 21) | 0x1fedc
        seed = SeedBlock(bits)
        assert seed.slice21(0) == 0x1FEDC
        assert seed.slice21(1) == 0x00001
        assert seed.slice21(2) == 0x155AA
        assert seed.slice21(3) == 0

    def test_slice_out_of_range(self):
        seed = SeedBlock(0)
        assert seed.slice21(23) == 0  # bits 483..503 still inside 512
        with pytest.raises(InsufficientSeedBits):
            seed.slice21(24)  # would need bits up to 524


class TestExpandSeed:
    def test_counts_and_consumption(self):
        seed = SeedBlock(sum(((t % STATE_MASK) + 1) << (21 * t) for t in range(24)))
        assert len(expand_seed(seed, 1)) == 1
        assert len(expand_seed(seed, 2)) == 3
        assert len(expand_seed(seed, 4)) == 15

    def test_k1_uses_low_window(self):
        seed = SeedBlock(0x0ABCD | (0x11111 << 21))
        (lfsr,) = expand_seed(seed, 1)
        assert lfsr.state == 0x0ABCD

    def test_zero_window_repaired(self):
        seed = SeedBlock(0x12345 << 21)  # window 0 is zero
        bank = expand_seed(seed, 2)
        assert bank[0].state == 0x1
        assert bank[1].state == 0x12345

    def test_insufficient_bits(self):
        with pytest.raises(InsufficientSeedBits):
            expand_seed(SeedBlock(1), 5)  # 21 * 31 = 651 > 512

    def test_bad_k(self):
        with pytest.raises(ValueError):
            expand_seed(SeedBlock(1), 0)


class TestDeterminism:
    def test_identical_seed_identical_draws(self):
        seed = SeedBlock.from_hex("fedcba98" * 16)
        a = expand_seed(seed, 4)
        b = expand_seed(seed, 4)
        for la, lb in zip(a, b):
            for _ in range(100):
                assert la.draw().raw == lb.draw().raw

    def test_derive_seed_is_stable_and_splits(self):
        base = SeedBlock(0xDEADBEEF)
        s0 = derive_seed(base, 0)
        assert derive_seed(base, 0) == s0
        assert derive_seed(base, 1) != s0
        assert derive_seed(SeedBlock(0xDEADBEF0), 0) != s0
        with pytest.raises(ValueError):
            derive_seed(base, -1)

    def test_clone_is_independent(self):
        a = Lfsr21(0x31337)
        b = a.clone()
        a.step()
        assert b.state == 0x31337
