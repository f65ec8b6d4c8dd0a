"""The p-bit stochastic source: a 21-bit Fibonacci LFSR drawing signed
Q0.20 values in [-1, 1 - 2^-20], plus 512-bit seed handling.

Register convention: stage s (1-based, s = 1..21) lives at integer bit
s - 1. One step shifts every stage up by one (state << 1) and feeds the
XOR of the tap stages into stage 1. With the pinned taps {21, 19} the
sequence is maximal length (period 2^21 - 1), which `full_period`
verifies by exhaustive enumeration.

A draw advances the register once and reinterprets all 21 bits as a
two's-complement Q0.20 value, exactly one step per draw.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InsufficientSeedBits
from .fixedpoint import Q0_20, FixedQ

STATE_BITS = 21
STATE_MASK = (1 << STATE_BITS) - 1
DEFAULT_TAPS = (21, 19)

SEED_BITS = 512
SEED_HEX_DIGITS = SEED_BITS // 4


class Lfsr21:
    """A 21-bit Fibonacci LFSR. Mutable; owned by exactly one worker."""

    __slots__ = ("state", "taps")

    def __init__(self, state: int, taps: tuple[int, ...] = DEFAULT_TAPS):
        if not 0 < state <= STATE_MASK:
            raise ValueError(f"state must be a nonzero 21-bit value, got {state:#x}")
        if not taps or any(not 1 <= t <= STATE_BITS for t in taps):
            raise ValueError(f"taps must be stage numbers in 1..21, got {taps}")
        self.state = state
        self.taps = tuple(taps)

    def step(self) -> int:
        """Advance one shift and return the new state (never zero)."""
        fb = 0
        for t in self.taps:
            fb ^= self.state >> (t - 1)
        self.state = ((self.state << 1) | (fb & 1)) & STATE_MASK
        return self.state

    def draw(self) -> FixedQ:
        """Advance one step, then read the register as two's-complement Q0.20."""
        s = self.step()
        raw = s - (1 << STATE_BITS) if s >> (STATE_BITS - 1) else s
        return FixedQ(raw, Q0_20)

    def clone(self) -> "Lfsr21":
        return Lfsr21(self.state, self.taps)

    def __repr__(self):
        return f"Lfsr21({self.state:#07x}, taps={self.taps})"


def full_period(seed: int = 1, taps: tuple[int, ...] = DEFAULT_TAPS) -> int:
    """Number of steps until the state first returns to `seed`.

    Exhaustive (up to 2^21 - 1 steps); compiled with numba when available
    for the default taps, pure Python otherwise.
    """
    if taps == DEFAULT_TAPS:
        from . import _kernel

        return int(_kernel.lfsr_full_period(seed))
    lfsr = Lfsr21(seed, taps)
    n = 0
    while True:
        lfsr.step()
        n += 1
        if lfsr.state == seed:
            return n


@dataclass(frozen=True)
class SeedBlock:
    """A 512-bit seed, sliced into consecutive 21-bit LFSR windows.

    Window t occupies bits [21*t + 20 : 21*t] of the seed integer
    (little-endian window order).
    """

    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << SEED_BITS):
            raise ValueError("seed must be an unsigned 512-bit integer")

    @classmethod
    def from_hex(cls, text: str) -> "SeedBlock":
        text = text.strip()
        if len(text) != SEED_HEX_DIGITS:
            raise ValueError(f"seed must be exactly {SEED_HEX_DIGITS} hex digits, got {len(text)}")
        return cls(int(text, 16))

    def to_hex(self) -> str:
        return f"{self.bits:0{SEED_HEX_DIGITS}x}"

    def slice21(self, index: int) -> int:
        """Raw 21-bit window (may be zero; callers repair as needed)."""
        if index < 0 or 21 * (index + 1) > SEED_BITS:
            raise InsufficientSeedBits(f"window {index} exceeds the 512-bit seed")
        return (self.bits >> (21 * index)) & STATE_MASK

    def __repr__(self):
        return f"SeedBlock(0x{self.to_hex()})"


def expand_seed(seed: SeedBlock, k: int) -> list[Lfsr21]:
    """Slice the seed into the 2^k - 1 LFSRs of a k-way engine.

    Consumes 21 * (2^k - 1) bits (21 / 63 / 315 for k = 1 / 2 / 4); an
    all-zero window is replaced by the constant 0x1 so every register
    starts in a valid state.
    """
    if k < 1:
        raise ValueError(f"way count must be >= 1, got {k}")
    count = (1 << k) - 1
    if 21 * count > SEED_BITS:
        raise InsufficientSeedBits(
            f"k={k} needs {21 * count} seed bits, only {SEED_BITS} available"
        )
    return [Lfsr21(seed.slice21(t) or 0x1) for t in range(count)]


def derive_seed(base: SeedBlock, index: int) -> SeedBlock:
    """Host-side splittable derivation of per-trial seeds.

    blake2b-512 over the base seed bytes plus the big-endian trial index;
    deterministic across platforms. This replaces the external 512-bit
    seeding LFSR of the hardware test rig.
    """
    import hashlib

    if index < 0:
        raise ValueError("trial index must be non-negative")
    h = hashlib.blake2b(digest_size=SEED_BITS // 8)
    h.update(base.bits.to_bytes(SEED_BITS // 8, "big"))
    h.update(index.to_bytes(8, "big"))
    return SeedBlock(int.from_bytes(h.digest(), "big"))
