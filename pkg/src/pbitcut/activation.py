"""Activation-function variants for the p-bit update.

Two families, all producing Q1.20 outputs in [-1, +1]:

  * 1024-entry lookup tables over [-4, +4] for tanh and for
    2*sigmoid - 1, sampled at bin centers (mid-riser quantization) and
    stored with 20-bit fractional precision;
  * piece-wise linear ramps A_T for T in {1, 2, 4}: clamp the input to
    [-T, +T] then divide by T, realized as an arithmetic right shift of
    the raw value by log2(T).

The arithmetic shift floors toward -inf, so negative odd rationals can
land 1 ulp below the exact quotient; all variants are odd within 1 ulp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

from .fixedpoint import Q1_20, FixedQ, QFormat, from_real

LUT_ENTRIES = 1024
LUT_THRESHOLD = 4


class ActivationKind(Enum):
    LUT_TANH = "lut-tanh"
    LUT_SIGMOID2M1 = "lut-sigmoid"
    PWL_A1 = "pwl1"
    PWL_A2 = "pwl2"
    PWL_A4 = "pwl4"

    @property
    def threshold(self) -> int:
        return {
            ActivationKind.LUT_TANH: LUT_THRESHOLD,
            ActivationKind.LUT_SIGMOID2M1: LUT_THRESHOLD,
            ActivationKind.PWL_A1: 1,
            ActivationKind.PWL_A2: 2,
            ActivationKind.PWL_A4: 4,
        }[self]

    @property
    def is_lut(self) -> bool:
        return self in (ActivationKind.LUT_TANH, ActivationKind.LUT_SIGMOID2M1)


@dataclass(frozen=True)
class LutTable:
    """Immutable 1024-entry table of raw Q1.20 values over [-T, +T]."""

    kind: ActivationKind
    entries: tuple[int, ...]
    threshold: int = LUT_THRESHOLD

    def __post_init__(self):
        if len(self.entries) != LUT_ENTRIES:
            raise ValueError(f"expected {LUT_ENTRIES} entries, got {len(self.entries)}")

    @property
    def bin_width(self) -> float:
        return 2 * self.threshold / LUT_ENTRIES


def _lut_function(kind: ActivationKind):
    if kind is ActivationKind.LUT_TANH:
        return math.tanh
    if kind is ActivationKind.LUT_SIGMOID2M1:
        return lambda x: 2.0 / (1.0 + math.exp(-x)) - 1.0
    raise ValueError(f"{kind} is not a lookup-table variant")


@lru_cache(maxsize=None)
def build_lut(kind: ActivationKind) -> LutTable:
    """Sample f at the 1024 bin centers of [-4, +4] and quantize to Q1.20.

    entry[j] = f(-T + (j + 0.5) * 2T/1024), rounded half away from zero.
    """
    f = _lut_function(kind)
    step = 2 * LUT_THRESHOLD / LUT_ENTRIES
    entries = tuple(
        from_real(f(-LUT_THRESHOLD + (j + 0.5) * step), Q1_20).raw
        for j in range(LUT_ENTRIES)
    )
    return LutTable(kind=kind, entries=entries)


def _aligned_raw(x: FixedQ) -> int:
    """Raw value of x re-expressed with 20 fractional bits.

    Extra fractional bits truncate toward -inf, consistent with the
    multiply rule; the engine's wide local field already carries exactly
    20 fractional bits so this is the identity on the hot path.
    """
    df = x.fmt.fractional_bits - 20
    return x.raw >> df if df >= 0 else x.raw << -df


def evaluate(kind: ActivationKind, x: FixedQ) -> FixedQ:
    """Apply an activation variant to a (wide) fixed-point input.

    PWL: clamp to [-T, +T], then arithmetic-shift right by log2(T).
    LUT: clamp to [-4, +4], mid-riser quantize to a 10-bit index, read.
    Output is Q1.20 in [-1, +1].
    """
    raw = _aligned_raw(x)
    t = kind.threshold
    clamp = t << 20
    if raw > clamp:
        raw = clamp
    elif raw < -clamp:
        raw = -clamp
    if kind.is_lut:
        # bin width in raw units is 2T<<20 / 1024 = 2^13 for T = 4. The
        # index is sign-folded (magnitude quantized, then mirrored about
        # the center pair) so inputs on bin edges quantize away from zero
        # symmetrically; this keeps evaluate odd to 1 ulp for every
        # nonzero input, which plain truncating indexing does not.
        mag = min(abs(raw) >> 13, LUT_ENTRIES // 2 - 1)
        index = LUT_ENTRIES // 2 + mag if raw >= 0 else LUT_ENTRIES // 2 - 1 - mag
        out = build_lut(kind).entries[index]
    else:
        out = raw >> t.bit_length() - 1  # >> log2(T)
    return FixedQ(out, Q1_20)


def output_format() -> QFormat:
    return Q1_20
