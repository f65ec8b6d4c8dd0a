"""Two's-complement fixed-point arithmetic with explicit bit widths.

Convention: Q<i>.<f> carries 1 sign bit + i integer bits + f fractional
bits (the sign bit is NOT counted in i), total width 1 + i + f. Values are
stored as raw signed integers with real value = raw / 2^f, so the
representable range is [-2^(i+f), 2^(i+f) - 1] in raw units.

Pinned arithmetic rules (these make every result bit-reproducible):
  * mul computes the exact wide product, truncates excess fractional bits
    toward -inf, then saturates to the output format; saturation is
    reported through a sticky flag instead of raising
  * add requires operands in the same format and widens the result by one
    integer bit, so it is always exact
  * from_real rounds half away from zero by default; it is meant for
    configuration-time conversion only, never inside a sampling loop
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class QFormat:
    """Signed fixed-point format descriptor: Q<integer_bits>.<fractional_bits>."""

    integer_bits: int
    fractional_bits: int
    signed: bool = True

    def __post_init__(self):
        if not self.signed:
            raise ValueError("only signed two's-complement formats are supported")
        if self.integer_bits < 0 or self.fractional_bits < 0:
            raise ValueError("bit counts must be non-negative")
        if self.total_bits > 64:
            raise ValueError(f"total width {self.total_bits} exceeds 64 bits")

    @property
    def total_bits(self) -> int:
        return 1 + self.integer_bits + self.fractional_bits

    @property
    def scale(self) -> int:
        return 1 << self.fractional_bits

    @property
    def raw_min(self) -> int:
        return -(1 << (self.integer_bits + self.fractional_bits))

    @property
    def raw_max(self) -> int:
        return (1 << (self.integer_bits + self.fractional_bits)) - 1

    @property
    def min_value(self) -> Fraction:
        return Fraction(self.raw_min, self.scale)

    @property
    def max_value(self) -> Fraction:
        return Fraction(self.raw_max, self.scale)

    def __str__(self):
        return f"Q{self.integer_bits}.{self.fractional_bits}"


@dataclass(frozen=True)
class FixedQ:
    """A raw two's-complement integer interpreted against a QFormat.

    `saturated` is a sticky diagnostic flag: it is set when this value (or
    any operand it was derived from) clipped at a format boundary. It is
    excluded from equality so saturation history never changes value
    semantics.
    """

    raw: int
    fmt: QFormat
    saturated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.fmt.raw_min <= self.raw <= self.fmt.raw_max:
            raise OverflowError(f"raw {self.raw} outside {self.fmt} range")

    @property
    def value(self) -> float:
        return self.raw / self.fmt.scale

    @property
    def fraction(self) -> Fraction:
        """Exact rational value."""
        return Fraction(self.raw, self.fmt.scale)

    def __float__(self):
        return self.value

    def to_format(self, fmt: QFormat) -> "FixedQ":
        """Exact re-format (typically a widening alignment before add).

        Raises ValueError if fractional bits would be lost and OverflowError
        if the value does not fit the target range.
        """
        df = fmt.fractional_bits - self.fmt.fractional_bits
        if df >= 0:
            raw = self.raw << df
        else:
            if self.raw & ((1 << -df) - 1):
                raise ValueError(f"{self} not exactly representable in {fmt}")
            raw = self.raw >> -df
        return FixedQ(raw, fmt, saturated=self.saturated)

    def __repr__(self):
        return f"FixedQ({self.raw}, {self.fmt}, ~{self.value:.8g})"


def from_real(x, fmt: QFormat, mode: str = "nearest") -> FixedQ:
    """Quantize a real number (float, int, Fraction or decimal string).

    Modes: "nearest" rounds half away from zero (default), "truncate"
    drops fractional bits toward zero, "floor" drops them toward -inf.
    Raises OverflowError when the rounded value is out of range.
    """
    exact = Fraction(x) * fmt.scale
    if mode == "nearest":
        if exact >= 0:
            raw = (2 * exact + 1) // 2
        else:
            raw = -((2 * -exact + 1) // 2)
    elif mode == "truncate":
        raw = int(exact)
    elif mode == "floor":
        raw = exact.numerator // exact.denominator
    else:
        raise ValueError(f"unknown rounding mode {mode!r}")
    raw = int(raw)
    if not fmt.raw_min <= raw <= fmt.raw_max:
        raise OverflowError(f"{x} out of range for {fmt}")
    return FixedQ(raw, fmt)


def to_real(x: FixedQ) -> float:
    return x.value


def mul(a: FixedQ, b: FixedQ, out_fmt: QFormat, mode: str = "truncate") -> FixedQ:
    """Fixed-point multiply: exact wide product, excess fraction dropped
    to `out_fmt`, then saturated to the `out_fmt` range.

    The default "truncate" mode floors toward -inf (the datapath rule);
    "nearest" rounds half away from zero and exists for the annealing
    beta multiplier, whose 1000-step iteration cannot hold schedule
    accuracy under pure truncation.

    Never raises on overflow; the result's sticky `saturated` flag reports
    clipping (and carries over from either operand).
    """
    wide = a.raw * b.raw
    shift = a.fmt.fractional_bits + b.fmt.fractional_bits - out_fmt.fractional_bits
    if shift <= 0:
        raw = wide << -shift
    elif mode == "truncate":
        raw = wide >> shift
    elif mode == "nearest":
        half = 1 << (shift - 1)
        raw = (abs(wide) + half) >> shift
        if wide < 0:
            raw = -raw
    else:
        raise ValueError(f"unknown rounding mode {mode!r}")
    sat = a.saturated or b.saturated
    if raw > out_fmt.raw_max:
        raw, sat = out_fmt.raw_max, True
    elif raw < out_fmt.raw_min:
        raw, sat = out_fmt.raw_min, True
    return FixedQ(raw, out_fmt, saturated=sat)


def add(a: FixedQ, b: FixedQ) -> FixedQ:
    """Add two same-format values into the format widened by one integer
    bit. The widened sum always fits, so the result is exact; align
    operands with `to_format` first when their formats differ.
    """
    if a.fmt != b.fmt:
        raise ValueError(f"format mismatch: {a.fmt} vs {b.fmt}")
    out_fmt = QFormat(a.fmt.integer_bits + 1, a.fmt.fractional_bits)
    return FixedQ(a.raw + b.raw, out_fmt, saturated=a.saturated or b.saturated)


# Datapath formats used by the accelerator model.
Q4_20 = QFormat(4, 20)   # annealing beta register (24-bit)
Q1_20 = QFormat(1, 20)   # activation output (22-bit)
Q0_20 = QFormat(0, 20)   # LFSR draw (21-bit)
Q2_20 = QFormat(2, 20)   # comparator input (23-bit)
