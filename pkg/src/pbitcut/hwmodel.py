"""Accelerator-fidelity bookkeeping: the 32-bit instruction word, the
8 Mb J-memory address map with bank interleaving, and the cycle/time
model of the pseudo-parallel update core.

The instruction field layout is a stand-in (the interface width and the
stored quantities are fixed by the accelerator, the exact bit positions
are not): [31:30] opcode, [29:28] reserved zero, [27:16] N_m - 1,
[15:0] N_s.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from .errors import DecodeError, RangeError
from .problem import CouplingMatrix

CLOCK_HZ = 100_000_000  # implementation clock, 100 MHz


class Opcode(IntEnum):
    CONFIGURE = 0
    RUN = 1
    READ_STATUS = 2
    RESET = 3


@dataclass(frozen=True)
class Instruction:
    """32-bit accelerator instruction: opcode + N_m + N_s."""

    opcode: Opcode
    n_m: int  # p-bit count, stored as n_m - 1 in a 12-bit field
    n_s: int  # sample count, 16-bit field

    def __post_init__(self):
        if not 1 <= self.n_m <= 1 << 12:
            raise RangeError(f"n_m {self.n_m} outside 1..{1 << 12}")
        if not 0 <= self.n_s < 1 << 16:
            raise RangeError(f"n_s {self.n_s} outside 0..{(1 << 16) - 1}")


def encode_instruction(instr: Instruction) -> int:
    return (int(instr.opcode) << 30) | ((instr.n_m - 1) << 16) | instr.n_s


def decode_instruction(word: int) -> Instruction:
    if not 0 <= word < 1 << 32:
        raise DecodeError(f"instruction word {word:#x} wider than 32 bits")
    if (word >> 28) & 0b11:
        raise DecodeError(f"reserved bits [29:28] set in {word:#010x}")
    return Instruction(
        opcode=Opcode((word >> 30) & 0b11),
        n_m=((word >> 16) & 0xFFF) + 1,
        n_s=word & 0xFFFF,
    )


@dataclass(frozen=True)
class JMemLayout:
    """Geometry of the coupling memory: 2048 rows of 4096 bits (8 Mb),
    word-addressable as 128 x 32-bit words per row over an 18-bit
    address space, optionally interleaved across `banks` row banks."""

    rows: int = 2048
    row_bits: int = 4096
    word_bits: int = 32
    words_per_row: int = 128
    address_bits: int = 18
    banks: int = 1

    def __post_init__(self):
        if self.words_per_row * self.word_bits != self.row_bits:
            raise ValueError("row width must equal words_per_row * word_bits")
        if self.rows * self.words_per_row != 1 << self.address_bits:
            raise ValueError("address space must cover rows * words_per_row exactly")

    @property
    def total_bits(self) -> int:
        return self.rows * self.row_bits


def jmem_address(row: int, word: int, layout: JMemLayout = JMemLayout()) -> int:
    if not 0 <= row < layout.rows:
        raise RangeError(f"row {row} outside 0..{layout.rows - 1}")
    if not 0 <= word < layout.words_per_row:
        raise RangeError(f"word {word} outside 0..{layout.words_per_row - 1}")
    return row * layout.words_per_row + word


def jmem_row_word(address: int, layout: JMemLayout = JMemLayout()) -> tuple[int, int]:
    if not 0 <= address < 1 << layout.address_bits:
        raise RangeError(f"address {address} outside the {layout.address_bits}-bit space")
    return divmod(address, layout.words_per_row)


def bank_of_row(row: int, k: int) -> int:
    """Row-interleaved banking: any k consecutive rows land in k distinct
    banks, so a k-way core can read them in the same cycle."""
    if k < 1:
        raise ValueError(f"bank count must be >= 1, got {k}")
    if row < 0:
        raise RangeError(f"negative row {row}")
    return row % k


def cycles_and_time(n_m: int, n_s: int, k: int, clock_hz: float = CLOCK_HZ):
    """Per-trial cost of the k-way core: (ceil(n_m / k) + 1) * n_s cycles."""
    if n_m < 1 or k < 1 or clock_hz <= 0:
        raise ValueError("n_m, k and clock_hz must be positive")
    if n_s < 0:
        raise ValueError("n_s must be non-negative")
    cycles = (-(-n_m // k) + 1) * n_s
    return cycles, cycles / clock_hz


def pack_coupling_row(coupling: CouplingMatrix, row: int) -> int:
    """One J-memory row image: code(row, j) at bit pair [2j+1 : 2j]."""
    acc = 0
    for j in range(coupling.n - 1, -1, -1):
        acc = (acc << 2) | int(coupling.codes[row, j])
    return acc


def unpack_row(bits: int, n: int) -> np.ndarray:
    codes = np.empty(n, dtype=np.uint8)
    for j in range(n):
        codes[j] = (bits >> (2 * j)) & 0b11
    return codes


@dataclass
class JMem:
    """Behavioral image of the coupling memory, written 32 bits at a time
    through the 18-bit address port and read back as full rows."""

    layout: JMemLayout = field(default_factory=JMemLayout)

    def __post_init__(self):
        self._rows = [0] * self.layout.rows

    def write_word(self, address: int, word: int) -> None:
        if not 0 <= word < 1 << self.layout.word_bits:
            raise RangeError(f"word {word:#x} wider than {self.layout.word_bits} bits")
        row, index = jmem_row_word(address, self.layout)
        shift = index * self.layout.word_bits
        mask = ((1 << self.layout.word_bits) - 1) << shift
        self._rows[row] = (self._rows[row] & ~mask) | (word << shift)

    def read_word(self, address: int) -> int:
        row, index = jmem_row_word(address, self.layout)
        return (self._rows[row] >> (index * self.layout.word_bits)) & (
            (1 << self.layout.word_bits) - 1
        )

    def read_row(self, row: int) -> int:
        if not 0 <= row < self.layout.rows:
            raise RangeError(f"row {row} outside 0..{self.layout.rows - 1}")
        return self._rows[row]

    def load_coupling(self, coupling: CouplingMatrix) -> None:
        """Configure the memory word by word, as the host interface does."""
        wbits = self.layout.word_bits
        wmask = (1 << wbits) - 1
        for row in range(coupling.n):
            image = pack_coupling_row(coupling, row)
            words_needed = -(-(2 * coupling.n) // wbits)
            for index in range(words_needed):
                self.write_word(jmem_address(row, index, self.layout), (image >> (index * wbits)) & wmask)
