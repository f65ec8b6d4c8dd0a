"""Max-cut problem model: G-Set ingestion, coupling-matrix construction,
energy and cut evaluation, best-known-cut registry.

Mapping: each graph vertex gets one spin m_i in {-1, +1}; the interaction
coefficients are J(i,j) = -w(i,j) with zero bias, so maximizing the cut
is minimizing the quadratic energy E(m) = -(sum_{i<j} J_ij m_i m_j +
sum_i h_i m_i). For weights in {-1, +1} the exact identity
E = sum(w) - 2 * cut holds on every state.

Indexing: MaxCutProblem edges are stored 1-based with i < j (the G-Set
convention); CouplingMatrix and SpinState are 0-indexed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import (
    DuplicateEdgeError,
    InvalidCodeError,
    ParseError,
    RangeError,
    UnknownGraphError,
)

MAX_NODES = 2048  # accelerator capacity: one p-bit per vertex

# 2-bit coupling codes: -1, 0, +1 encoded as 11, 00, 01; 10 is reserved.
CODE_ZERO = 0b00
CODE_POS = 0b01
CODE_NEG = 0b11
_ENCODE = {0: CODE_ZERO, 1: CODE_POS, -1: CODE_NEG}
_DECODE = {CODE_ZERO: 0, CODE_POS: 1, CODE_NEG: -1}


@dataclass(frozen=True)
class MaxCutProblem:
    """An undirected graph with edge weights in {-1, +1}.

    `edges` holds (i, j, w) triples, 1-based, normalized to i < j, no
    duplicates; zero-weight pairs are simply absent.
    """

    n: int
    edges: tuple[tuple[int, int, int], ...]
    name: str = ""

    def __post_init__(self):
        if not 1 <= self.n <= MAX_NODES:
            raise RangeError(f"node count {self.n} outside 1..{MAX_NODES}")
        seen = set()
        for i, j, w in self.edges:
            if not (1 <= i < j <= self.n):
                raise RangeError(f"edge ({i},{j}) violates 1 <= i < j <= {self.n}")
            if w not in (-1, 1):
                raise RangeError(f"edge ({i},{j}) weight {w} not in {{-1,+1}}")
            if (i, j) in seen:
                raise DuplicateEdgeError(f"duplicate edge ({i},{j})")
            seen.add((i, j))

    @classmethod
    def from_edges(cls, n, edges, name=""):
        """Build from possibly unordered 1-based (i, j, w) triples."""
        normalized = []
        for i, j, w in edges:
            if i == j:
                raise RangeError(f"self-loop on node {i}")
            if i > j:
                i, j = j, i
            normalized.append((int(i), int(j), int(w)))
        return cls(n=n, edges=tuple(normalized), name=name)

    @cached_property
    def edge_arrays(self):
        """0-based numpy views (i, j, w) for vectorized evaluation."""
        if self.edges:
            e = np.asarray(self.edges, dtype=np.int64)
            return e[:, 0] - 1, e[:, 1] - 1, e[:, 2]
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), z.copy()

    @property
    def total_weight(self) -> int:
        return int(sum(w for _, _, w in self.edges))

    def __repr__(self):
        return f"MaxCutProblem({self.name or '?'}: n={self.n}, m={len(self.edges)})"


@dataclass(frozen=True)
class SpinState:
    """n spins bit-packed into an integer register: bit i = 1 means
    spin i is +1, bit i = 0 means -1 (0-indexed from the LSB)."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("empty spin state")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bits wider than {self.n} positions")

    @classmethod
    def from_spins(cls, spins) -> "SpinState":
        bits = 0
        for i, s in enumerate(spins):
            if s == 1:
                bits |= 1 << i
            elif s != -1:
                raise ValueError(f"spin {s} at position {i} not in {{-1,+1}}")
        return cls(n=len(spins), bits=bits)

    def to_spins(self) -> np.ndarray:
        out = np.empty(self.n, dtype=np.int8)
        b = self.bits
        for i in range(self.n):
            out[i] = 1 if (b >> i) & 1 else -1
        return out

    def spin(self, i: int) -> int:
        return 1 if (self.bits >> i) & 1 else -1

    def __len__(self):
        return self.n


@dataclass(frozen=True)
class CouplingMatrix:
    """Dense 2-bit-coded symmetric coupling matrix plus bias vector.

    `codes` is an (n, n) uint8 array over {00, 01, 11} with a zero
    diagonal; `h` is the integer bias vector (all zero for max-cut).
    `banks` is layout metadata only (J-memory bank interleaving count); it
    does not affect any arithmetic.
    """

    n: int
    codes: np.ndarray
    h: np.ndarray
    banks: int = 1

    def __post_init__(self):
        if self.codes.shape != (self.n, self.n):
            raise ValueError("codes shape mismatch")
        if self.h.shape != (self.n,):
            raise ValueError("bias shape mismatch")
        bad = ~np.isin(self.codes, (CODE_ZERO, CODE_POS, CODE_NEG))
        if bad.any():
            raise InvalidCodeError("reserved code 10 present in coupling matrix")
        if np.diagonal(self.codes).any():
            raise ValueError("diagonal must be zero-coded")
        if not np.array_equal(self.codes, self.codes.T):
            raise ValueError("coupling codes must be symmetric")

    @classmethod
    def from_problem(cls, p: MaxCutProblem) -> "CouplingMatrix":
        codes = np.zeros((p.n, p.n), dtype=np.uint8)
        for i, j, w in p.edges:
            code = _ENCODE[-w]  # J = -w
            codes[i - 1, j - 1] = code
            codes[j - 1, i - 1] = code
        return cls(n=p.n, codes=codes, h=np.zeros(p.n, dtype=np.int64))

    @classmethod
    def from_dense(cls, values, h=None) -> "CouplingMatrix":
        """Build from an integer matrix over {-1, 0, +1}."""
        values = np.asarray(values)
        n = values.shape[0]
        codes = np.zeros((n, n), dtype=np.uint8)
        for v, code in _ENCODE.items():
            codes[values == v] = code
        if not np.isin(values, (-1, 0, 1)).all():
            raise ValueError("coupling values must be in {-1, 0, +1}")
        hv = np.zeros(n, dtype=np.int64) if h is None else np.asarray(h, dtype=np.int64)
        return cls(n=n, codes=codes, h=hv)

    @cached_property
    def values(self) -> np.ndarray:
        """Decoded int8 matrix over {-1, 0, +1}."""
        out = np.zeros((self.n, self.n), dtype=np.int8)
        out[self.codes == CODE_POS] = 1
        out[self.codes == CODE_NEG] = -1
        return out

    def code(self, i: int, j: int) -> int:
        return int(self.codes[i, j])


def to_coupling(p: MaxCutProblem) -> CouplingMatrix:
    """J(i,j) = -w(i,j), h = 0, 2-bit encoded."""
    return CouplingMatrix.from_problem(p)


def jm_product(code: int, spin_bit: int) -> int:
    """The 2-bit J times 1-bit m product of the weight-logic truth table."""
    if code not in _DECODE:
        raise InvalidCodeError(f"reserved coupling code {code:#04b}")
    return _DECODE[code] * (1 if spin_bit else -1)


def _spins_of(state) -> np.ndarray:
    if isinstance(state, SpinState):
        return state.to_spins()
    return np.asarray(state, dtype=np.int8)


def energy(state, coupling: CouplingMatrix) -> int:
    """Exact integer energy E = -(sum_{i<j} J_ij m_i m_j + sum_i h_i m_i)."""
    m = _spins_of(state).astype(np.int64)
    if m.shape[0] != coupling.n:
        raise ValueError("state length does not match coupling size")
    quad = int(m @ (coupling.values.astype(np.int64) @ m)) // 2  # diag zero, symmetric
    return -(quad + int(coupling.h @ m))


def cut_value(state, p: MaxCutProblem) -> int:
    """Total weight of edges whose endpoints carry opposite spins.

    States longer than p.n are allowed (padded engine registers); the
    extra positions carry no edges and cannot affect the cut.
    """
    m = _spins_of(state)
    if m.shape[0] < p.n:
        raise ValueError("state shorter than problem size")
    ei, ej, w = p.edge_arrays
    if len(w) == 0:
        return 0
    return int(w[m[ei] != m[ej]].sum())


def parse_gset(text: str, name: str = "") -> MaxCutProblem:
    """Parse the standard G-Set layout: header "n m" then m lines "i j w".

    Indices are 1-based; weights must be -1 or +1. Raises ParseError with
    the offending line number, RangeError for out-of-range indices or
    weights, DuplicateEdgeError for repeated pairs.
    """
    lines = text.splitlines()
    header_at = None
    for lineno, raw in enumerate(lines, start=1):
        if raw.strip():
            header_at = lineno
            break
    if header_at is None:
        raise ParseError("empty input", line=1)
    parts = lines[header_at - 1].split()
    if len(parts) != 2:
        raise ParseError(f"expected header 'n m', got {lines[header_at - 1]!r}", line=header_at)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"non-integer header {lines[header_at - 1]!r}", line=header_at) from None
    if m < 0:
        raise ParseError(f"negative edge count {m}", line=header_at)

    edges = []
    count = 0
    for lineno in range(header_at + 1, len(lines) + 1):
        raw = lines[lineno - 1]
        if not raw.strip():
            continue
        if count == m:
            raise ParseError(f"more than the declared {m} edge lines", line=lineno)
        parts = raw.split()
        if len(parts) != 3:
            raise ParseError(f"expected 'i j w', got {raw!r}", line=lineno)
        try:
            i, j, w = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError:
            raise ParseError(f"non-integer edge line {raw!r}", line=lineno) from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise RangeError(f"line {lineno}: node index out of range in ({i},{j}), n={n}")
        if i == j:
            raise RangeError(f"line {lineno}: self-loop on node {i}")
        if w not in (-1, 1):
            raise RangeError(f"line {lineno}: weight {w} not in {{-1,+1}}")
        edges.append((i, j, w))
        count += 1
    if count != m:
        raise ParseError(f"declared {m} edges but found {count}", line=len(lines) or 1)
    return MaxCutProblem.from_edges(n=n, edges=edges, name=name)


def load_gset(path, name: str | None = None) -> MaxCutProblem:
    path = Path(path)
    return parse_gset(path.read_text(), name=name if name is not None else path.stem)


# Best known cut values for the 51 benchmark graphs plus the
# fully-connected K2000 instance; overridable via load_registry().
DEFAULT_BEST_KNOWN: dict[str, int] = {
    "G1": 11624, "G2": 11620, "G3": 11622, "G4": 11646, "G5": 11631,
    "G6": 2178, "G7": 2006, "G8": 2005, "G9": 2054, "G10": 2000,
    "G11": 564, "G12": 556, "G13": 582,
    "G14": 3064, "G15": 3050, "G16": 3052, "G17": 3047,
    "G18": 992, "G19": 906, "G20": 941, "G21": 931,
    "G22": 13359, "G23": 13344, "G24": 13337, "G25": 13340, "G26": 13328,
    "G27": 3341, "G28": 3298, "G29": 3405, "G30": 3413, "G31": 3310,
    "G32": 1410, "G33": 1382, "G34": 1384,
    "G35": 7687, "G36": 7680, "G37": 7691, "G38": 7688,
    "G39": 2408, "G40": 2400, "G41": 2405, "G42": 2481,
    "G43": 6660, "G44": 6650, "G45": 6654, "G46": 6649, "G47": 6657,
    "G51": 3848, "G52": 3851, "G53": 3850, "G54": 3852,
    "K2000": 33337,
}


def load_registry(path, base: dict[str, int] | None = None) -> dict[str, int]:
    """Merge a "name value" override file over the compiled-in registry."""
    registry = dict(DEFAULT_BEST_KNOWN if base is None else base)
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"expected 'name value', got {raw!r}", line=lineno)
        try:
            value = int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer best-known value {parts[1]!r}", line=lineno) from None
        if value <= 0:
            raise ParseError(f"best-known value must be positive, got {value}", line=lineno)
        registry[parts[0]] = value
    return registry


def accuracy(cut: int, graph: str, registry: dict[str, int] | None = None) -> float:
    """cut / best_known, the benchmark accuracy metric."""
    reg = DEFAULT_BEST_KNOWN if registry is None else registry
    if graph not in reg:
        raise UnknownGraphError(graph)
    return cut / reg[graph]
