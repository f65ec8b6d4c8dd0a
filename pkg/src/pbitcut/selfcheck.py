"""Embedded oracle suite behind the `validate` CLI command.

Each check re-derives an expectation through an independent route
(rational arithmetic, exhaustive enumeration, the sequential sweep) and
compares the production path against it. Checks return structured
results so callers can render a table and pick an exit code.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import hwmodel
from .activation import ActivationKind
from .engine import AnnealSchedule, EngineConfig, run_trial
from .fixedpoint import Q4_20, FixedQ, from_real, mul
from .problem import DEFAULT_BEST_KNOWN, MaxCutProblem, energy, to_coupling
from .rng import SeedBlock, derive_seed, full_period

BOLTZMANN_TV_LIMIT = 0.02


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_fixedpoint_roundtrip(samples: int = 20_000, seed: int = 7) -> CheckResult:
    """from_real/to_real round-trips exactly on representable values, and
    mul agrees with exact rational arithmetic under the truncation rule."""
    rnd = random.Random(seed)
    for _ in range(samples):
        raw = rnd.randint(Q4_20.raw_min, Q4_20.raw_max)
        x = FixedQ(raw, Q4_20)
        if from_real(x.fraction, Q4_20).raw != raw:
            return CheckResult("fixedpoint-roundtrip", False, f"round trip failed at raw {raw}")
        raw_b = rnd.randint(Q4_20.raw_min, Q4_20.raw_max)
        y = FixedQ(raw_b, Q4_20)
        got = mul(x, y, Q4_20)
        # independent route: exact rational product, floored to 20 fractional
        # bits, then clipped to the format range
        exact = Fraction(x.fraction * y.fraction * Q4_20.scale)
        floored = exact.numerator // exact.denominator
        expect = max(Q4_20.raw_min, min(Q4_20.raw_max, floored))
        if got.raw != expect:
            return CheckResult("fixedpoint-roundtrip", False, f"mul mismatch at ({raw},{raw_b})")
    return CheckResult("fixedpoint-roundtrip", True, f"{samples} random pairs exact")


def check_lfsr_period() -> CheckResult:
    period = full_period(1)
    expected = (1 << 21) - 1
    ok = period == expected
    return CheckResult("lfsr-period", ok, f"period {period} (expected {expected})")


def check_timing_identities() -> CheckResult:
    """The six published per-trial timings for the 4-way core at 100 MHz."""
    quoted = {
        (800, 1000): 2.01e-3,
        (1000, 1000): 2.51e-3,
        (2000, 1000): 5.01e-3,
        (800, 100): 201e-6,
        (1000, 100): 251e-6,
        (2000, 100): 501e-6,
    }
    for (n_m, n_s), expect in quoted.items():
        cycles, seconds = hwmodel.cycles_and_time(n_m, n_s, k=4)
        if seconds != expect:
            return CheckResult(
                "timing-identities", False, f"(n_m={n_m}, n_s={n_s}) gave {seconds}, expected {expect}"
            )
    return CheckResult("timing-identities", True, "all six quoted trial times exact")


def check_registry(registry: dict[str, int] | None = None) -> CheckResult:
    reg = DEFAULT_BEST_KNOWN if registry is None else registry
    required = set(DEFAULT_BEST_KNOWN)
    missing = sorted(required - set(reg))
    if missing:
        return CheckResult("registry", False, f"missing graphs: {', '.join(missing)}")
    bad = [name for name in required if not isinstance(reg[name], int) or reg[name] <= 0]
    if bad:
        return CheckResult("registry", False, f"non-positive best-known for {', '.join(sorted(bad))}")
    if len(required) != 52:
        return CheckResult("registry", False, f"expected 52 graphs, found {len(required)}")
    return CheckResult("registry", True, f"{len(reg)} graphs, K2000={reg['K2000']}")


def _random_problem(rnd: random.Random, n: int) -> MaxCutProblem:
    edges = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            w = rnd.choice((-1, 0, 1))
            if w:
                edges.append((i, j, w))
    if not edges:
        edges.append((1, 2, 1))
    return MaxCutProblem.from_edges(n=n, edges=edges, name=f"rand{n}")


def check_kway_equivalence(instances: int = 25, n_samples: int = 8, seed: int = 11) -> CheckResult:
    """k in {2, 4} trajectories must be bit-identical to k = 1."""
    rnd = random.Random(seed)
    base = SeedBlock(int.from_bytes(rnd.randbytes(64), "big"))
    for idx in range(instances):
        p = _random_problem(rnd, rnd.choice((8, 16, 32)))
        sched = AnnealSchedule.from_reals(0.5, 1.05, n_samples)
        trial_seed = derive_seed(base, idx)
        traces = {}
        for k in (1, 2, 4):
            cfg = EngineConfig(seed=trial_seed, k=k, record_state_trace=True)
            traces[k] = run_trial(p, cfg, sched).state_trace
        for k in (2, 4):
            if not np.array_equal(traces[k], traces[1]):
                s = int(np.argwhere((traces[k] != traces[1]).any(axis=1))[0][0])
                return CheckResult(
                    "kway-equivalence", False, f"instance {idx} k={k} diverges at sample {s}"
                )
    return CheckResult("kway-equivalence", True, f"{instances} instances, k in {{2,4}} == k=1")


def check_boltzmann(n_samples: int = 1_000_000, beta: float = 1.0) -> CheckResult:
    """Empirical state distribution of a 3-p-bit system vs the exact
    Boltzmann law p ~ exp(-beta E), by exhaustive enumeration."""
    tv = boltzmann_tv(beta=beta, n_samples=n_samples)
    return CheckResult(
        "boltzmann",
        tv < BOLTZMANN_TV_LIMIT,
        f"TV distance {tv:.4f} at beta={beta} (limit {BOLTZMANN_TV_LIMIT})",
    )


# the pinned 3-p-bit instance: w = (1,2,-1), (2,3,+1), (1,3,-1), so
# J = -w = +1, -1, +1 with zero bias
BOLTZMANN_PROBLEM = MaxCutProblem.from_edges(
    n=3, edges=[(1, 2, -1), (2, 3, 1), (1, 3, -1)], name="boltzmann3"
)


def boltzmann_tv(beta: float, n_samples: int, seed_hex: str | None = None) -> float:
    p = BOLTZMANN_PROBLEM
    seed = (
        SeedBlock.from_hex(seed_hex)
        if seed_hex
        else derive_seed(SeedBlock(0x0B017A), 0)
    )
    cfg = EngineConfig(
        seed=seed, k=1, activation=ActivationKind.LUT_TANH, record_state_trace=True
    )
    sched = AnnealSchedule.from_reals(beta, 1.0, n_samples)
    result = run_trial(p, cfg, sched)
    states = result.state_trace[1:]  # drop the initial state
    index = ((states + 1) // 2 * (1 << np.arange(p.n, dtype=np.int64))).sum(axis=1)
    counts = np.bincount(index, minlength=1 << p.n)
    empirical = counts / counts.sum()

    coupling = to_coupling(p)
    weights = np.empty(1 << p.n)
    for s in range(1 << p.n):
        spins = np.array([1 if (s >> i) & 1 else -1 for i in range(p.n)], dtype=np.int8)
        weights[s] = math.exp(-beta * energy(spins, coupling))
    exact = weights / weights.sum()
    return float(0.5 * np.abs(empirical - exact).sum())


def run_all(registry: dict[str, int] | None = None, quick: bool = False) -> list[CheckResult]:
    """The full suite, or a reduced-sample smoke profile (same checks)."""
    return [
        check_fixedpoint_roundtrip(samples=2_000 if quick else 20_000),
        check_lfsr_period(),
        check_timing_identities(),
        check_registry(registry),
        check_kway_equivalence(instances=5 if quick else 25),
        check_boltzmann(n_samples=100_000 if quick else 1_000_000),
    ]
