"""The sampling core: annealed Gibbs-style p-bit updates in sequential
and k-way pseudo-parallel speculate-and-select form.

Update rule per position i (all fixed point):

    I_i  = beta * (h_i + sum_j J_ij m_j)      exact wide product, 20 frac bits
    m_i  = +1 if rand + activation(I_i) >= 0 else -1

The comparator treats an exact zero as +1. One full pass over all n_m
positions in ascending order is a sample; each position consumes exactly
one draw per sample, taken from LFSR #(position mod bank size). The bank
always holds 15 LFSRs (the 4-way hardware complement, seed windows 0-14)
no matter which k executes the sweep, which is what makes trajectories
bit-identical across k for a shared seed. The hardware instead wires one
LFSR per speculative unit, so which unit's draw is realized depends on
the speculation path; that divergence is statistical only.

When no initial state is supplied it is generated from an auxiliary LFSR
seeded by window 15 of the seed block (the sign of successive draws),
standing in for the external 2048-bit state-initialization LFSR.

The k-way sweep speculates: for block offset t it evaluates all 2^t
candidate updates of position base+t (adjusting one shared base sum by
+/-J terms for the 2^t assignments of the preceding in-block spins,
every candidate running through the beta-multiply, activation and
comparator) and selects along the spins actually realized. Trajectories
are therefore bit-identical to the sequential sweep for every k.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import _kernel, hwmodel
from .activation import ActivationKind, build_lut, evaluate
from .fixedpoint import Q1_20, Q4_20, FixedQ, QFormat, add, from_real, mul
from .problem import CouplingMatrix, MaxCutProblem, SpinState, to_coupling
from .rng import Lfsr21, SeedBlock, expand_seed

# beta (Q4.20, raw < 2^24) times an integer local sum |S| <= 4096 always
# fits 17 integer bits; kept exact, no truncation before the activation.
WIDE_FIELD = QFormat(17, 20)

RNG_BANK_WAYS = 4       # bank of 2^4 - 1 = 15 LFSRs for every k
INIT_STATE_WINDOW = 15  # seed window for the initial-state generator


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric annealing: beta_s = beta_initial * rate^(s-1), iterated
    in Q4.20 through anneal_step; rounding can stall the sequence but
    never decrease it for rate >= 1.

    Construction verifies that no step saturates Q4.20 within n_samples.
    """

    beta_initial: FixedQ
    beta_anneal_rate: FixedQ
    n_samples: int

    def __post_init__(self):
        if self.beta_initial.fmt != Q4_20 or self.beta_anneal_rate.fmt != Q4_20:
            raise ValueError("schedule parameters must be Q4.20")
        if self.beta_initial.raw <= 0:
            raise ValueError("beta_initial must be positive")
        if self.beta_anneal_rate.fraction < 1:
            raise ValueError("beta_anneal_rate must be >= 1")
        if self.n_samples < 0:
            raise ValueError("n_samples must be non-negative")
        self.betas  # materialize; raises on saturation

    @classmethod
    def from_reals(cls, beta_initial: float, rate: float, n_samples: int) -> "AnnealSchedule":
        return cls(
            beta_initial=from_real(beta_initial, Q4_20),
            beta_anneal_rate=from_real(rate, Q4_20),
            n_samples=n_samples,
        )

    @cached_property
    def betas(self) -> tuple[FixedQ, ...]:
        """beta_s for s = 1..n_samples."""
        if self.beta_anneal_rate.fraction == 1:  # constant beta, exactly
            return (self.beta_initial,) * self.n_samples
        out = []
        beta = self.beta_initial
        for s in range(self.n_samples):
            out.append(beta)
            if s + 1 < self.n_samples:
                beta = anneal_step(beta, self.beta_anneal_rate)
                if beta.saturated:
                    raise ValueError(
                        f"annealing saturates Q4.20 at sample {s + 2} of {self.n_samples}"
                    )
        return tuple(out)


@dataclass(frozen=True)
class EngineConfig:
    """Per-trial engine settings. `n_m` defaults to the problem size;
    larger values pad the coupling matrix with disconnected p-bits, as on
    the fixed-size hardware register.
    """

    seed: SeedBlock
    k: int = 4
    n_m: int | None = None
    activation: ActivationKind = ActivationKind.PWL_A1
    initial_state: SpinState | None = None
    record_energy_trace: bool = False
    record_cut_trace: bool = False
    record_state_trace: bool = False
    final_state_only: bool = False  # report the final sample, not the best
    backend: str = "fast"           # "fast" (compiled) or "reference"

    def __post_init__(self):
        if self.k < 1 or (self.k & (self.k - 1)) != 0 or self.k > 16:
            raise ValueError(f"way count must be a power of two in 1..16, got {self.k}")
        if self.n_m is not None and not 1 <= self.n_m <= 2048:
            raise ValueError(f"n_m {self.n_m} outside 1..2048")
        if self.backend not in ("fast", "reference"):
            raise ValueError(f"unknown backend {self.backend!r}")


@dataclass(frozen=True)
class TrialResult:
    final_state: SpinState
    best_cut: int
    best_energy: int
    sample_at_best: int         # 0 = initial state
    cycles: int
    seed_used: SeedBlock
    energy_trace: np.ndarray | None = None  # length n_samples + 1, index 0 initial
    cut_trace: np.ndarray | None = None
    state_trace: np.ndarray | None = None   # (n_samples + 1, n_m) int8


def local_field(i: int, spins: np.ndarray, coupling: CouplingMatrix, beta: FixedQ) -> FixedQ:
    """I_i = beta * (h_i + sum_j J_ij m_j) as an exact wide fixed-point value."""
    s = int(coupling.h[i]) + int(coupling.values[i].astype(np.int64) @ spins.astype(np.int64))
    return FixedQ(beta.raw * s, WIDE_FIELD, saturated=beta.saturated)


def update_pbit(
    i: int,
    spins: np.ndarray,
    coupling: CouplingMatrix,
    beta: FixedQ,
    rand_value: FixedQ,
    kind: ActivationKind,
) -> int:
    """One p-bit decision: sign of rand + activation(local field), with
    the comparator seeing the exact Q2.20 sum."""
    act = evaluate(kind, local_field(i, spins, coupling, beta))
    comparator_in = add(rand_value.to_format(Q1_20), act)
    return 1 if comparator_in.raw >= 0 else -1


def sweep_sequential(
    spins: np.ndarray,
    coupling: CouplingMatrix,
    beta: FixedQ,
    bank: list[Lfsr21],
    kind: ActivationKind,
) -> np.ndarray:
    """One sample in strict Gibbs order: ascending positions, each update
    visible to all later ones. Consumes exactly one draw per position.
    Returns a new array; the bank advances in place.
    """
    out = spins.copy()
    nb = len(bank)
    for i in range(out.shape[0]):
        r = bank[i % nb].draw()
        out[i] = update_pbit(i, out, coupling, beta, r, kind)
    return out


def sweep_kway(
    spins: np.ndarray,
    coupling: CouplingMatrix,
    beta: FixedQ,
    bank: list[Lfsr21],
    kind: ActivationKind,
    k: int,
) -> np.ndarray:
    """One sample processed in blocks of k with speculate-and-select.

    Bit-identical to sweep_sequential under the shared draw policy; the
    final block may be partial when k does not divide the position count.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    out = spins.copy()
    n = out.shape[0]
    nb = len(bank)
    values = coupling.values
    pos0 = 0
    while pos0 < n:
        bk = min(k, n - pos0)
        draws = [bank[(pos0 + t) % nb].draw() for t in range(bk)]
        realized = np.empty(bk, dtype=np.int8)
        sel = 0
        for t in range(bk):
            pos = pos0 + t
            base = int(coupling.h[pos]) + int(
                values[pos].astype(np.int64) @ out.astype(np.int64)
            )
            for u in range(t):  # strip pre-block contributions of in-block predecessors
                base -= int(values[pos, pos0 + u]) * int(out[pos0 + u])
            cands = []
            for a in range(1 << t):
                ssum = base
                for u in range(t):
                    sigma = 1 if (a >> u) & 1 else -1
                    ssum += sigma * int(values[pos, pos0 + u])
                field = FixedQ(beta.raw * ssum, WIDE_FIELD)
                act = evaluate(kind, field)
                s = draws[t].to_format(Q1_20).raw + act.raw
                cands.append(1 if s >= 0 else -1)
            realized[t] = cands[sel]
            if realized[t] == 1:
                sel |= 1 << t
        out[pos0 : pos0 + bk] = realized
        pos0 += bk
    return out


def anneal_step(beta: FixedQ, rate: FixedQ) -> FixedQ:
    """beta * rate in Q4.20, rounding to nearest.

    Truncating here instead would bleed half an ulp per sample and drift
    the realized schedule ~1% below beta_initial * rate^(s-1) over 1000
    samples; nearest rounding keeps it within 3e-4 relative.
    """
    return mul(beta, rate, Q4_20, mode="nearest")


def _initial_spins(cfg: EngineConfig, n_m: int) -> np.ndarray:
    if cfg.initial_state is not None:
        if cfg.initial_state.n != n_m:
            raise ValueError(
                f"initial state has {cfg.initial_state.n} spins, engine needs {n_m}"
            )
        return cfg.initial_state.to_spins()
    aux = Lfsr21(cfg.seed.slice21(INIT_STATE_WINDOW) or 0x1)
    spins = np.empty(n_m, dtype=np.int8)
    for i in range(n_m):
        spins[i] = 1 if aux.draw().raw >= 0 else -1
    return spins


def _padded_coupling(coupling: CouplingMatrix, n_m: int):
    """Dense values/bias, zero-padded to n_m disconnected extra p-bits."""
    values = coupling.values
    h = coupling.h
    if n_m > coupling.n:
        values = np.zeros((n_m, n_m), dtype=np.int8)
        values[: coupling.n, : coupling.n] = coupling.values
        h = np.zeros(n_m, dtype=np.int64)
        h[: coupling.n] = coupling.h
    return values, h


def run_trial(p: MaxCutProblem, cfg: EngineConfig, sched: AnnealSchedule) -> TrialResult:
    """Run one annealed trial of n_samples sweeps over the problem.

    Tracks the best cut/energy over all samples including the initial
    state (unless cfg.final_state_only). Cycle count follows the
    pseudo-parallel model: (ceil(n_m / k) + 1) * n_samples.
    """
    coupling = to_coupling(p)
    n_m = cfg.n_m if cfg.n_m is not None else p.n
    if p.n > n_m:
        raise ValueError(f"problem has {p.n} nodes, exceeds configured n_m={n_m}")
    values, h = _padded_coupling(coupling, n_m)
    spins = _initial_spins(cfg, n_m)
    bank = expand_seed(cfg.seed, RNG_BANK_WAYS)
    betas = sched.betas

    ei, ej, ew = p.edge_arrays
    record_states = cfg.record_state_trace

    if cfg.backend == "fast":
        lut_kind = cfg.activation if cfg.activation.is_lut else None
        lut = (
            np.asarray(build_lut(lut_kind).entries, dtype=np.int64)
            if lut_kind
            else np.zeros(1024, dtype=np.int64)
        )
        t = cfg.activation.threshold
        bank_states = np.array([l.state for l in bank], dtype=np.int64)
        energy_trace, cut_trace, states = _kernel.run_trial_kernel(
            np.ascontiguousarray(values),
            h,
            spins,
            np.array([b.raw for b in betas], dtype=np.int64),
            cfg.k,
            bank_states,
            _kernel.ACT_LUT if cfg.activation.is_lut else _kernel.ACT_PWL,
            t.bit_length() - 1,
            t << 20,
            lut,
            ei,
            ej,
            ew,
            record_states,
        )
    else:
        cm = CouplingMatrix.from_dense(values, h) if n_m > coupling.n else coupling
        energy_trace = np.empty(len(betas) + 1, dtype=np.int64)
        cut_trace = np.empty(len(betas) + 1, dtype=np.int64)
        states = (
            np.empty((len(betas) + 1, n_m), dtype=np.int8)
            if record_states
            else np.empty((1, 1), dtype=np.int8)
        )
        energy_trace[0], cut_trace[0] = _evaluate_sample(spins, p, h)
        if record_states:
            states[0] = spins
        for s, beta in enumerate(betas):
            if cfg.k == 1:
                spins = sweep_sequential(spins, cm, beta, bank, cfg.activation)
            else:
                spins = sweep_kway(spins, cm, beta, bank, cfg.activation, cfg.k)
            energy_trace[s + 1], cut_trace[s + 1] = _evaluate_sample(spins, p, h)
            if record_states:
                states[s + 1] = spins

    if cfg.final_state_only:
        best_at = len(betas)
        best_cut = int(cut_trace[best_at])
        best_energy = int(energy_trace[best_at])
    else:
        best_at = int(np.argmax(cut_trace))
        best_cut = int(cut_trace[best_at])
        best_energy = int(energy_trace.min())
        if energy_trace[best_at] != best_energy:
            # only possible with nonzero bias; report each extremum honestly
            warnings.warn("best cut and best energy occur at different samples")

    cycles, _ = hwmodel.cycles_and_time(n_m, len(betas), cfg.k)
    return TrialResult(
        final_state=SpinState.from_spins(spins),
        best_cut=best_cut,
        best_energy=best_energy,
        sample_at_best=best_at,
        cycles=cycles,
        seed_used=cfg.seed,
        energy_trace=energy_trace if cfg.record_energy_trace else None,
        cut_trace=cut_trace if cfg.record_cut_trace else None,
        state_trace=states if record_states else None,
    )


def _evaluate_sample(spins: np.ndarray, p: MaxCutProblem, h: np.ndarray):
    ei, ej, ew = p.edge_arrays
    prod = spins[ei].astype(np.int64) * spins[ej]
    e = int((ew * prod).sum()) - int(h[: spins.shape[0]] @ spins.astype(np.int64))
    cut = int(ew[prod < 0].sum())
    return e, cut
