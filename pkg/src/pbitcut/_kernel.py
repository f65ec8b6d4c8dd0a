"""Compiled fast path for trial execution.

Everything here is exact int64 arithmetic mirroring the reference
implementation in `engine` bit for bit (asserted by the test suite):

  * LFSR: shift-left Fibonacci, taps {21, 19}, i.e. feedback
    (bit20 ^ bit18) into bit 0;
  * local field: raw(beta) * S with S the integer coupling sum, giving a
    wide value with 20 fractional bits (|raw| < 2^37, safely int64);
  * activation: clamp then arithmetic shift (PWL) or sign-folded
    mid-riser table lookup (LUT, bin width 2^13 raw units over [-4, +4]);
  * comparator: draw + activation >= 0 selects +1.

The k-way path performs real speculate-and-select work: for block offset
t it evaluates all 2^t candidate updates (one shared draw per position)
and then selects along the realized spin path, so its trajectory is
identical to the sequential one by construction.
"""

import numpy as np
from numba import njit

STATE_MASK = (1 << 21) - 1

ACT_PWL = 0
ACT_LUT = 1


@njit(cache=True)
def lfsr_full_period(seed):
    s = seed
    n = 0
    while True:
        fb = ((s >> 20) ^ (s >> 18)) & 1
        s = ((s << 1) | fb) & STATE_MASK
        n += 1
        if s == seed:
            return n


@njit(cache=True)
def run_trial_kernel(
    jmat,        # int8 (n, n) coupling values in {-1, 0, +1}, symmetric, zero diag
    h,           # int64 (n,) bias
    m,           # int8 (n,) spins in {-1, +1}; updated in place
    betas,       # int64 (n_s,) per-sample beta raw values (Q4.20)
    k,           # block width (1 = sequential)
    bank,        # int64 (nb,) LFSR states; updated in place
    act_kind,    # ACT_PWL or ACT_LUT
    act_shift,   # log2(T) for PWL
    act_clamp,   # T << 20 (4 << 20 for LUT)
    lut,         # int64 (1024,) raw Q1.20 entries (unused for PWL)
    ei, ej, ew,  # int64 edge arrays: endpoints (0-based) and weights
    record_states,
):
    """Run n_s annealed samples; returns per-sample traces and the states.

    Trace arrays have length n_s + 1 with index 0 holding the initial
    state's energy/cut. When record_states is false the states array is a
    (1, 1) placeholder.
    """
    n = m.shape[0]
    n_s = betas.shape[0]
    nb = bank.shape[0]
    n_edges = ei.shape[0]

    energy_trace = np.empty(n_s + 1, dtype=np.int64)
    cut_trace = np.empty(n_s + 1, dtype=np.int64)
    if record_states:
        states = np.empty((n_s + 1, n), dtype=np.int8)
        states[0, :] = m
    else:
        states = np.empty((1, 1), dtype=np.int8)

    # E = sum_e w * m_i * m_j - sum_i h_i * m_i  (J = -w form),
    # cut = sum over opposite-spin edges of w.
    e_acc = np.int64(0)
    c_acc = np.int64(0)
    for e in range(n_edges):
        p = m[ei[e]] * m[ej[e]]
        e_acc += ew[e] * p
        if p < 0:
            c_acc += ew[e]
    for i in range(n):
        e_acc -= h[i] * m[i]
    energy_trace[0] = e_acc
    cut_trace[0] = c_acc

    # full local-sum vector; maintained incrementally after each flip
    field = np.empty(n, dtype=np.int64)
    for i in range(n):
        acc = h[i]
        for j in range(n):
            acc += jmat[i, j] * m[j]
        field[i] = acc

    max_cands = 1 << (k - 1)
    cand = np.empty(max_cands, dtype=np.int8)
    rnd = np.empty(k, dtype=np.int64)
    realized = np.empty(k, dtype=np.int8)

    for s in range(n_s):
        braw = betas[s]
        pos0 = 0
        while pos0 < n:
            bk = k if pos0 + k <= n else n - pos0  # final block may be partial

            # one draw per position, consumed in ascending-position order
            # and shared by all speculative candidates for that position
            for t in range(bk):
                pos = pos0 + t
                st = bank[pos % nb]
                fb = ((st >> 20) ^ (st >> 18)) & 1
                st = ((st << 1) | fb) & STATE_MASK
                bank[pos % nb] = st
                rnd[t] = st - (1 << 21) if (st >> 20) & 1 else st

            sel = 0  # realized-spin index bits, bit u set = spin +1
            for t in range(bk):
                pos = pos0 + t
                # base sum: field w.r.t. the pre-block state minus the
                # contributions of the t in-block predecessors
                base = field[pos]
                for u in range(t):
                    base -= jmat[pos, pos0 + u] * m[pos0 + u]
                for a in range(1 << t):
                    ssum = base
                    for u in range(t):
                        if (a >> u) & 1:
                            ssum += jmat[pos, pos0 + u]
                        else:
                            ssum -= jmat[pos, pos0 + u]
                    c = braw * ssum  # exact wide product, 20 fractional bits
                    if c > act_clamp:
                        c = act_clamp
                    elif c < -act_clamp:
                        c = -act_clamp
                    if act_kind == ACT_LUT:
                        # sign-folded mid-riser index, ties away from zero
                        mag = c if c >= 0 else -c
                        mag >>= 13
                        if mag > 511:
                            mag = 511
                        idx = 512 + mag if c >= 0 else 511 - mag
                        act = lut[idx]
                    else:
                        act = c >> act_shift
                    cand[a] = 1 if rnd[t] + act >= 0 else -1
                realized[t] = cand[sel]
                if realized[t] == 1:
                    sel |= 1 << t

            # commit the block: flip spins and refresh the field vector
            for t in range(bk):
                pos = pos0 + t
                if realized[t] != m[pos]:
                    d = np.int64(2 * realized[t])
                    m[pos] = realized[t]
                    for j in range(n):
                        field[j] += jmat[pos, j] * d
            pos0 += bk

        e_acc = np.int64(0)
        c_acc = np.int64(0)
        for e in range(n_edges):
            p = m[ei[e]] * m[ej[e]]
            e_acc += ew[e] * p
            if p < 0:
                c_acc += ew[e]
        for i in range(n):
            e_acc -= h[i] * m[i]
        energy_trace[s + 1] = e_acc
        cut_trace[s + 1] = c_acc
        if record_states:
            states[s + 1, :] = m

    return energy_trace, cut_trace, states
