"""Bit-accurate p-bit sampling engine with hardware-faithful fixed-point
arithmetic, a k-way speculate-and-select update core, an accelerator
timing/encoding model, and a G-Set max-cut benchmark harness."""

__version__ = "0.1.0"

from .activation import ActivationKind, LutTable, build_lut, evaluate
from .engine import AnnealSchedule, EngineConfig, TrialResult, run_trial
from .fixedpoint import Q0_20, Q1_20, Q2_20, Q4_20, FixedQ, QFormat, from_real
from .problem import (
    CouplingMatrix,
    MaxCutProblem,
    SpinState,
    accuracy,
    cut_value,
    energy,
    load_gset,
    parse_gset,
    to_coupling,
)
from .rng import Lfsr21, SeedBlock, derive_seed, expand_seed

__all__ = [
    "ActivationKind",
    "AnnealSchedule",
    "CouplingMatrix",
    "EngineConfig",
    "FixedQ",
    "Lfsr21",
    "LutTable",
    "MaxCutProblem",
    "QFormat",
    "Q0_20",
    "Q1_20",
    "Q2_20",
    "Q4_20",
    "SeedBlock",
    "SpinState",
    "TrialResult",
    "accuracy",
    "build_lut",
    "cut_value",
    "derive_seed",
    "energy",
    "evaluate",
    "expand_seed",
    "from_real",
    "load_gset",
    "parse_gset",
    "run_trial",
    "to_coupling",
]
