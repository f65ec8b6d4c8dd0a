import os
from pathlib import Path

import pytest

from pbitcut.engine import AnnealSchedule, EngineConfig, run_trial
from pbitcut.problem import MaxCutProblem
from pbitcut.rng import SeedBlock, derive_seed

GSET_DATA_DIR = Path(__file__).parent / "data" / "gset"


def gset_file(name: str):
    """Locate a local copy of a published G-Set instance, or None."""
    env = os.environ.get("PBITCUT_GSET_DIR")
    candidates = ([Path(env) / name] if env else []) + [GSET_DATA_DIR / name]
    for candidate in candidates:
        if candidate.is_file():
            return candidate
    return None


def require_gset(name: str, criterion: str) -> Path:
    path = gset_file(name)
    if path is None:
        pytest.fail(
            f"{criterion} requires the published G-Set instance {name!r}, which is not "
            f"bundled (benchmark data is not redistributed here and this build "
            f"environment has no network access). Download it from the public G-Set "
            f"collection and place it at {GSET_DATA_DIR / name} or point "
            f"PBITCUT_GSET_DIR at a directory containing it; the test then runs "
            f"within its stated budget."
        )
    return path


@pytest.fixture(scope="session")
def warm_kernel():
    """Compile the fast path once so timed budgets measure the model, not JIT."""
    p = MaxCutProblem.from_edges(4, [(1, 2, 1), (2, 3, -1), (3, 4, 1)], name="warm")
    seed = derive_seed(SeedBlock(0xC0FFEE), 0)
    for kind in ("pwl1", "lut-tanh"):
        from pbitcut.activation import ActivationKind

        cfg = EngineConfig(seed=seed, k=4, activation=ActivationKind(kind),
                           record_state_trace=True)
        run_trial(p, cfg, AnnealSchedule.from_reals(0.5, 1.01, 3))
    return True
