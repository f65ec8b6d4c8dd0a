"""Benchmark harness entry point.

Subcommands:
  run       seeded multi-trial experiment, CSV/JSON report (+ figures)
  trace     per-sample energy/cut trace of a single trial (+ figure)
  validate  embedded oracle suite, table + exit status

Per-trial seeds derive from the base seed with a splittable hash, so a
report is fully determined by (base seed, configuration) regardless of
worker count; wall-time fields are the only nondeterministic output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .activation import ActivationKind
from .engine import AnnealSchedule, EngineConfig, run_trial
from .errors import ParseError
from .hwmodel import CLOCK_HZ
from .problem import DEFAULT_BEST_KNOWN, load_gset, load_registry
from .report import save_run_figure, save_trace_figure
from .rng import SEED_HEX_DIGITS, SeedBlock, derive_seed

DEFAULT_SEED_HEX = "0123456789abcdef" * 8

# annealing presets: (samples, beta_initial, beta_anneal_rate)
PRESETS = {
    "ns1000": (1000, 0.01, 1.005),
    "ns100": (100, 0.01, 1.05),
}

ACTIVATION_CHOICES = {kind.value: kind for kind in ActivationKind}


def _add_common_options(sub):
    sub.add_argument("--graph", required=True, help="G-Set file path, or a graph name resolved in --gset-dir")
    sub.add_argument("--gset-dir", default=os.environ.get("PBITCUT_GSET_DIR"),
                     help="directory searched when --graph is a bare name (env PBITCUT_GSET_DIR)")
    sub.add_argument("--k", type=int, choices=(1, 2, 4), default=4, help="pseudo-parallel update width")
    sub.add_argument("--activation", choices=sorted(ACTIVATION_CHOICES), default="pwl1")
    sub.add_argument("--preset", choices=sorted(PRESETS), default="ns1000",
                     help="annealing preset; explicit flags below override it")
    sub.add_argument("--samples", type=int, default=None, help="samples per trial (N_s)")
    sub.add_argument("--beta-init", type=float, default=None)
    sub.add_argument("--beta-rate", type=float, default=None)
    sub.add_argument("--seed", default=DEFAULT_SEED_HEX,
                     help=f"base seed, exactly {SEED_HEX_DIGITS} hex digits")
    sub.add_argument("--backend", choices=("fast", "reference"), default="fast")
    sub.add_argument("--output", default="-", help="output file, '-' for stdout")
    sub.add_argument("--plot", metavar="DIR", default=None,
                     help="also render figures into DIR")


def _resolve_graph(args):
    path = Path(args.graph)
    if path.is_file():
        return load_gset(path)
    if args.gset_dir:
        candidate = Path(args.gset_dir) / args.graph
        if candidate.is_file():
            return load_gset(candidate)
    raise FileNotFoundError(f"graph {args.graph!r} not found (looked for a file, then in --gset-dir)")


def _schedule(args) -> AnnealSchedule:
    samples, beta_init, beta_rate = PRESETS[args.preset]
    if args.samples is not None:
        samples = args.samples
    if args.beta_init is not None:
        beta_init = args.beta_init
    if args.beta_rate is not None:
        beta_rate = args.beta_rate
    return AnnealSchedule.from_reals(beta_init, beta_rate, samples)


def _accuracy_for(name, cut, registry):
    if name in registry:
        return cut / registry[name]
    return None


def _run_one_trial(payload):
    problem, kind, k, backend, base_seed_hex, index, traces, sched = payload
    seed = derive_seed(SeedBlock.from_hex(base_seed_hex), index)
    cfg = EngineConfig(
        seed=seed,
        k=k,
        activation=kind,
        record_energy_trace=traces,
        record_cut_trace=traces,
        backend=backend,
    )
    t0 = time.perf_counter()
    result = run_trial(problem, cfg, sched)
    wall = time.perf_counter() - t0
    return index, seed.to_hex(), result, wall


def cmd_run(args) -> int:
    if args.trials < 1:
        raise ValueError(f"--trials must be >= 1, got {args.trials}")
    if args.workers < 1:
        raise ValueError(f"--workers must be >= 1, got {args.workers}")
    problem = _resolve_graph(args)
    kind = ACTIVATION_CHOICES[args.activation]
    sched = _schedule(args)
    registry = load_registry(args.registry) if args.registry else dict(DEFAULT_BEST_KNOWN)
    payloads = [
        (problem, kind, args.k, args.backend, args.seed, t, args.trace_energy, sched)
        for t in range(args.trials)
    ]

    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            raw = list(pool.map(_run_one_trial, payloads))
    else:
        raw = [_run_one_trial(p) for p in payloads]
    raw.sort(key=lambda r: r[0])

    records = []
    for index, seed_hex, result, wall in raw:
        records.append(
            {
                "trial": index,
                "seed": seed_hex,
                "best_cut": result.best_cut,
                "best_energy": result.best_energy,
                "sample_at_best": result.sample_at_best,
                "accuracy": _accuracy_for(problem.name, result.best_cut, registry),
                "cycles": result.cycles,
                "model_time_s": result.cycles / CLOCK_HZ,
                "wall_time_s": wall,
                **(
                    {
                        "energy_trace": [int(v) for v in result.energy_trace],
                        "cut_trace": [int(v) for v in result.cut_trace],
                    }
                    if args.trace_energy
                    else {}
                ),
            }
        )

    report = {
        "version": __version__,
        "config": {
            "graph": problem.name,
            "nodes": problem.n,
            "edges": len(problem.edges),
            "k": args.k,
            "activation": kind.value,
            "samples": sched.n_samples,
            "beta_initial": sched.beta_initial.value,
            "beta_anneal_rate": sched.beta_anneal_rate.value,
            "trials": args.trials,
            "base_seed": args.seed,
            "backend": args.backend,
        },
        "trials": records,
        "aggregates": _aggregates(records),
    }

    if args.format == "json":
        _write_output(args.output, json.dumps(report, indent=2) + "\n")
    else:
        _write_output(args.output, _to_csv(records))

    if args.plot:
        plot_dir = Path(args.plot)
        plot_dir.mkdir(parents=True, exist_ok=True)
        save_run_figure(
            [r["best_cut"] for r in records],
            registry.get(problem.name),
            plot_dir / f"{problem.name or 'run'}_cuts.png",
            title=f"{problem.name}: {args.trials} trials, k={args.k}, N_s={sched.n_samples}",
        )
    return 0


def _aggregates(records):
    cuts = [r["best_cut"] for r in records]
    accs = [r["accuracy"] for r in records if r["accuracy"] is not None]
    return {
        "trials": len(records),
        "best_cut": max(cuts) if cuts else None,
        "mean_cut": sum(cuts) / len(cuts) if cuts else None,
        "best_energy": min(r["best_energy"] for r in records) if records else None,
        "mean_accuracy": sum(accs) / len(accs) if accs else None,
        "min_accuracy": min(accs) if accs else None,
        "max_accuracy": max(accs) if accs else None,
    }


CSV_FIELDS = (
    "trial", "seed", "best_cut", "best_energy", "sample_at_best",
    "accuracy", "cycles", "model_time_s", "wall_time_s",
)


def _fmt_field(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.9g}"
    return str(value)


def _to_csv(records) -> str:
    lines = [",".join(CSV_FIELDS)]
    for r in records:
        lines.append(",".join(_fmt_field(r[f]) for f in CSV_FIELDS))
    return "\n".join(lines) + "\n"


def cmd_trace(args) -> int:
    problem = _resolve_graph(args)
    kind = ACTIVATION_CHOICES[args.activation]
    sched = _schedule(args)
    seed = derive_seed(SeedBlock.from_hex(args.seed), args.trial)
    cfg = EngineConfig(
        seed=seed,
        k=args.k,
        activation=kind,
        record_energy_trace=True,
        record_cut_trace=True,
        backend=args.backend,
    )
    result = run_trial(problem, cfg, sched)

    lines = ["sample,beta,energy,cut"]
    for s in range(1, sched.n_samples + 1):
        beta = sched.betas[s - 1]
        lines.append(
            f"{s},{beta.value:.9g},{int(result.energy_trace[s])},{int(result.cut_trace[s])}"
        )
    _write_output(args.output, "\n".join(lines) + "\n")

    if args.plot:
        plot_dir = Path(args.plot)
        plot_dir.mkdir(parents=True, exist_ok=True)
        save_trace_figure(
            range(len(result.energy_trace)),
            [b.value for b in sched.betas],
            result.energy_trace,
            result.cut_trace,
            plot_dir / f"{problem.name or 'trace'}_trace.png",
            title=f"{problem.name}: energy/cut evolution, N_s={sched.n_samples}",
        )
    return 0


def cmd_validate(args) -> int:
    from .selfcheck import CheckResult, run_all

    registry = None
    registry_failure = None
    if args.registry:
        try:
            registry = load_registry(args.registry)
        except (ParseError, OSError) as exc:
            registry_failure = CheckResult("registry", False, f"override file: {exc}")

    results = run_all(registry, quick=args.quick)
    if registry_failure is not None:
        results = [registry_failure if r.name == "registry" else r for r in results]

    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    failed = sum(not r.passed for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def _write_output(target: str, text: str) -> None:
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pbitcut",
        description="p-bit max-cut sampling engine and G-Set benchmark harness",
    )
    parser.add_argument("--version", action="version", version=f"pbitcut {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="multi-trial benchmark run")
    _add_common_options(run)
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--workers", type=int, default=1)
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--trace-energy", action="store_true",
                     help="include per-sample energy/cut traces (JSON only)")
    run.add_argument("--registry", default=None, help="best-known-cut override file")
    run.set_defaults(func=cmd_run)

    trace = subs.add_parser("trace", help="per-sample trace of one trial")
    _add_common_options(trace)
    trace.add_argument("--trial", type=int, default=0, help="trial index for seed derivation")
    trace.set_defaults(func=cmd_trace)

    validate = subs.add_parser("validate", help="run the embedded oracle suite")
    validate.add_argument("--registry", default=None, help="best-known-cut override file")
    validate.add_argument("--quick", action="store_true",
                          help="reduced sample counts (smoke profile)")
    validate.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        print(f"pbitcut: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
