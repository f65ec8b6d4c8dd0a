import json
import subprocess
import sys

import pytest

from pbitcut.cli import DEFAULT_SEED_HEX, main

GRAPH_TEXT = (
    "6 7\n"
    "1 2 1\n1 3 1\n2 3 1\n3 4 1\n4 5 1\n4 6 1\n5 6 1\n"
)


@pytest.fixture()
def graph_file(tmp_path):
    path = tmp_path / "hex6"
    path.write_text(GRAPH_TEXT)
    return path


def run_cli(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def strip_wall(csv_text):
    rows = [line.split(",") for line in csv_text.strip().splitlines()]
    cut = rows[0].index("wall_time_s")
    return [",".join(r[:cut] + r[cut + 1:]) for r in rows]


class TestRun:
    def test_csv_report(self, graph_file, capsys):
        code, out, _ = run_cli(
            ["run", "--graph", graph_file, "--trials", "3", "--samples", "30"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0].startswith("trial,seed,best_cut")
        assert len(lines) == 4
        first = lines[1].split(",")
        assert first[0] == "0"
        assert len(first[1]) == 128
        assert int(first[2]) >= 0

    def test_json_report_structure(self, graph_file, capsys):
        code, out, _ = run_cli(
            ["run", "--graph", graph_file, "--trials", "2", "--samples", "25",
             "--format", "json", "--k", "2", "--activation", "lut-tanh"],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        assert report["config"]["graph"] == "hex6"
        assert report["config"]["nodes"] == 6
        assert report["config"]["edges"] == 7
        assert report["config"]["k"] == 2
        assert report["config"]["activation"] == "lut-tanh"
        assert report["config"]["base_seed"] == DEFAULT_SEED_HEX
        assert len(report["trials"]) == 2
        agg = report["aggregates"]
        assert agg["best_cut"] == max(t["best_cut"] for t in report["trials"])
        assert agg["mean_cut"] == sum(t["best_cut"] for t in report["trials"]) / 2
        # graph not in the registry: accuracy fields are null
        assert all(t["accuracy"] is None for t in report["trials"])
        assert agg["mean_accuracy"] is None

    def test_deterministic_modulo_wall_time(self, graph_file, capsys):
        argv = ["run", "--graph", graph_file, "--trials", "3", "--samples", "20"]
        _, first, _ = run_cli(argv, capsys)
        _, second, _ = run_cli(argv, capsys)
        assert first != second or first == second  # wall time may coincide
        assert strip_wall(first) == strip_wall(second)

    def test_json_deterministic_modulo_wall_time(self, graph_file, capsys):
        argv = ["run", "--graph", graph_file, "--trials", "2", "--samples", "15",
                "--format", "json"]
        reports = []
        for _ in range(2):
            _, out, _ = run_cli(argv, capsys)
            report = json.loads(out)
            for trial in report["trials"]:
                trial.pop("wall_time_s")
            reports.append(report)
        assert reports[0] == reports[1]

    def test_bad_trial_counts_rejected(self, graph_file, capsys):
        code, _, err = run_cli(
            ["run", "--graph", graph_file, "--trials", "0"], capsys
        )
        assert code == 2 and "--trials" in err
        code, _, err = run_cli(
            ["run", "--graph", graph_file, "--workers", "0"], capsys
        )
        assert code == 2 and "--workers" in err

    def test_workers_do_not_change_results(self, graph_file, capsys):
        base = ["run", "--graph", graph_file, "--trials", "4", "--samples", "15"]
        _, serial, _ = run_cli(base + ["--workers", "1"], capsys)
        _, parallel, _ = run_cli(base + ["--workers", "2"], capsys)
        assert strip_wall(serial) == strip_wall(parallel)

    def test_zero_samples_echoes_initial_cut(self, graph_file, capsys):
        code, out, _ = run_cli(
            ["run", "--graph", graph_file, "--trials", "1", "--samples", "0"], capsys
        )
        assert code == 0
        row = out.strip().splitlines()[1].split(",")
        assert row[4] == "0"  # sample_at_best is the initial state
        assert row[6] == "0"  # zero cycles

    def test_registry_override_gives_accuracy(self, graph_file, tmp_path, capsys):
        reg = tmp_path / "reg.txt"
        reg.write_text("hex6 5\n")
        code, out, _ = run_cli(
            ["run", "--graph", graph_file, "--trials", "1", "--samples", "40",
             "--registry", reg, "--format", "json"],
            capsys,
        )
        assert code == 0
        report = json.loads(out)
        got = report["trials"][0]
        assert got["accuracy"] == got["best_cut"] / 5

    def test_output_file_and_plot(self, graph_file, tmp_path, capsys):
        out_file = tmp_path / "report.csv"
        plot_dir = tmp_path / "figs"
        code, _, _ = run_cli(
            ["run", "--graph", graph_file, "--trials", "2", "--samples", "10",
             "--output", out_file, "--plot", plot_dir],
            capsys,
        )
        assert code == 0
        assert out_file.read_text().startswith("trial,seed")
        png = plot_dir / "hex6_cuts.png"
        assert png.is_file() and png.stat().st_size > 1000

    def test_gset_dir_resolution(self, graph_file, capsys):
        code, out, _ = run_cli(
            ["run", "--graph", "hex6", "--gset-dir", graph_file.parent,
             "--trials", "1", "--samples", "5"],
            capsys,
        )
        assert code == 0
        assert out.startswith("trial,seed")

    def test_missing_graph_fails_cleanly(self, capsys):
        code, _, err = run_cli(["run", "--graph", "/nonexistent/G999"], capsys)
        assert code == 2
        assert "not found" in err

    def test_bad_seed_rejected(self, graph_file, capsys):
        code, _, err = run_cli(
            ["run", "--graph", graph_file, "--seed", "abc123"], capsys
        )
        assert code == 2
        assert "128 hex digits" in err

    def test_preset_ns100(self, graph_file, capsys):
        code, out, _ = run_cli(
            ["run", "--graph", graph_file, "--preset", "ns100", "--samples", "8",
             "--trials", "1", "--format", "json"],
            capsys,
        )
        assert code == 0
        config = json.loads(out)["config"]
        assert config["samples"] == 8  # explicit flag wins
        assert abs(config["beta_anneal_rate"] - 1.05) < 1e-5

    def test_trace_energy_in_json(self, graph_file, capsys):
        code, out, _ = run_cli(
            ["run", "--graph", graph_file, "--trials", "1", "--samples", "12",
             "--format", "json", "--trace-energy"],
            capsys,
        )
        assert code == 0
        trial = json.loads(out)["trials"][0]
        assert len(trial["energy_trace"]) == 13  # initial state + 12 samples
        assert len(trial["cut_trace"]) == 13
        assert max(trial["cut_trace"]) == trial["best_cut"]


class TestTrace:
    def test_row_shape(self, graph_file, capsys):
        code, out, _ = run_cli(
            ["trace", "--graph", graph_file, "--samples", "9"], capsys
        )
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "sample,beta,energy,cut"
        assert len(lines) == 10
        assert lines[1].split(",")[0] == "1"

    def test_single_sample(self, graph_file, capsys):
        _, out, _ = run_cli(["trace", "--graph", graph_file, "--samples", "1"], capsys)
        assert len(out.strip().splitlines()) == 2

    def test_beta_starts_at_beta_initial(self, graph_file, capsys):
        _, out, _ = run_cli(["trace", "--graph", graph_file, "--samples", "3"], capsys)
        beta0 = float(out.strip().splitlines()[1].split(",")[1])
        assert abs(beta0 - 0.01) <= 2**-20

    def test_energy_cut_identity_per_row(self, graph_file, capsys):
        # all weights are +1 here: energy = |E| - 2 * cut on every row
        _, out, _ = run_cli(["trace", "--graph", graph_file, "--samples", "30"], capsys)
        for line in out.strip().splitlines()[1:]:
            _, _, e, c = line.split(",")
            assert int(e) == 7 - 2 * int(c)

    def test_trial_index_changes_seed(self, graph_file, capsys):
        _, t0, _ = run_cli(["trace", "--graph", graph_file, "--samples", "20"], capsys)
        _, t5, _ = run_cli(
            ["trace", "--graph", graph_file, "--samples", "20", "--trial", "5"], capsys
        )
        assert t0 != t5

    def test_plot_written(self, graph_file, tmp_path, capsys):
        plot_dir = tmp_path / "figs"
        code, _, _ = run_cli(
            ["trace", "--graph", graph_file, "--samples", "12", "--plot", plot_dir,
             "--output", tmp_path / "trace.csv"],
            capsys,
        )
        assert code == 0
        assert (plot_dir / "hex6_trace.png").stat().st_size > 1000


class TestValidate:
    def test_fresh_build_passes(self, capsys):
        code, out, _ = run_cli(["validate"], capsys)
        assert code == 0
        assert "6/6 checks passed" in out
        assert "FAIL" not in out

    def test_corrupted_registry_fails_only_registry(self, tmp_path, capsys):
        bad = tmp_path / "reg.txt"
        bad.write_text("G1 not-a-number\n")
        code, out, _ = run_cli(["validate", "--quick", "--registry", bad], capsys)
        assert code == 1
        lines = out.strip().splitlines()
        table = [l for l in lines if "PASS" in l or "FAIL" in l]
        failing = [l for l in table if "FAIL" in l]
        assert len(failing) == 1
        assert failing[0].startswith("registry")
        assert "5/6 checks passed" in out


class TestEntryPoint:
    def test_module_and_script_versions(self):
        got = subprocess.run(
            [sys.executable, "-m", "pbitcut", "--version"],
            capture_output=True, text=True,
        )
        assert got.returncode == 0
        assert got.stdout.strip().startswith("pbitcut ")
