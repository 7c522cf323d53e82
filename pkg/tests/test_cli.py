"""Config parsing, presets, subcommands, CSV outputs."""

import csv
import math

import numpy as np
import pytest

from memwave.cli import (
    ConfigError,
    RunConfig,
    dump_weights,
    main,
    manufactured_solution,
    parse_config,
    preset_problem,
    run_convergence,
    run_single,
    serialize_config,
)
from memwave.kernel import KernelSpec

BENCH_1D = """
[run]
preset = benchmark_1d
dim = 1
m = 16
n = 16
t = 1.0

[kernel]
alpha = 1.0
sigma = 2.0
gamma = 2.0

[output]
energy = true
"""

ZERO_CFG = """
[run]
preset = zero
dim = 1
m = 8
n = 8
t = 1.0

[output]
energy = true
checkpoints = 0, 8
"""

MANUFACTURED_CFG = """
[run]
preset = manufactured
dim = 1
m = 32
n = 64
t = 1.0
"""


class TestConfigParsing:
    def test_parse_basic(self):
        cfg = parse_config(BENCH_1D)
        assert cfg.preset == "benchmark_1d"
        assert cfg.kernel == KernelSpec(1.0, 2.0, 2.0)
        assert cfg.energy is True
        assert cfg.tau == pytest.approx(1.0 / 16)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown key"):
            parse_config(BENCH_1D + "\nfoo = 1\n")

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config(BENCH_1D + "\n[plotting]\nstyle = fancy\n")

    def test_missing_kernel_for_benchmark(self):
        text = BENCH_1D.replace("[kernel]\nalpha = 1.0\nsigma = 2.0\ngamma = 2.0\n", "")
        with pytest.raises(ConfigError, match=r"kernel"):
            parse_config(text)

    def test_damping_fixed_by_preset(self):
        with pytest.raises(ConfigError, match="damping"):
            parse_config(BENCH_1D + "\n[damping]\nkind = affine\n")

    def test_manufactured_forbids_kernel(self):
        with pytest.raises(ConfigError, match="kernel"):
            parse_config(MANUFACTURED_CFG + "\n[kernel]\nalpha = 1.0\nsigma = 2.0\n")

    def test_dim_consistency(self):
        with pytest.raises(ConfigError, match="dim"):
            parse_config(BENCH_1D.replace("dim = 1", "dim = 2"))

    def test_invalid_numbers_name_the_field(self):
        with pytest.raises(ConfigError, match="run.m"):
            parse_config(BENCH_1D.replace("m = 16", "m = sixteen"))

    def test_checkpoint_bounds(self):
        with pytest.raises(ConfigError, match="checkpoints"):
            parse_config(ZERO_CFG.replace("checkpoints = 0, 8", "checkpoints = 9"))

    def test_file_not_found(self):
        with pytest.raises(ConfigError, match="not found"):
            parse_config("/nonexistent/path.ini")

    def test_roundtrip_idempotent(self):
        cfg = parse_config(BENCH_1D)
        text = serialize_config(cfg)
        again = parse_config(text)
        assert again == cfg
        assert serialize_config(again) == text

    def test_roundtrip_zero_preset(self):
        cfg = parse_config(ZERO_CFG + "\n[damping]\nkind = constant\nconstant = 2.0\n")
        assert serialize_config(parse_config(serialize_config(cfg))) == serialize_config(cfg)


class TestPresets:
    def test_benchmark_1d_pins_damping(self):
        cfg = parse_config(BENCH_1D)
        problem, kernel, damping = preset_problem(cfg)
        assert damping.kind == "sqrt" and damping.mu1 == 1.0 and damping.mu2 == 1.0
        assert kernel == cfg.kernel
        # the forcing follows the kernel parameters
        x = np.array([0.25])
        t = 0.6
        expected = t ** 1.0 * math.exp(-2.0 * t) * math.cos(2.0 * t) * math.sin(math.pi * 0.25)
        assert problem.f(x, t)[0] == pytest.approx(expected, rel=1e-14)
        assert problem.f(x, 0.0)[0] == 0.0

    def test_zero_preset_defaults(self):
        cfg = parse_config(ZERO_CFG)
        problem, kernel, damping = preset_problem(cfg)
        assert damping.kind == "sqrt"
        assert isinstance(kernel, KernelSpec)
        assert np.all(problem.u0(np.linspace(0, 1, 5)) == 0.0)

    def test_manufactured_consistency(self):
        # the pinned forcing satisfies u'' + u' - u_xx = f for the exact field
        cfg = parse_config(MANUFACTURED_CFG)
        problem, kernel, damping = preset_problem(cfg)
        assert damping.kind == "constant" and damping.constant == 1.0
        x, t = np.array([0.3]), 0.4
        u = manufactured_solution(x, t)
        lhs = u - u + np.pi**2 * u  # u'' = u, u' = -u, -u_xx = pi^2 u
        assert problem.f(x, t)[0] == pytest.approx(lhs[0], rel=1e-12)


class TestRunSingle:
    def test_zero_preset_produces_zero_series(self, tmp_path):
        cfg = parse_config(ZERO_CFG)
        cfg = cfg.__class__(**{**cfg.__dict__, "out_dir": str(tmp_path)})
        record, paths = run_single(cfg)
        assert np.all(record.energy == 0.0)
        names = {p.name for p in paths}
        assert "energy.csv" in names and "checkpoint_000000.csv" in names
        with open(tmp_path / "checkpoint_000008.csv") as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["node", "value"]
        assert all(float(r[1]) == 0.0 for r in rows[1:])

    def test_benchmark_energy_decreases(self, tmp_path):
        cfg = parse_config(BENCH_1D)
        cfg = cfg.__class__(**{**cfg.__dict__, "out_dir": str(tmp_path)})
        record, _ = run_single(cfg, zero_forcing=True)
        assert record.energy[-1] < record.energy[0]

    def test_manufactured_tracks_exact_solution(self):
        cfg = parse_config(MANUFACTURED_CFG)
        record, _ = run_single(cfg)
        mesh_h = 1.0 / cfg.m
        xs = mesh_h * np.arange(1, cfg.m)
        exact_grad = np.pi * math.exp(-1.0) * np.cos(np.pi * (xs - mesh_h / 2.0))
        err = math.sqrt(mesh_h * float(np.sum((record.terminal_gradient - exact_grad) ** 2)))
        assert err < 0.05


class TestConvergence:
    def test_ladder_validation(self):
        cfg = parse_config(BENCH_1D)
        with pytest.raises(ConfigError):
            run_convergence(cfg, "time", [16, 16])
        with pytest.raises(ConfigError):
            run_convergence(cfg, "time", [16, 48])
        with pytest.raises(ConfigError):
            run_convergence(cfg, "time", [])
        with pytest.raises(ConfigError):
            run_convergence(cfg, "sideways", [8, 16])

    def test_small_time_ladder(self):
        cfg = parse_config(BENCH_1D)
        rows = run_convergence(cfg, "time", [8, 16])
        assert len(rows) == 2
        assert rows[0][3] is None
        assert rows[1][3] == pytest.approx(2.0, abs=0.3)

    def test_small_space_ladder(self):
        cfg = parse_config(BENCH_1D)
        rows = run_convergence(cfg, "space", [8, 16])
        assert rows[1][3] == pytest.approx(1.0, abs=0.3)
        assert [r[1] for r in rows] == [16, 16]


class TestWeightsDump:
    def test_rows_and_flag(self):
        cfg = parse_config(BENCH_1D)
        table, rows = dump_weights(cfg, n_max=12)
        assert len(rows) == sum(n + 1 for n in range(1, 13))
        flags = [r[4] for r in rows if r[4] is not None]
        assert flags[-1] is True
        # spot-check a row against the table accessor
        n, p, w = rows[5][:3]
        assert w == table.weight(n, p)

    def test_requires_kernel(self):
        cfg = parse_config(ZERO_CFG)
        assert cfg.kernel is None
        with pytest.raises(ConfigError):
            dump_weights(cfg, 4)


class TestMainEntry:
    def _write(self, tmp_path, text):
        path = tmp_path / "config.ini"
        path.write_text(text)
        return str(path)

    def test_run_command(self, tmp_path, capsys):
        path = self._write(tmp_path, ZERO_CFG)
        code = main(["run", "--config", path, "--out", str(tmp_path / "out")])
        assert code == 0
        assert (tmp_path / "out" / "energy.csv").exists()

    def test_energy_command_deterministic(self, tmp_path):
        path = self._write(tmp_path, BENCH_1D)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["energy", "--config", path, "--out", str(out1)]) == 0
        assert main(["energy", "--config", path, "--out", str(out2)]) == 0
        assert (out1 / "energy.csv").read_bytes() == (out2 / "energy.csv").read_bytes()

    def test_convergence_command(self, tmp_path, capsys):
        path = self._write(tmp_path, BENCH_1D)
        code = main(["convergence", "--config", path, "--mode", "time",
                     "--ladder", "8,16", "--out", str(tmp_path / "conv")])
        assert code == 0
        csv_path = tmp_path / "conv" / "convergence_time.csv"
        with open(csv_path) as handle:
            rows = list(csv.reader(handle))
        assert rows[0] == ["M", "N", "E", "CR"]
        assert len(rows) == 3

    def test_weights_command(self, tmp_path):
        path = self._write(tmp_path, BENCH_1D)
        code = main(["weights", "--config", path, "--out", str(tmp_path / "w")])
        assert code == 0
        text = (tmp_path / "w" / "weights.csv").read_text()
        assert text.startswith("n,p,weight,edge_running_sum,sum_le_one")

    def test_config_error_exit_code(self, tmp_path, capsys):
        path = self._write(tmp_path, BENCH_1D + "\nbogus = 1\n")
        assert main(["run", "--config", path]) == 2
        assert "config error" in capsys.readouterr().err

    def test_bad_ladder_exit_code(self, tmp_path, capsys):
        path = self._write(tmp_path, BENCH_1D)
        assert main(["convergence", "--config", path, "--mode", "time",
                     "--ladder", "8,24"]) == 2
