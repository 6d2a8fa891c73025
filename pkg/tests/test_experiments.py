import json
import warnings

import pytest
import yaml

from posgame.cli import main
from posgame.engine import Transcript
from posgame.experiments import (CSV_COLUMNS, ConfigError, ExperimentConfig, ResultRecord, cell_seed, fit_exponents,
                                 normalized_value, records_csv, run_cell, run_experiment, write_outputs)
from posgame.graphcore import Board, Pattern
from posgame.strategies import triangle_guarantee


def _cfg(**kw):
    base = dict(pattern="k3", waiter="random", client="random", sizes=[6], biases=[1], seeds=[0, 1])
    base.update(kw)
    return ExperimentConfig(**base)


def _rec(n, b, value):
    return ResultRecord("p3", "complete", n, b, 0, "w", "c", value, None)


class TestConfig:
    @pytest.mark.parametrize("bad", [dict(sizes=[]), dict(biases=[]), dict(seeds=[1, 1]), dict(biases=[0]),
                                     dict(board="torus"), dict(pattern="zz"), dict(workers=0),
                                     dict(sizes=["a"])])
    def test_rejected(self, bad):
        with pytest.raises(ConfigError):
            _cfg(**bad)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="unknown"):
            ExperimentConfig.from_mapping({"pattern": "k3", "waiter": "random", "client": "random",
                                           "sizes": [4], "biases": [1], "colour": "red"})

    def test_nested(self):
        with pytest.raises(ConfigError, match="flat"):
            ExperimentConfig.from_mapping({"pattern": "k3", "waiter": "random", "client": "random",
                                           "sizes": [4], "biases": {"a": 1}})

    def test_missing_key(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_mapping({"pattern": "k3"})

    def test_yaml(self, tmp_path):
        p = tmp_path / "c.yaml"
        p.write_text("pattern: p3\nwaiter: random\nclient: random\nsizes: [5, 6]\nbiases: [1]\n")
        cfg = ExperimentConfig.from_yaml(p)
        assert cfg.sizes == [5, 6] and cfg.seeds == [0]

    def test_isolated_vertices_stripped(self):
        cfg = _cfg(pattern="4:0-1,1-2")
        with pytest.warns(UserWarning):
            assert cfg.H.v == 3


class TestRun:
    def test_order_and_count(self):
        cfg = _cfg(sizes=[5, 6], biases=[1, 2], seeds=[3, 4])
        recs = run_experiment(cfg)
        assert [(r.n, r.b, r.seed) for r in recs] == [(n, b, s) for n in (5, 6) for b in (1, 2) for s in (3, 4)]

    def test_parallel_matches_serial(self):
        cfg = _cfg(sizes=[6, 7], seeds=[0, 1, 2])
        serial = records_csv(run_experiment(cfg, 5))
        cfg.workers = 2
        assert records_csv(run_experiment(cfg, 5)) == serial

    def test_master_seed_changes_games(self):
        cfg = _cfg(pattern="p3", sizes=[9], seeds=list(range(6)))
        assert records_csv(run_experiment(cfg, 1)) != records_csv(run_experiment(cfg, 2))

    def test_cell_seed_stable(self):
        assert cell_seed(0, 1, 2, 3) == cell_seed(0, 1, 2, 3) != cell_seed(0, 1, 2, 4)

    def test_normalized(self):
        H = Pattern.complete(3)
        assert normalized_value(8, H, 2, 1) == 8
        rec = run_cell(_cfg(), 6, 1, 0)
        assert rec.normalized == normalized_value(rec.value, H, 6, 1) >= 0

    def test_envelope_with_potential_client(self):
        rec = run_cell(_cfg(client="potential-client", sizes=[7]), 7, 1, 0)
        assert rec.envelope == "ok"

    def test_surrogate_bias(self):
        cfg = _cfg(pattern="k3", waiter="triangle", board="blowup", sizes=[3])
        rec = run_cell(cfg, 3, 3, 0)
        assert rec.value is None and "no admissible bias" in rec.error
        # the sparse tree window for a single edge first opens at n = 256 with b = n
        rec = run_cell(_cfg(pattern="p2", waiter="tree-sparse", sizes=[256]), 256, 1, 0)
        assert rec.surrogate_b == 256 and rec.value == len(Board.complete(256)) // 257
        assert rec.regime_exceeded

    def test_incompatible_cell_reported(self):
        rec = run_cell(_cfg(pattern="k3", waiter="triangle", board="complete", surrogate=False), 6, 1, 0)
        assert rec.value is None and "blow-up" in rec.error

    def test_regime_flag(self):
        rec = run_cell(_cfg(pattern="p3", waiter="tree-dense", enforce_window=False), 6, 1, 0)
        assert rec.regime_exceeded and rec.value is not None

    @pytest.mark.parametrize("s,b", [(30, 1), (30, 2)])
    def test_triangle_vs_greedy(self, s, b):
        cfg = _cfg(waiter="triangle", client="greedy-client", board="blowup", sizes=[s], biases=[b], seeds=[0])
        (rec,) = run_experiment(cfg)
        assert rec.value >= triangle_guarantee(s, b)


class TestOutputs:
    def test_csv_columns(self):
        text = records_csv(run_experiment(_cfg()))
        assert text.splitlines()[0] == ",".join(CSV_COLUMNS)

    def test_reproducible_bytes(self, tmp_path):
        cfg = _cfg(pattern="p3", sizes=[7, 8], seeds=[0, 1])
        a, _ = write_outputs(run_experiment(cfg, 9), tmp_path / "a.csv")
        b, _ = write_outputs(run_experiment(cfg, 9), tmp_path / "b.csv")
        assert a.read_bytes() == b.read_bytes()

    def test_json_mirror(self, tmp_path):
        _, j = write_outputs(run_experiment(_cfg()), tmp_path / "r.csv")
        data = json.loads(j.read_text())
        assert data["schema"] == 1 and len(data["records"]) == 2
        assert "regime_exceeded" in data["records"][0]

    def test_timing_only_when_asked(self):
        assert all(r.elapsed_ms == 0 for r in run_experiment(_cfg()))


class TestFit:
    def test_exact_power_in_n(self):
        fit = fit_exponents([_rec(n, 1, n**3) for n in (8, 16, 32, 64)])
        assert fit.slope_n == pytest.approx(3, abs=1e-9) and fit.slope_b is None

    def test_exact_power_in_b(self):
        n = 64
        fit = fit_exponents([_rec(n, b, n**3 / (b + 1) ** 3) for b in (1, 2, 3, 4)])
        assert fit.slope_b == pytest.approx(-3, abs=1e-9)

    def test_both(self):
        recs = [_rec(n, 1, n**3 / 4) for n in (8, 16, 32)] + [_rec(32, b, 32**3 / (b + 1) ** 2) for b in (2, 3)]
        fit = fit_exponents(recs)
        assert fit.slope_n == pytest.approx(3) and fit.slope_b == pytest.approx(-2)

    def test_zero_excluded_with_warning(self):
        recs = [_rec(n, 1, n**2) for n in (4, 8, 16)] + [_rec(32, 1, 0)]
        with pytest.warns(UserWarning, match="excluding 1"):
            fit = fit_exponents(recs)
        assert fit.excluded == 1 and fit.slope_n == pytest.approx(2)

    def test_insufficient(self):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            with pytest.raises(ValueError):
                fit_exponents([_rec(4, 1, 5), _rec(8, 1, 9)])


class TestCli:
    def test_invariants(self, capsys):
        assert main(["invariants", "k5-3"]) == 0
        out = capsys.readouterr().out
        assert "g1  = 1/2" in out and "g2  = 1/2" in out and "m2  = 2 " in out

    def test_invariants_file(self, tmp_path, capsys):
        p = tmp_path / "g.txt"
        p.write_text("0 1\n1 2\n0 2\n")
        assert main(["invariants", str(p)]) == 0
        assert "m   = 1 " in capsys.readouterr().out

    def test_solve(self, capsys):
        assert main(["solve", "--board", "k5", "--pattern", "k3", "--b", "1"]) == 0
        out = capsys.readouterr().out
        assert "value: 1" in out and out.count("R") == 5

    def test_play_transcript(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("POSGAME_SEED", "4")
        t = tmp_path / "t.txt"
        args = ["play", "--waiter", "triangle", "--client", "greedy-client", "--board", "blowup(k3,6)",
                "--pattern", "k3", "--b", "1", "--transcript", str(t)]
        assert main(args) == 0
        tr = Transcript.from_text(t.read_text())
        assert tr.seed == 4 and len(tr) == 54

    def test_sweep_stdout_and_file(self, tmp_path, capsys, monkeypatch):
        cfg = tmp_path / "c.yaml"
        cfg.write_text(yaml.safe_dump(dict(pattern="p3", waiter="random", client="random", sizes=[6, 7],
                                           biases=[1], seeds=[0, 1])))
        monkeypatch.setenv("POSGAME_SEED", "3")
        assert main(["sweep", "--config", str(cfg)]) == 0
        first = capsys.readouterr().out
        assert main(["sweep", "--config", str(cfg), "--output", str(tmp_path / "o.csv")]) == 0
        assert (tmp_path / "o.csv").read_text() == first

    def test_randlab(self, capsys):
        assert main(["randlab", "--pattern", "k3", "--n", "5", "--p", "0.5", "--seeds", "0,1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "n,p,M,seed,copies,family,p1,p2,p3,p4,p5" and len(lines) == 3

    @pytest.mark.parametrize("argv", [["sweep", "--config", "/nonexistent.yaml"], ["invariants", "q9"],
                                      ["frobnicate"], ["randlab", "--pattern", "k3", "--n", "4"],
                                      ["play", "--waiter", "tree-dense", "--client", "random", "--board", "k10",
                                       "--pattern", "p3"]])
    def test_config_errors_exit_2(self, argv, capsys):
        assert main(argv) == 2

    def test_bad_seed_env(self, monkeypatch, capsys):
        monkeypatch.setenv("POSGAME_SEED", "x")
        assert main(["play", "--waiter", "random", "--client", "random", "--board", "k4", "--pattern", "k3"]) == 2

    def test_illegal_move_exit_3(self, monkeypatch, capsys):
        import posgame.cli as cli

        class Bad:
            def start(self, state, rng):
                pass

            def offer(self, state):
                return [0]

        monkeypatch.setattr(cli, "make_waiter", lambda *a, **k: Bad())
        assert main(["play", "--waiter", "random", "--client", "random", "--board", "k4", "--pattern", "k3"]) == 3
        assert "illegal move" in capsys.readouterr().err
