"""Tests for the resource-games command line"""
import pytest
from typer.testing import CliRunner

from conftest import A1_LASSO, A1_LASSO_LEVELS, A1_TEXT, A2_TEXT, THREE_PARITY_TEXT
from resource_games.__main__ import app

A1_STRATEGY = """\
x sigma=_x:step(y:1)
y theta=6 acceptor=_y:step(x:1) base=_y:step(y1:0)
y1 theta=4 acceptor=_y1:step(y:6) base=_y1:step(y:2)
y2 theta=2 acceptor=_y2:step(y:6) base=_y2:step(y:4)
"""

A1_PLAY_FROM_Y = "(y,1)(y1,0)(y,2)(y1,1)(y,3)(y1,2)(y,4)(y1,3)(y,5)(y1,4)(y,6)(x,1)"


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def a1_path(model_file):
    return str(model_file(A1_TEXT, "a1.txt"))


@pytest.fixture
def a2_path(model_file):
    return str(model_file(A2_TEXT, "a2.txt"))


def synthesized(runner, model_path, tmp_path):
    out = tmp_path / "strategy.txt"
    result = runner.invoke(app, ["synth", model_path, "--out", str(out)])
    assert result.exit_code == 0, result.output
    return str(out)


class TestCheck:
    def test_a1(self, runner, a1_path):
        result = runner.invoke(app, ["check", a1_path])
        assert result.exit_code == 0
        assert result.stdout == "states=4 transitions=6 automaton=true buchi=true parities=1,2\n"

    def test_a2(self, runner, a2_path):
        result = runner.invoke(app, ["check", a2_path])
        assert "automaton=false buchi=true" in result.stdout

    def test_malformed(self, runner, model_file):
        path = model_file(A1_TEXT.replace("trans y1 step(y) 0", "trans y1 step(y) zero"))
        result = runner.invoke(app, ["check", str(path)])
        assert result.exit_code == 2
        assert "line 12" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(app, ["check", str(tmp_path / "absent.txt")])
        assert result.exit_code == 2
        assert "Cannot read" in result.output


class TestExtent:
    @pytest.mark.parametrize("engine", ["generic", "fig1"])
    def test_a1(self, runner, a1_path, engine):
        result = runner.invoke(app, ["extent", a1_path, "--engine", engine])
        assert result.exit_code == 0
        assert result.stdout == "x=1\ny=1\ny1=0\ny2=0\n"

    def test_unknown_engine(self, runner, a1_path):
        assert runner.invoke(app, ["extent", a1_path, "--engine", "magic"]).exit_code == 2

    def test_fig1_rejects_boolean(self, runner, model_file):
        path = model_file("semiring boolean\nsig step/1\nstate p parity 2 offset 0\ntrans p step(p) 1\n")
        assert runner.invoke(app, ["extent", str(path), "--engine", "fig1"]).exit_code == 3


class TestSynth:
    def test_writes_strategy_file(self, runner, a1_path, tmp_path):
        out = tmp_path / "a1.strategy"
        result = runner.invoke(app, ["synth", a1_path, "--out", str(out)])
        assert result.exit_code == 0
        assert out.read_text(encoding="utf-8") == A1_STRATEGY
        assert "y theta=6 ext=1" in result.stdout

    def test_prints_strategy(self, runner, a1_path):
        result = runner.invoke(app, ["synth", a1_path])
        assert result.stdout.startswith(A1_STRATEGY)

    def test_parity_synthesis_unsupported(self, runner, model_file):
        result = runner.invoke(app, ["synth", str(model_file(THREE_PARITY_TEXT))])
        assert result.exit_code == 3
        assert "unsupported: parity synthesis" in result.output


class TestValue:
    def test_annotated_lasso(self, runner, a1_path, model_file):
        levels = "".join(f"level n{i} {n}\n" for i, n in enumerate(A1_LASSO_LEVELS))
        run = model_file(A1_LASSO + levels, "lasso.run")
        result = runner.invoke(app, ["value", a1_path, str(run)])
        assert result.exit_code == 0
        assert result.stdout == "value=1\naccepting=true\nannotation=ok\n"

    def test_invalid_run(self, runner, a1_path, model_file):
        run = model_file("node n0 x step(n0,n0)\nroot n0\n", "bad.run")
        assert runner.invoke(app, ["value", a1_path, str(run)]).exit_code == 2


class TestSimulate:
    def test_a1_from_y(self, runner, a1_path, tmp_path):
        strategy = synthesized(runner, a1_path, tmp_path)
        result = runner.invoke(app, ["simulate", a1_path, strategy, "--from", "y", "--mem", "1"])
        assert result.exit_code == 0
        assert result.stdout == f"{A1_PLAY_FROM_Y}\nACCEPTING value=1\n"

    def test_below_the_strategy(self, runner, a1_path, tmp_path):
        strategy = synthesized(runner, a1_path, tmp_path)
        result = runner.invoke(app, ["simulate", a1_path, strategy, "--from", "y", "--mem", "0"])
        assert result.exit_code == 4
        assert "strategy undefined at (y,0)" in result.output

    def test_step_budget(self, runner, a1_path, tmp_path):
        strategy = synthesized(runner, a1_path, tmp_path)
        result = runner.invoke(app, ["simulate", a1_path, strategy, "--from", "y", "--mem", "1", "--steps", "5"])
        assert result.exit_code == 0
        assert result.stdout == "(y,1)(y1,0)(y,2)(y1,1)(y,3)\nINCOMPLETE steps=5\n"

    @pytest.mark.parametrize("mem", ["-1", "٣"])
    def test_bad_memory(self, runner, a1_path, tmp_path, mem):
        strategy = synthesized(runner, a1_path, tmp_path)
        result = runner.invoke(app, ["simulate", a1_path, strategy, "--from", "y", "--mem", mem])
        assert result.exit_code == 2

    def test_unknown_state(self, runner, a1_path, tmp_path):
        strategy = synthesized(runner, a1_path, tmp_path)
        result = runner.invoke(app, ["simulate", a1_path, strategy, "--from", "zz", "--mem", "1"])
        assert result.exit_code == 2

    def test_a2_worst_adversary(self, runner, a2_path, tmp_path):
        strategy = synthesized(runner, a2_path, tmp_path)
        result = runner.invoke(app, ["simulate", a2_path, strategy, "--from", "x", "--mem", "2"])
        assert result.exit_code == 0
        assert "ACCEPTING" in result.stdout

    def test_a2_random_adversary(self, runner, a2_path, tmp_path):
        strategy = synthesized(runner, a2_path, tmp_path)
        args = ["simulate", a2_path, strategy, "--from", "x", "--mem", "2", "--adversary", "random:3"]
        result = runner.invoke(app, args)
        assert result.exit_code == 0
        assert "ACCEPTING" in result.stdout

    def test_a2_interactive(self, runner, a2_path, tmp_path):
        strategy = synthesized(runner, a2_path, tmp_path)
        args = ["simulate", a2_path, strategy, "--from", "x", "--mem", "2", "--adversary", "interactive"]
        result = runner.invoke(app, args, input="7\n2\n")
        assert result.exit_code == 0
        assert "Enter a number between 1 and 2" in result.output
        assert "(x,2)\nACCEPTING value=0" in result.stdout

    def test_bad_adversary(self, runner, a2_path, tmp_path):
        strategy = synthesized(runner, a2_path, tmp_path)
        args = ["simulate", a2_path, strategy, "--from", "x", "--mem", "2", "--adversary", "lucky"]
        assert runner.invoke(app, args).exit_code == 2


class TestPlay:
    def test_a2(self, runner, a2_path):
        result = runner.invoke(app, ["play", a2_path, "--from", "x", "--mem", "2"], input="2\n")
        assert result.exit_code == 0
        assert "1. f" in result.stdout
        assert "ACCEPTING value=0" in result.stdout


class TestGame:
    def test_a1_dump(self, runner, a1_path):
        result = runner.invoke(app, ["game", a1_path])
        assert result.exit_code == 0
        assert "E 2 (x,1) -> step(y:1)" in result.stdout.splitlines()


class TestOracleCheck:
    def test_default_range(self, runner):
        result = runner.invoke(app, ["oracle-check", "--seeds", "1..100"])
        assert result.exit_code == 0
        assert result.stdout.endswith("100/100 ok\n")

    def test_game_profile(self, runner):
        result = runner.invoke(app, ["oracle-check", "--seeds", "1..50", "--profile", "buchi-game"])
        assert result.exit_code == 0
        assert result.stdout.endswith("50/50 ok\n")

    def test_empty_range(self, runner):
        result = runner.invoke(app, ["oracle-check", "--seeds", "5..4"])
        assert result.exit_code == 0
        assert result.stdout == "0/0 ok\n"

    def test_with_enumeration(self, runner):
        result = runner.invoke(app, ["oracle-check", "--seeds", "1..10", "--enumerate", "5"])
        assert result.exit_code == 0
        assert result.stdout.endswith("10/10 ok\n")

    def test_bad_range(self, runner):
        assert runner.invoke(app, ["oracle-check", "--seeds", "ten"]).exit_code == 2

    def test_unknown_profile(self, runner):
        result = runner.invoke(app, ["oracle-check", "--profile", "quantum"])
        assert result.exit_code == 2
        assert "Unknown profile" in result.output
