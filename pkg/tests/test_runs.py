"""Tests for regular runs: parsing, values, acceptance, annotations and unfolding"""
import logging
from dataclasses import replace
from fractions import Fraction

import pytest

from conftest import A1_LASSO, A1_LASSO_LEVELS
from resource_games.exceptions import ParseError, SemiringError, StrategyError, UnfoldLimitError, ValidationError
from resource_games.extent import extent_generic
from resource_games.model import parse_model
from resource_games.oracle import random_model
from resource_games.runs import (
    Annotation,
    check_annotation,
    is_accepting,
    parse_run,
    render_run,
    run_value,
    unfold,
    validate_run,
)
from resource_games.semiring import INF
from resource_games.strategy import MemoryFullStrategy, carry_over, skeleton_of, synth_fig2

X_Y_LOOP = "node n0 x step(n1)\nnode n1 y step(n0)\nroot n0\n"
Y_Y1_LOOP = "node n0 y step(n1)\nnode n1 y1 step(n0)\nroot n0\n"


def lasso_annotation(z, levels=A1_LASSO_LEVELS):
    return Annotation({n.id: level for n, level in zip(z.nodes, levels)})


def with_extra_offset(m, state, extra=1):
    offset = m.semiring.value(min(m.offset(state).payload + extra, m.bound))
    states = tuple(replace(s, offset=offset) if s.name == state else s for s in m.states)
    return replace(m, states=states)


class TestParseRun:
    """Run file format"""

    def test_a1_lasso(self):
        z, a = parse_run(A1_LASSO)
        assert len(z) == 8
        assert z.root == "n0"
        assert z.node("n7").children == ("n0",)
        assert a is None

    def test_render(self):
        z, _ = parse_run(A1_LASSO)
        assert render_run(z) == A1_LASSO

    def test_levels(self):
        z, a = parse_run(X_Y_LOOP + "level n0 1\nlevel n1 5/2\n")
        assert a.levels == {"n0": 1, "n1": Fraction(5, 2)}
        assert "level n1 5/2" in render_run(z, a)

    def test_option_prefix(self):
        z, _ = parse_run("node n0 x g:step(n0)\nroot n0\n")
        assert z.node("n0").option == "g"
        assert render_run(z).startswith("node n0 x g:step(n0)")

    def test_missing_root(self):
        with pytest.raises(ParseError, match="root"):
            parse_run("node n0 x step(n0)\n")

    def test_duplicate_node(self):
        with pytest.raises(ParseError) as e:
            parse_run("node n0 x step(n0)\nnode n0 y step(n0)\nroot n0\n")
        assert e.value.line == 2

    def test_invalid_line(self):
        with pytest.raises(ParseError):
            parse_run("node n0 x step n0\nroot n0\n")


class TestValidateRun:
    """Structural checks against a model"""

    def test_a1_lasso(self, a1):
        z, _ = parse_run(A1_LASSO)
        assert validate_run(a1, z) is z

    @pytest.mark.parametrize(
        "text,message",
        [
            ("node n0 zz step(n0)\nroot n0\n", "unknown state"),
            ("node n0 x jump(n0)\nroot n0\n", "undeclared symbol"),
            ("node n0 x step(n0,n0)\nroot n0\n", "arity"),
            ("node n0 x step(n9)\nroot n0\n", "unknown node"),
            ("node n0 x step(n0)\nnode n1 y step(n0)\nroot n0\n", "not reachable"),
            ("node n0 x step(n0)\nroot n5\n", "Root"),
        ],
    )
    def test_errors(self, a1, text, message):
        z, _ = parse_run(text)
        with pytest.raises(ValidationError, match=message):
            validate_run(a1, z)


class TestRunValue:
    """Greatest fixpoint of the run-value operator"""

    def test_draining_loop_is_infinite(self, a1):
        z, _ = parse_run(X_Y_LOOP)
        assert run_value(a1, z).payload == INF
        assert is_accepting(a1, z)

    def test_a1_lasso(self, a1):
        z, _ = parse_run(A1_LASSO)
        assert run_value(a1, z).payload == 1
        assert is_accepting(a1, z)

    def test_odd_loop_is_rejecting(self, a1):
        z, _ = parse_run(Y_Y1_LOOP)
        assert not is_accepting(a1, z)
        assert run_value(a1, z).payload == 1

    def test_option_selects_the_transition(self, a2):
        cheap, _ = parse_run("node n0 x g:step(n0)\nroot n0\n")
        dear, _ = parse_run("node n0 x step(n0)\nroot n0\n")
        assert run_value(a2, cheap).payload == 0
        # without a prefix the first option holding step(x) is f
        assert run_value(a2, dear).payload == INF

    def test_foreign_transition(self, a1, caplog):
        z, _ = parse_run("node n0 x step(n0)\nroot n0\n")
        with caplog.at_level(logging.WARNING):
            assert run_value(a1, z) == a1.semiring.zero
        assert "lacks" in caplog.text

    def test_finite_tree(self):
        m = parse_model("semiring tropical-bounded 4\nsig stop/0\nstate p parity 1 offset 0\ntrans p stop() 2\n")
        z, _ = parse_run("node n0 p stop()\nroot n0\n")
        assert is_accepting(m, z)
        assert run_value(m, z).payload == 2

    def test_boolean(self):
        m = parse_model("semiring boolean\nsig step/1\nstate p parity 2 offset 0\ntrans p step(p) 1\n")
        z, _ = parse_run("node n0 p step(n0)\nroot n0\n")
        assert run_value(m, z) == m.semiring.one

    def test_richer_sub_runs_never_lower_the_value(self):
        for seed in range(1, 41):
            m = random_model(seed, "buchi-automaton")
            reduced, ext = synth_fig2(m)
            strategy = carry_over(m, reduced.skeleton())
            for q in m.state_names:
                if ext.level(q) == INF:
                    continue
                z, _ = unfold(m, strategy, q, ext.level(q))
                value = run_value(m, z)
                for p in sorted({n.state for n in z.nodes}):
                    if m.offset(p).payload == INF:
                        continue
                    richer = run_value(with_extra_offset(m, p), z)
                    assert m.semiring.leq(value, richer), f"seed {seed} {q} {p}"


class TestIsAccepting:
    """Highest parity on every cycle must be even"""

    def test_three_parities(self, three_parity):
        high_odd, _ = parse_run("node n0 p step(n1)\nnode n1 q step(n2)\nnode n2 r step(n0)\nroot n0\n")
        even_loop, _ = parse_run("node n0 p step(n1)\nnode n1 q step(n1)\nroot n0\n")
        assert not is_accepting(three_parity, high_odd)
        assert is_accepting(three_parity, even_loop)


class TestCheckAnnotation:
    """Resource annotations"""

    def test_a1_lasso(self, a1):
        z, _ = parse_run(A1_LASSO)
        assert check_annotation(a1, z, lasso_annotation(z), extent_generic(a1))

    def test_root_below_extent(self, a1):
        z, _ = parse_run(A1_LASSO)
        a = lasso_annotation(z, (0,) + A1_LASSO_LEVELS[1:])
        assert not check_annotation(a1, z, a, extent_generic(a1))

    def test_too_little_for_the_move(self, a1):
        z, _ = parse_run(A1_LASSO)
        # y at 4 cannot reach y2 at 2: the step costs 2 + 2
        a = lasso_annotation(z, (1, 1, 0, 2, 0, 3, 2, 6))
        assert not check_annotation(a1, z, a, extent_generic(a1))

    def test_missing_level(self, a1):
        z, _ = parse_run(A1_LASSO)
        assert not check_annotation(a1, z, Annotation({"n0": 1}), extent_generic(a1))

    def test_missing_level_of_the_last_child(self, a1):
        z, _ = parse_run(A1_LASSO)
        a = lasso_annotation(z)
        del a.levels["n7"]
        assert not check_annotation(a1, z, a, extent_generic(a1))

    def test_boolean_rejected(self):
        m = parse_model("semiring boolean\nsig step/1\nstate p parity 2 offset 0\ntrans p step(p) 1\n")
        z, _ = parse_run("node n0 p step(n0)\nroot n0\n")
        with pytest.raises(SemiringError):
            check_annotation(m, z, Annotation({"n0": 0}), extent_generic(m))

    def test_valid_annotation_bounds_the_value(self):
        for seed in range(1, 41):
            m = random_model(seed, "buchi-automaton")
            reduced, ext = synth_fig2(m)
            strategy = carry_over(m, reduced.skeleton())
            for q in m.state_names:
                if ext.level(q) == INF:
                    continue
                z, a = unfold(m, strategy, q, ext.level(q))
                assert check_annotation(m, z, a, ext)
                assert run_value(m, z).payload <= a.levels[z.root], f"seed {seed} {q}"


class TestUnfold:
    """Strategy unfolding"""

    def test_game_needs_adversary(self, a2):
        reduced, _ = synth_fig2(a2)
        with pytest.raises(StrategyError):
            unfold(a2, carry_over(a2, reduced.skeleton()), "x", 2)

    def test_node_budget(self, a1):
        reduced, _ = synth_fig2(a1)
        full, _ = skeleton_of(reduced, reduced.trace)
        with pytest.raises(UnfoldLimitError) as e:
            unfold(a1, MemoryFullStrategy(full), "x", 1, max_nodes=3)
        assert e.value.reached == (("x", 1), ("y", 1), ("y1", 0))

    def test_reuses_configurations(self, a1):
        reduced, _ = synth_fig2(a1)
        full, _ = skeleton_of(reduced, reduced.trace)
        z, _ = unfold(a1, MemoryFullStrategy(full), "x", 1)
        assert validate_run(a1, z) is z
        assert z.node("n7").children == ("n0",)

    def test_game_nodes_record_the_option(self, a2):
        reduced, _ = synth_fig2(a2)
        z, _ = unfold(a2, carry_over(a2, reduced.skeleton()), "x", 2, lambda q, mem, options: options[-1])
        assert z.node(z.root).option == "g"
        assert validate_run(a2, z) is z
