"""ltl: lasso evaluation, formula causes, tree annotation."""

import itertools
import random

import pytest

from cxexplain import (annotate_tree, evaluate, explain_formula, parse_ltl)
from cxexplain.errors import NoLoopForTemporalError, StepOutOfRangeError
from cxexplain.ir import BOOLEAN, int_range
from cxexplain.ltl import cause_to_json
from cxexplain.syntax import Binary, FormulaTree, TemporalUnary
from cxexplain.trace import Trace

from oracles import ltl_path_oracle, random_bool_trace, random_formula


def _trace(rows, loop=None, kinds=None):
    kinds = kinds or {v: BOOLEAN for v in rows[0]}
    return Trace(len(rows), [dict(r) for r in rows], loop, kinds)


class TestEvaluate:
    def test_g_true_everywhere(self):
        t = _trace([{"p": True}] * 3, loop=1)
        table = evaluate(parse_ltl("G p"), t)
        assert [table.root_value(j) for j in (1, 2, 3)] == [True] * 3

    def test_until_example(self):
        # p TRUE at 1..2, q TRUE at 3, loop at 3: expected TRUE at 1..3
        # (frozen from the first-occurrence unrolling oracle)
        t = _trace([{"p": True, "q": False}, {"p": True, "q": False},
                    {"p": False, "q": True}], loop=3)
        f = parse_ltl("p U q")
        table = evaluate(f, t)
        assert [table.root_value(j) for j in (1, 2, 3)] == [True, True, True]
        oracle = ltl_path_oracle(f, t)
        assert [oracle[(0, j)] for j in (1, 2, 3)] == [True, True, True]

    def test_loop_before_position_reaches_back(self):
        # F p at the last position must see p at the loop head
        t = _trace([{"p": True}, {"p": False}, {"p": False}], loop=1)
        table = evaluate(parse_ltl("F p"), t)
        assert table.root_value(3) is True
        table = evaluate(parse_ltl("G !p"), t)
        assert table.root_value(3) is False

    def test_no_loop_for_temporal(self):
        t = _trace([{"p": True}] * 2)
        for text in ("G p", "F p", "p U p", "X p"):
            with pytest.raises(NoLoopForTemporalError):
                evaluate(parse_ltl(text), t)

    def test_pure_boolean_needs_no_loop(self):
        t = _trace([{"p": True, "q": False}] * 2)
        table = evaluate(parse_ltl("p & !q"), t)
        assert table.root_value(1) is True

    def test_atoms_match_direct_expression_evaluation(self):
        kinds = {"x": int_range(0, 5), "p": BOOLEAN}
        t = _trace([{"x": 3, "p": True}, {"x": 0, "p": False}], loop=2,
                   kinds=kinds)
        f = parse_ltl("G (x + 1 > 2 | p)")
        table = evaluate(f, t)
        comparison = f.root.operand.left
        assert table.value(comparison, 1) is True
        assert table.value(comparison, 2) is False
        arith = comparison.left
        assert table.value(arith, 1) == 4

    def test_expansion_law_soundness(self):
        rng = random.Random(31)
        for _ in range(60):
            l = rng.randint(1, 5)
            t = random_bool_trace(rng, ["p", "q"], l, rng.randint(1, l))
            inner = random_formula(rng, ["p", "q"], 2)
            g = FormulaTree(TemporalUnary("G", inner))
            expanded = FormulaTree(
                Binary("&", inner, TemporalUnary("X", TemporalUnary("G", inner))))
            tg = evaluate(g, t)
            te = evaluate(expanded, t)
            for j in range(1, l + 1):
                assert tg.root_value(j) == te.root_value(j)

    def test_lasso_exactness_against_path_oracle(self):
        rng = random.Random(13)
        for _ in range(120):
            l = rng.randint(1, 5)
            loop = rng.randint(1, l)
            names = ["p", "q", "r"]
            t = random_bool_trace(rng, names, l, loop)
            f = FormulaTree(random_formula(rng, names, rng.randint(1, 4)))
            table = evaluate(f, t)
            oracle = ltl_path_oracle(f, t)
            for idx in range(len(f.nodes)):
                for j in range(1, l + 1):
                    assert table.values[(idx, j)] == oracle[(idx, j)], \
                        (f.to_text(), t.states, loop, idx, j)


class TestExplainFormula:
    def test_g_false_single_witness(self):
        t = _trace([{"p": True}, {"p": False}, {"p": True}], loop=3)
        f = parse_ltl("G p")
        cause = explain_formula(evaluate(f, t), 1)
        assert cause.value is False
        assert cause.assignments == {("p", False, 2)}

    def test_f_false_collects_whole_lasso(self):
        t = _trace([{"q": False}] * 3, loop=1)
        f = parse_ltl("F q")
        cause = explain_formula(evaluate(f, t), 1)
        assert cause.assignments == {("q", False, 1), ("q", False, 2),
                                     ("q", False, 3)}

    def test_step_out_of_range(self):
        t = _trace([{"p": True}], loop=1)
        table = evaluate(parse_ltl("G p"), t)
        with pytest.raises(StepOutOfRangeError):
            explain_formula(table, 5)

    def test_g_true_collects_loop_positions(self):
        t = _trace([{"p": True}] * 3, loop=2)
        cause = explain_formula(evaluate(parse_ltl("G p"), t), 1)
        assert cause.assignments == {("p", True, 1), ("p", True, 2),
                                     ("p", True, 3)}

    def test_or_true_returns_union_of_true_disjuncts(self):
        t = _trace([{"p": True, "q": True}], loop=1)
        cause = explain_formula(evaluate(parse_ltl("p | q"), t), 1)
        assert cause.assignments == {("p", True, 1), ("q", True, 1)}

    def test_implication_true_via_false_antecedent(self):
        t = _trace([{"p": False, "q": False}], loop=1)
        cause = explain_formula(evaluate(parse_ltl("p -> q"), t), 1)
        assert cause.assignments == {("p", False, 1)}

    @staticmethod
    def _sufficient(f, t, step, cause):
        """Re-evaluate under every completion of the unfixed cells."""
        fixed = {(var, pos): val for var, val, pos in cause.assignments}
        cells = [(v, j) for v in sorted(t.states[0])
                 for j in range(1, t.length + 1) if (v, j) not in fixed]
        original = evaluate(f, t).root_value(step)
        for combo in itertools.product([False, True], repeat=len(cells)):
            states = [dict(s) for s in t.states]
            for (v, j), val in zip(cells, combo):
                states[j - 1][v] = val
            for (v, j), val in fixed.items():
                states[j - 1][v] = val
            t2 = Trace(t.length, states, t.loop_start, t.kinds)
            if evaluate(f, t2).root_value(step) != original:
                return False
        return True

    def test_sufficiency_exhaustive_small(self):
        rng = random.Random(99)
        names = ["p", "q"]
        done = 0
        while done < 40:
            l = rng.randint(1, 3)
            t = random_bool_trace(rng, names, l, rng.randint(1, l))
            f = FormulaTree(random_formula(rng, names, rng.randint(1, 3)))
            table = evaluate(f, t)
            for step in range(1, l + 1):
                cause = explain_formula(table, step)
                assert self._sufficient(f, t, step, cause), \
                    (f.to_text(), t.states, t.loop_start, step)
            done += 1

    def test_serialization_carries_both_step_numberings(self):
        t = _trace([{"p": False}] * 2, loop=1)
        cause = explain_formula(evaluate(parse_ltl("F p"), t), 1)
        doc = cause_to_json(cause)
        assert doc["displayStep"] == 0 and doc["step"] == 1
        for a in doc["assignments"]:
            assert a["displayStep"] == a["step"] - 1


class TestAnnotateTree:
    def test_colors(self):
        kinds = {"x": int_range(0, 5), "p": BOOLEAN}
        t = _trace([{"x": 3, "p": True}], loop=1, kinds=kinds)
        f = parse_ltl("p & (x + 1 > 5)")
        doc = annotate_tree(evaluate(f, t), 1)
        root = doc["root"]
        assert root["color"] == "red"            # conjunction is FALSE
        left, right = root["children"]
        assert left["color"] == "green"          # p is TRUE
        assert right["color"] == "red"           # comparison FALSE
        arith = right["children"][0]
        assert arith["color"] == "grey" and arith["value"] == 4

    def test_case_study_root_red(self, case_diagram, case_trace):
        from conftest import CASE_STUDY_LTL
        f = parse_ltl(CASE_STUDY_LTL, case_diagram.variables)
        doc = annotate_tree(evaluate(f, case_trace), 1)
        assert doc["root"]["color"] == "red"
        assert doc["displayStep"] == 0
