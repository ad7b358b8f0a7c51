"""Acceptance criteria, one test per criterion, one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the report.

Two criteria encode an exactness claim that is provably unattainable for
specific block types (see notes in the repo docs and the characterization
tests below): those parametrized cases are marked xfail(strict) so the
deviation is visible, pinned, and cannot silently pass.
"""

import itertools
import random
import time

import pytest

from cxexplain import (Assignment, bool_value, brute_force_min_causes,
                       build_diagram, check_consistency, evaluate, explain,
                       explain_formula, extend_trace, global_scope,
                       local_cause, parse_ltl, parse_model, terminating_list,
                       validate_diagram)
from cxexplain.errors import (ChoiceUnsatisfiedError, DivisionByZeroError)
from cxexplain.ir import (BOOLEAN, BasicBlock, ComplexBlock, Connection,
                          Diagram, Gate, IN, OUT, int_range)
from cxexplain.syntax import FormulaTree
from cxexplain.trace import Trace

from conftest import (CASE_STUDY_INPUTS, CASE_STUDY_LOOP, CASE_STUDY_LTL,
                      CASE_STUDY_MODEL, bool_trace, contradiction_diagram)
from oracles import (SmvInterpreter, interpreter_trace, ltl_path_oracle,
                     random_bool_trace, random_formula, random_model_text,
                     random_tree_diagram, valid_loop_starts)


def _report(name, ok, detail=""):
    tag = "PASS" if ok else "FAIL"
    print(f"[{tag}] {name}" + (f" — {detail}" if detail else ""))
    return ok


# --------------------------------------------------------------------------
# Criterion 1: case-study end-to-end reproduction
# --------------------------------------------------------------------------

def test_case_study_end_to_end():
    model = parse_model(CASE_STUDY_MODEL)
    interp = SmvInterpreter(model)

    # Brute-force input search over the reference interpreter (the
    # derived oracle): every input sequence of length 4, every valid
    # loop-back, property checked by the unrolling oracle.
    names = ["set_a", "set_b", "c"]
    prop = parse_ltl(CASE_STUDY_LTL)
    violating = []
    for bits in itertools.product([False, True], repeat=12):
        rows = [dict(zip(names, bits[3 * i:3 * i + 3])) for i in range(4)]
        states = interp.run(rows)
        for j in valid_loop_starts(interp, rows, states):
            t = Trace(4, states, j, {})
            vals = ltl_path_oracle(prop, t)
            if vals[(0, 1)] is False:
                violating.append((tuple(tuple(sorted(r.items()))
                                        for r in rows), j))
    fixture_key = (tuple(tuple(sorted(r.items())) for r in CASE_STUDY_INPUTS),
                   CASE_STUDY_LOOP)
    assert violating, "search found no violating lasso"
    assert fixture_key in violating, \
        "fixture inputs are not a violating lasso per the oracle"

    # Pipeline under test, timed.
    t0 = time.perf_counter()
    diagram = build_diagram(model)
    assert validate_diagram(diagram) == []
    trace = interpreter_trace(model, CASE_STUDY_INPUTS, CASE_STUDY_LOOP)
    ext = extend_trace(diagram, trace)
    assert check_consistency(diagram, trace) == []

    formula = parse_ltl(CASE_STUDY_LTL, diagram.variables)
    table = evaluate(formula, trace)
    assert table.root_value(1) is False
    cause = explain_formula(table, 1)
    expected = {("mode_a.out", True, 3), ("mode_b.out", True, 3),
                ("mode_a.out", True, 4), ("mode_b.out", True, 4)}
    assert cause.assignments == expected
    display_steps = sorted({s - 1 for _, _, s in cause.assignments})
    assert display_steps == [2, 3]   # the 0-based step numbers the analyst sees

    later = 4
    res = explain(diagram, ext, diagram.gate_of_var["mode_b.out"], later)
    rows = terminating_list(res, diagram, ext.net)
    entries = {(step, var, val) for step, var, _, val in rows}
    assert (later - 1, "set_a", True) in entries    # prior-step set_a pulse
    assert any(var == "c" and val is True for _, var, val in entries)
    elapsed = time.perf_counter() - t0
    assert elapsed < 1.0, f"pipeline took {elapsed:.3f}s"
    assert _report("case-study end-to-end",
                   True, f"{len(violating)} violating lassos found; "
                         f"pipeline {elapsed * 1000:.0f} ms")


# --------------------------------------------------------------------------
# Criterion 2: oracle equivalence over random diagrams
# --------------------------------------------------------------------------

def _cone_scope(ext, gate, step, scope):
    """Restrict candidates to the target's backward cone (sound: an
    assignment outside the cone is dead weight in any cause)."""
    net = ext.net
    seen = set()
    work = [(gate, step)]
    while work:
        g, s = work.pop()
        if (g, s) in seen or s < 1:
            continue
        seen.add((g, s))
        if g in net.incoming:
            work.append((net.incoming[g].src, s))
        block = net.block_of_output.get(g)
        if block is not None:
            if block.type == "DELAY":
                work.append((block.inputs[0].id, s))
                work.append((block.inputs[1].id, s - 1))
            else:
                work.extend((x.id, s) for x in block.inputs)
    return [a for a in scope if (a.gate, a.step) in seen]


def test_oracle_equivalence_500_random_diagrams():
    rng = random.Random(20240901)
    t0 = time.perf_counter()
    checked = 0
    discrepancies = []
    while checked < 500:
        d = random_tree_diagram(rng)
        if validate_diagram(d):
            continue
        steps = rng.randint(1, 3)
        rows = [{v: rng.random() < 0.5 for v in d.variables}
                for _ in range(steps)]
        ext = extend_trace(d, bool_trace(d, rows))
        scope = global_scope(d, ext, steps)
        target_gate = rng.choice(ext.net.blocks).output.id
        cone = _cone_scope(ext, target_gate, steps, scope)
        if len(cone) > 16:
            continue
        res = explain(d, ext, target_gate, steps)
        families = brute_force_min_causes(ext, target_gate, steps, cone)
        union = set().union(*families) if families else set()
        if res.nodes & set(scope) != union:
            discrepancies.append((d, rows, target_gate))
        checked += 1
    elapsed = time.perf_counter() - t0
    ok = not discrepancies and elapsed < 60.0
    assert _report("oracle equivalence (500 random diagrams)", ok,
                   f"{checked} diagrams, {len(discrepancies)} discrepancies, "
                   f"{elapsed:.1f}s")
    assert not discrepancies
    assert elapsed < 60.0


# --------------------------------------------------------------------------
# Criterion 3: local-rule exactness per block type
# --------------------------------------------------------------------------

INT03 = int_range(0, 3)

# Faithful forcing semantics provably diverges from the normative local
# rules on these types (absorbing/saturated operands; agreeing CHOICE
# branches). The divergence is pinned by the characterization test.
TENSION_TYPES = {"MUL", "GT", "LT", "LE", "GE", "CHOICE"}


def _isolated_block(btype, n_bool=2):
    if btype in ("AND", "OR"):
        kinds = [BOOLEAN] * n_bool
        out_kind = BOOLEAN
    elif btype in ("IFF",):
        kinds, out_kind = [BOOLEAN, BOOLEAN], BOOLEAN
    elif btype == "COUNT":
        kinds, out_kind = [BOOLEAN] * n_bool, int_range(0, n_bool)
    elif btype == "ASSIGN":
        kinds, out_kind = [BOOLEAN], BOOLEAN
    elif btype == "DELAY":
        kinds, out_kind = [BOOLEAN, BOOLEAN], BOOLEAN
    elif btype == "CHOICE":
        kinds, out_kind = [BOOLEAN] * 4, BOOLEAN
    elif btype in ("GT", "LT", "LE", "GE", "EQ"):
        kinds, out_kind = [INT03, INT03], BOOLEAN
    elif btype == "ADD":
        kinds, out_kind = [INT03, INT03], int_range(0, 6)
    elif btype == "SUB":
        kinds, out_kind = [INT03, INT03], int_range(-3, 3)
    elif btype == "MUL":
        kinds, out_kind = [INT03, INT03], int_range(0, 9)
    elif btype == "DIV":
        kinds, out_kind = [INT03, INT03], int_range(0, 3)
    else:
        raise AssertionError(btype)
    root_inputs = [Gate(f"x{i}", f"x{i}", IN, "r", k)
                   for i, k in enumerate(kinds)]
    block = BasicBlock("blk", btype,
                       [Gate(f"blk/in{i}", f"in{i}", IN, "blk", k)
                        for i, k in enumerate(kinds)],
                       Gate("blk/out", "out", OUT, "blk", out_kind))
    conns = [Connection(f"x{i}", f"blk/in{i}") for i in range(len(kinds))]
    d = Diagram(ComplexBlock("r", "r", "r", root_inputs, [], [block], conns),
                {g.name: g.id for g in root_inputs})
    return d, block


def _domain(kind):
    return (False, True) if kind.is_bool else tuple(range(kind.lo,
                                                          kind.hi + 1))


def _rule_exactness_one(btype, n_bool):
    d, block = _isolated_block(btype, n_bool)
    kinds = [g.kind for g in block.inputs]
    steps = 2 if btype == "DELAY" else 1
    per_step = len(kinds)
    domains = [_domain(k) for _ in range(steps) for k in kinds]
    checked, bad = 0, []
    for combo in itertools.product(*domains):
        rows = [{f"x{i}": combo[s * per_step + i] for i in range(per_step)}
                for s in range(steps)]
        try:
            ext = extend_trace(d, bool_trace(d, rows))
        except (ChoiceUnsatisfiedError, DivisionByZeroError):
            continue
        for target_step in range(1, steps + 1):
            causes = set(local_cause(block, target_step, ext))
            scope = [Assignment(g.id, ext.value(g.id, s), s)
                     for g in block.inputs for s in range(1, steps + 1)]
            families = brute_force_min_causes(ext, block.output.id,
                                              target_step, scope)
            union = set().union(*families) if families else set()
            checked += 1
            if causes != union:
                bad.append((combo, target_step, causes, union))
    return checked, bad


def _rule_exactness(btype):
    """(combos checked, discrepancy list), exhaustive up to 4 bool inputs."""
    arities = (2, 3, 4) if btype in ("AND", "OR", "COUNT") else (2,)
    checked, bad = 0, []
    for n in arities:
        c, b = _rule_exactness_one(btype, n)
        checked += c
        bad.extend(b)
    return checked, bad


_ALL_TYPES = ["AND", "OR", "IFF", "SUB", "ADD", "MUL", "DIV", "GT", "LT",
              "LE", "GE", "EQ", "DELAY", "CHOICE", "COUNT", "ASSIGN"]


@pytest.mark.parametrize(
    "btype",
    [pytest.param(t, marks=pytest.mark.xfail(
        reason="documented forcing-vs-rule tension; see characterization "
               "test and docs", strict=True)) if t in TENSION_TYPES
     else t for t in _ALL_TYPES])
def test_local_rule_exactness(btype):
    checked, bad = _rule_exactness(btype)
    _report(f"local-rule exactness [{btype}]", not bad,
            f"{checked} combos, {len(bad)} discrepancies")
    assert not bad, bad[:3]


def test_local_rule_tension_is_exactly_the_documented_corners():
    """Every discrepancy matches its predicted corner pattern, nothing else."""
    findings = {}
    for btype in sorted(TENSION_TYPES):
        checked, bad = _rule_exactness(btype)
        assert bad, f"{btype}: tension expected but none observed"
        findings[btype] = (checked, len(bad))
        for combo, step, causes, union in bad:
            if btype == "MUL":
                # exactly one absorbing zero operand; oracle keeps it alone
                assert (combo[0] == 0) != (combo[1] == 0)
                zero = "blk/in0" if combo[0] == 0 else "blk/in1"
                assert union == {Assignment(zero, 0, 1)}
                assert union < causes
            elif btype in ("GT", "LT", "LE", "GE"):
                # a saturated operand decides the relation by itself
                sat = {"GT": (0, 3), "LT": (3, 0), "LE": (0, 3),
                       "GE": (3, 0)}[btype]
                assert combo[0] == sat[0] or combo[1] == sat[1]
                assert union < causes
            else:  # CHOICE: the unselected branch agrees with the output
                results = (combo[1], combo[3])
                assert results[0] == results[1], (combo, causes, union)
                assert causes < union
    _report("local-rule tension characterized", True,
            "; ".join(f"{t}: {n}/{c} corner cells"
                      for t, (c, n) in findings.items()))


# --------------------------------------------------------------------------
# Criterion 4: memoization bound on a 50-DELAY chain
# --------------------------------------------------------------------------

def test_memoization_complexity_delay_chain():
    n_delays, n_steps = 50, 50
    x = Gate("x", "x", IN, "r", BOOLEAN)
    blocks, conns = [], []
    prev = "x"
    for i in range(n_delays):
        b = BasicBlock(f"d{i}", "DELAY",
                       [Gate(f"d{i}/i0", "in0", IN, f"d{i}", BOOLEAN),
                        Gate(f"d{i}/i1", "in1", IN, f"d{i}", BOOLEAN)],
                       Gate(f"d{i}/o", "out", OUT, f"d{i}", BOOLEAN),
                       constants={f"d{i}/i0": bool_value(False)})
        blocks.append(b)
        conns.append(Connection(prev, f"d{i}/i1"))
        prev = f"d{i}/o"
    d = Diagram(ComplexBlock("r", "r", "r", [x], [], blocks, conns),
                {"x": "x"})
    assert validate_diagram(d) == []
    rows = [{"x": bool(i % 2)} for i in range(n_steps)]
    ext = extend_trace(d, bool_trace(d, rows))

    t0 = time.perf_counter()
    res = explain(d, ext, f"d{n_delays - 1}/o", n_steps)
    elapsed = time.perf_counter() - t0
    n = len(ext.net.gates)
    bound = n * n_steps
    ok = res.activations <= bound and elapsed < 0.1
    assert _report("memoization bound (50 DELAYs, 50 steps)", ok,
                   f"{res.activations} activations <= {bound}; "
                   f"{elapsed * 1000:.1f} ms")
    assert res.activations <= bound
    assert elapsed < 0.1


# --------------------------------------------------------------------------
# Criterion 5: simulation fidelity on reference-interpreter traces
# --------------------------------------------------------------------------

def test_simulation_fidelity_20_models():
    rng = random.Random(77177)
    clean = 0
    for i in range(20):
        model = parse_model(random_model_text(rng))
        diagram = build_diagram(model)
        length = rng.randint(1, 5)
        rows = [{"x": rng.random() < 0.5, "y": rng.random() < 0.5}
                for _ in range(length)]
        trace = interpreter_trace(model, rows)
        assert check_consistency(diagram, trace) == [], f"model {i}"
        clean += 1

        # single injected bit-flip is detected at exactly its coordinates
        internals = [v for v in trace.variables
                     if v not in diagram.input_variables()
                     and trace.kinds[v].is_bool]
        var = rng.choice(internals)
        step = rng.randint(1, length)
        states = [dict(s) for s in trace.states]
        states[step - 1][var] = not states[step - 1][var]
        bad = Trace(length, states, None, trace.kinds)
        mism = check_consistency(diagram, bad)
        assert [(m[0], m[1]) for m in mism] == [(var, step)], f"model {i}"
    assert _report("simulation fidelity (20 random models)", True,
                   f"{clean} clean traces; bit-flips localized")


# --------------------------------------------------------------------------
# Criterion 6: LTL lasso exactness + cause sufficiency
# --------------------------------------------------------------------------

def test_ltl_lasso_exactness_200_formulas():
    rng = random.Random(4242)
    names = ["p", "q", "r", "s"]
    mismatches = 0
    for _ in range(200):
        l = rng.randint(1, 5)
        loop = rng.randint(1, l)
        t = random_bool_trace(rng, names, l, loop)
        tree = FormulaTree(random_formula(rng, names, rng.randint(1, 4)))
        table = evaluate(tree, t)
        oracle = ltl_path_oracle(tree, t)
        for idx in range(len(tree.nodes)):
            for j in range(1, l + 1):
                if table.values[(idx, j)] != oracle[(idx, j)]:
                    mismatches += 1
    assert _report("LTL lasso exactness (200 formulas)", mismatches == 0,
                   f"{mismatches} mismatches")
    assert mismatches == 0


def test_formula_cause_sufficiency_exhaustive():
    rng = random.Random(555)
    names = ["p", "q", "r", "s"]
    checked = 0
    for _ in range(20):
        l = rng.randint(1, 3)
        loop = rng.randint(1, l)
        t = random_bool_trace(rng, names, l, loop)
        tree = FormulaTree(random_formula(rng, names, rng.randint(1, 3)))
        table = evaluate(tree, t)
        for step in range(1, l + 1):
            cause = explain_formula(table, step)
            original = table.root_value(step)
            fixed = {(v, j): val for v, val, j in cause.assignments}
            cells = [(v, j) for v in names for j in range(1, l + 1)
                     if (v, j) not in fixed]
            for combo in itertools.product([False, True], repeat=len(cells)):
                states = [dict(s) for s in t.states]
                for (v, j), val in zip(cells, combo):
                    states[j - 1][v] = val
                t2 = Trace(l, states, loop, t.kinds)
                assert evaluate(tree, t2).root_value(step) == original, \
                    (tree.to_text(), t.states, step)
            checked += 1
    assert _report("formula-cause sufficiency (exhaustive completions)",
                   True, f"{checked} (formula, step) pairs")


# --------------------------------------------------------------------------
# Criterion 7: reconvergent-fanout regression
# --------------------------------------------------------------------------

def test_reconvergent_fanout_regression():
    d = contradiction_diagram()
    ext = extend_trace(d, bool_trace(d, [{"u1": True}, {"u1": True}]))
    for step in (1, 2):
        res = explain(d, ext, "u2", step)
        assert res.terminating == {Assignment("u1", True, step)}, step
    assert _report("reconvergent-fanout regression", True,
                   "terminating == {(u1, TRUE, s)}")
