"""Shared fixtures: the mode-selection case study and small hand diagrams."""

from __future__ import annotations

import pytest

from cxexplain import (BOOLEAN, BasicBlock, ComplexBlock, Connection, Diagram,
                       Gate, Trace, build_diagram, parse_model)
from cxexplain.ir import IN, OUT

# Two-mode selection logic with the real design flaw: the automatic
# a->b switch sets mode_b but never resets mode_a, and set_a's reset of
# mode_b is gated on c being inactive.
CASE_STUDY_MODEL = """\
MODULE flipflop(s : boolean, r : boolean)
VAR out : boolean;
ASSIGN
  init(out) := s & !r;
  next(out) := case
    next(s) & !next(r) : TRUE;
    next(r) : FALSE;
    TRUE : out;
  esac;

MODULE loopbreaker(x : boolean)
VAR out : boolean;
ASSIGN
  init(out) := FALSE;
  next(out) := x;

MODULE main
VAR
  set_a : boolean;
  set_b : boolean;
  c : boolean;
  mode_a : flipflop(set_a, set_b);
  mode_b : flipflop(set_b | (c & brk.out), set_a & !c);
  brk : loopbreaker(mode_a.out);
"""

CASE_STUDY_LTL = \
    "G !((mode_a.out & mode_b.out) & X (mode_a.out & mode_b.out))"

# Violating inputs: quiet start, operator selects b, then a short set_a
# pulse lands while c is active; c stays on one more step; self-loop at 4.
CASE_STUDY_INPUTS = [
    {"set_a": False, "set_b": False, "c": False},
    {"set_a": False, "set_b": True, "c": False},
    {"set_a": True, "set_b": False, "c": True},
    {"set_a": False, "set_b": False, "c": True},
]
CASE_STUDY_LOOP = 4

CASE_STUDY_NUSMV_TRACE = """\
Trace Description: LTL Counterexample
Trace Type: Counterexample
  -> State: 1.1 <-
    set_a = FALSE
    set_b = FALSE
    c = FALSE
    mode_a.out = FALSE
    mode_b.out = FALSE
    brk.out = FALSE
  -> State: 1.2 <-
    set_b = TRUE
    mode_b.out = TRUE
  -> State: 1.3 <-
    set_a = TRUE
    set_b = FALSE
    c = TRUE
    mode_a.out = TRUE
  -- Loop starts here
  -> State: 1.4 <-
    set_a = FALSE
    brk.out = TRUE
"""


@pytest.fixture(scope="session")
def case_model():
    return parse_model(CASE_STUDY_MODEL)


@pytest.fixture(scope="session")
def case_diagram(case_model):
    return build_diagram(case_model)


@pytest.fixture(scope="session")
def case_trace(case_diagram):
    from cxexplain import parse_trace_nusmv
    return parse_trace_nusmv(CASE_STUDY_NUSMV_TRACE,
                             case_diagram.declared_kinds())


def _gate(gid, name, direction, owner, kind=BOOLEAN):
    return Gate(gid, name, direction, owner, kind)


def or_and_diagram():
    """Complex block computing u5 = (u1 | u2) & (u3 | u4)."""
    u = {i: _gate(f"u{i}", f"u{i}", IN if i <= 4 else OUT, "B")
         for i in (1, 2, 3, 4, 5)}
    or1 = BasicBlock("or1", "OR",
                     [_gate("u6", "in0", IN, "or1"),
                      _gate("u7", "in1", IN, "or1")],
                     _gate("u10", "out", OUT, "or1"))
    or2 = BasicBlock("or2", "OR",
                     [_gate("u8", "in0", IN, "or2"),
                      _gate("u9", "in1", IN, "or2")],
                     _gate("u11", "out", OUT, "or2"))
    and1 = BasicBlock("and1", "AND",
                      [_gate("u12", "in0", IN, "and1"),
                       _gate("u13", "in1", IN, "and1")],
                      _gate("u14", "out", OUT, "and1"))
    conns = [Connection("u1", "u6"), Connection("u2", "u7"),
             Connection("u3", "u8"), Connection("u4", "u9"),
             Connection("u10", "u12"), Connection("u11", "u13"),
             Connection("u14", "u5")]
    root = ComplexBlock("B", "B", "B",
                        [u[1], u[2], u[3], u[4]], [u[5]],
                        [or1, or2, and1], conns)
    return Diagram(root, {f"u{i}": f"u{i}" for i in (1, 2, 3, 4, 5)})


def contradiction_diagram():
    """Reconvergent fanout: u2 = u1 & !u1 via an inverted connection."""
    u1 = _gate("u1", "u1", IN, "R")
    u2 = _gate("u2", "u2", OUT, "R")
    and1 = BasicBlock("and1", "AND",
                      [_gate("u3", "in0", IN, "and1"),
                       _gate("u4", "in1", IN, "and1")],
                      _gate("u2b", "out", OUT, "and1"))
    conns = [Connection("u1", "u3"), Connection("u1", "u4", inverted=True),
             Connection("u2b", "u2")]
    root = ComplexBlock("R", "R", "R", [u1], [u2], [and1], conns)
    return Diagram(root, {"u1": "u1", "u2": "u2"})


def bool_trace(diagram, rows, loop_start=None):
    kinds = {v: BOOLEAN for v in diagram.variables}
    states = [dict(r) for r in rows]
    return Trace(len(states), states, loop_start, kinds)
