"""Backward cause explanation over an extended counterexample.

explain() computes, for a target assignment, the union of all
inclusion-minimal causes reachable inside the chosen scope: it walks
connections and per-block local-cause rules backward through the net,
memoizing on (gate, step) so shared sub-causes become shared sub-DAGs.

brute_force_min_causes() is the independent check: it enumerates
candidate assignment sets and tests causehood by forward single-
constraint inference (a constraint fires only when its known inputs
force the output value for every completion over the declared domains).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .errors import (ScopeTooLargeError, StepUnderflowError,
                     TargetOutsideTraceError, UnknownGateError)
from .ir import ComplexBlock, Diagram, FlatNet
from .trace import ExtendedTrace, _trunc_div


@dataclass(frozen=True)
class Assignment:
    """(variable, value, step) triple; variables are gate ids here."""

    gate: str
    value: bool | int
    step: int


@dataclass(frozen=True)
class Edge:
    """Single-constraint inference: cause -> effect via a block or connection."""

    src: Assignment
    dst: Assignment
    via: str


@dataclass
class ExplanationResult:
    target: Assignment
    scope_block: str | None
    nodes: set[Assignment]
    edges: list[Edge]
    terminating: set[Assignment]
    activations: int = 0


def local_cause(block, target_step: int, ext: ExtendedTrace) -> list[Assignment]:
    """Input assignments that locally justify the block's output value.

    Values are read post-inversion (what the block consumed). AND with
    a TRUE output needs every input; a FALSE output is carried by the
    FALSE inputs alone. OR is dual. CHOICE returns the conditions up to
    and including the first satisfied one plus that branch's result.
    DELAY points one step back (or at its default on step 1). Every
    other type returns all inputs at the target step.
    """
    if target_step < 1:
        raise StepUnderflowError(f"step {target_step} below 1")
    s = target_step
    at = lambda gate, step=s: Assignment(gate.id, ext.value(gate.id, step), step)
    t = block.type
    if t == "AND":
        out = ext.value(block.output.id, s)
        ins = [at(g) for g in block.inputs]
        return ins if out else [a for a in ins if not a.value]
    if t == "OR":
        out = ext.value(block.output.id, s)
        ins = [at(g) for g in block.inputs]
        return ins if not out else [a for a in ins if a.value]
    if t == "CHOICE":
        causes = []
        for cond, result in block.choice_pairs():
            causes.append(at(cond))
            if ext.value(cond.id, s):
                causes.append(at(result))
                return causes
        return causes
    if t == "DELAY":
        if s == 1:
            return [at(block.inputs[0])]
        return [at(block.inputs[1], s - 1)]
    return [at(g) for g in block.inputs]


def explain(diagram: Diagram, ext: ExtendedTrace, gate_id: str, step: int,
            scope_block: str | None = None) -> ExplanationResult:
    """Union of inclusion-minimal causes of the assignment at (gate, step).

    Diagram inputs and constant block inputs terminate the search; a
    block-bounded scope additionally terminates at the named complex
    block's input interface. Each distinct (gate, step) is processed
    once; results are shared, so the output is a DAG.
    """
    net = ext.net
    if gate_id not in net.gates:
        raise UnknownGateError(f"no gate {gate_id!r} in the diagram")
    if not (1 <= step <= ext.upto):
        raise TargetOutsideTraceError(
            f"step {step} outside extended trace (1..{ext.upto})")

    terminals = set(net.inputs)
    if scope_block is not None:
        blocks = {b.id: b for b in _iter_complex(diagram.root)}
        if scope_block not in blocks:
            raise UnknownGateError(f"no complex block {scope_block!r}")
        terminals.update(g.id for g in blocks[scope_block].inputs)

    target = Assignment(gate_id, ext.value(gate_id, step), step)
    nodes, edges, terminating = set(), [], set()
    seen = set()
    work = [target]
    activations = 0
    while work:
        a = work.pop()
        if (a.gate, a.step) in seen:
            continue
        seen.add((a.gate, a.step))
        activations += 1
        nodes.add(a)
        if a.gate in terminals or a.gate in net.constants:
            terminating.add(a)
            continue
        conn = net.incoming.get(a.gate)
        if conn is not None:
            src = Assignment(conn.src, ext.value(conn.src, a.step), a.step)
            edges.append(Edge(src, a, conn.id))
            work.append(src)
            continue
        block = net.block_of_output.get(a.gate)
        if block is None:
            # Undriven junction outside the scope chain; nothing to follow.
            terminating.add(a)
            continue
        for cause in local_cause(block, a.step, ext):
            edges.append(Edge(cause, a, block.id))
            work.append(cause)
    return ExplanationResult(target, scope_block, nodes, edges, terminating,
                             activations)


def _iter_complex(block):
    if isinstance(block, ComplexBlock):
        yield block
        for b in block.blocks:
            yield from _iter_complex(b)


def terminating_list(result: ExplanationResult, diagram: Diagram,
                     net: FlatNet) -> list[tuple]:
    """Terminating assignments as (step, variableName, blockName, value)."""
    rows = []
    for a in result.terminating:
        gate = net.gates[a.gate]
        var = diagram.var_of_gate.get(a.gate, gate.name)
        rows.append((a.step, var, gate.owner, a.value))
    rows.sort(key=lambda r: (r[0], r[2], r[1]))
    return rows


# --- Definition-4 oracle ------------------------------------------------

def _forced_output(block, known, domains, step):
    """Output value forced by the known inputs, or None.

    known maps input gate ids to values fixed by the candidate cause;
    every other input ranges over its whole declared domain, and a
    completion on which the block's function is undefined (division by
    zero, no CHOICE condition satisfied) blocks the inference.
    """
    t = block.type
    ins = block.inputs
    k = lambda g: known.get(g.id)
    if t == "DELAY":
        # handled by the caller (two per-step constraint shapes)
        raise AssertionError
    if t == "AND":
        vals = [k(g) for g in ins]
        if any(v is False for v in vals):
            return False
        if all(v is True for v in vals):
            return True
        return None
    if t == "OR":
        vals = [k(g) for g in ins]
        if any(v is True for v in vals):
            return True
        if all(v is False for v in vals):
            return False
        return None
    if t == "CHOICE":
        pairs = block.choice_pairs()
        first_true = None
        for i, (cond, _) in enumerate(pairs):
            if k(cond) is True:
                first_true = i
                break
        if first_true is None:
            return None  # some completion satisfies nothing: undefined
        candidates = [i for i, (cond, _) in enumerate(pairs[:first_true])
                      if k(cond) is None] + [first_true]
        results = set()
        for i in candidates:
            v = k(pairs[i][1])
            if v is None:
                return None
            results.add(v)
        return results.pop() if len(results) == 1 else None
    if t == "COUNT":
        vals = [k(g) for g in ins]
        if any(v is None for v in vals):
            return None
        return sum(1 for v in vals if v)
    if t == "ASSIGN":
        return k(ins[0])

    a, b = k(ins[0]), k(ins[1])
    da, db = domains[ins[0].id], domains[ins[1].id]
    if t == "IFF":
        return None if a is None or b is None else a == b
    if t == "EQ":
        if a is not None and b is not None:
            return a == b
        if a is not None and not any(a == x for x in db):
            return False
        if b is not None and not any(b == x for x in da):
            return False
        if a is not None and list(db) == [a]:
            return True
        if b is not None and list(da) == [b]:
            return True
        return None
    if t in ("GT", "LT", "LE", "GE"):
        op = {"GT": lambda x, y: x > y, "LT": lambda x, y: x < y,
              "LE": lambda x, y: x <= y, "GE": lambda x, y: x >= y}[t]
        lefts = [a] if a is not None else list(da)
        rights = [b] if b is not None else list(db)
        outcomes = {op(x, y) for x in lefts for y in rights}
        return outcomes.pop() if len(outcomes) == 1 else None
    if t in ("ADD", "SUB", "MUL", "DIV"):
        lefts = [a] if a is not None else list(da)
        rights = [b] if b is not None else list(db)
        outcomes = set()
        for x in lefts:
            for y in rights:
                if t == "ADD":
                    outcomes.add(x + y)
                elif t == "SUB":
                    outcomes.add(x - y)
                elif t == "MUL":
                    outcomes.add(x * y)
                else:
                    if y == 0:
                        return None  # undefined completion
                    outcomes.add(_trunc_div(x, y))
                if len(outcomes) > 1:
                    return None
        return outcomes.pop()
    raise AssertionError(f"unknown block type {t}")


def _domain(kind):
    if kind.is_bool:
        return (False, True)
    return tuple(range(kind.lo, kind.hi + 1))


def brute_force_min_causes(ext: ExtendedTrace, gate_id: str, step: int,
                           candidate_scope: list[Assignment],
                           bound: int = 16) -> list[frozenset]:
    """All inclusion-minimal causes of the target within the candidate scope.

    Exponential in the scope size: subsets are enumerated in increasing
    size, closed under forward single-constraint inference, and kept
    when they reach the target with no smaller subset doing so.
    """
    if len(candidate_scope) > bound:
        raise ScopeTooLargeError(
            f"candidate scope has {len(candidate_scope)} assignments, bound {bound}")
    net = ext.net
    target = Assignment(gate_id, ext.value(gate_id, step), step)
    domains = {gid: _domain(g.kind) for gid, g in net.gates.items()}
    steps = range(1, ext.upto + 1)

    def closure_contains_target(seed):
        known = {}  # (gate, step) -> value
        for a in seed:
            known[(a.gate, a.step)] = a.value
        changed = True
        while changed:
            if (target.gate, target.step) in known and \
                    known[(target.gate, target.step)] == target.value:
                return True
            changed = False
            for c in net.connections:
                for s in steps:
                    if (c.dst, s) in known:
                        continue
                    v = known.get((c.src, s))
                    if v is not None:
                        known[(c.dst, s)] = (not v) if c.inverted else v
                        changed = True
            for b in net.blocks:
                if b.type == "DELAY":
                    default, source = b.inputs
                    if (b.output.id, 1) not in known and \
                            (default.id, 1) in known:
                        known[(b.output.id, 1)] = known[(default.id, 1)]
                        changed = True
                    for s in steps:
                        if s >= 2 and (b.output.id, s) not in known and \
                                (source.id, s - 1) in known:
                            known[(b.output.id, s)] = known[(source.id, s - 1)]
                            changed = True
                    continue
                for s in steps:
                    if (b.output.id, s) in known:
                        continue
                    known_inputs = {g.id: known[(g.id, s)] for g in b.inputs
                                    if (g.id, s) in known}
                    v = _forced_output(b, known_inputs, domains, s)
                    if v is not None:
                        known[(b.output.id, s)] = v
                        changed = True
        return (target.gate, target.step) in known and \
            known[(target.gate, target.step)] == target.value

    minimal = []
    scope = list(candidate_scope)
    for size in range(0, len(scope) + 1):
        for combo in combinations(range(len(scope)), size):
            cand = frozenset(scope[i] for i in combo)
            if any(m <= cand for m in minimal):
                continue
            if closure_contains_target(cand):
                minimal.append(cand)
    return minimal


def global_scope(diagram: Diagram, ext: ExtendedTrace,
                 up_to_step: int) -> list[Assignment]:
    """Diagram-input and constant assignments for steps 1..up_to_step."""
    net = ext.net
    out = []
    for gid in list(net.inputs) + sorted(net.constants):
        for s in range(1, up_to_step + 1):
            out.append(Assignment(gid, ext.value(gid, s), s))
    return out


# --- serialization ------------------------------------------------------

def _assignment_doc(a: Assignment, diagram: Diagram, net: FlatNet) -> dict:
    gate = net.gates[a.gate]
    return {
        "gate": a.gate,
        "variable": diagram.var_of_gate.get(a.gate),
        "block": gate.owner,
        "value": a.value,
        "step": a.step,
        "displayStep": a.step - 1,
    }


def result_to_json(result: ExplanationResult, diagram: Diagram,
                   net: FlatNet) -> dict:
    def key(a):
        return (a.step, a.gate)

    term_rows = terminating_list(result, diagram, net)
    return {
        "target": _assignment_doc(result.target, diagram, net),
        "scope": {"kind": "block" if result.scope_block else "global",
                  "block": result.scope_block},
        "nodes": [_assignment_doc(a, diagram, net)
                  for a in sorted(result.nodes, key=key)],
        "edges": [{"from": _assignment_doc(e.src, diagram, net),
                   "to": _assignment_doc(e.dst, diagram, net),
                   "via": e.via}
                  for e in sorted(result.edges,
                                  key=lambda e: (key(e.dst), key(e.src), e.via))],
        "terminating": [{"step": s, "displayStep": s - 1, "variable": v,
                         "block": b, "value": val}
                        for s, v, b, val in term_rows],
    }


def format_terminating(doc: dict) -> str:
    """The analyst-panel text: one 'step varName blockName value' per line.

    Steps are display (0-based) numbers; values print as lowercase
    booleans or integers.
    """
    lines = []
    for row in doc["terminating"]:
        val = row["value"]
        val = str(val).lower() if isinstance(val, bool) else str(val)
        lines.append(f"{row['displayStep']} {row['variable']} {row['block']} {val}")
    return "\n".join(lines)
