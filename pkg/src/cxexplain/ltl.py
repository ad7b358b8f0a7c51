"""LTL evaluation over lasso traces and sufficient-cause explanation.

Positions are 1-based; the successor of the last position is the loop
start. G and F quantify over the positions reachable from j; U is the
least fixpoint of its expansion law. Explanation walks the expansion
laws with a visited set on (node, position), so loops contribute each
position once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoLoopForTemporalError, StepOutOfRangeError
from .syntax import (Binary, BoolLit, Case, Count, FormulaTree, IntLit,
                     TemporalBinary, TemporalUnary, Unary, VarRef, label,
                     to_text)
from .trace import Trace


@dataclass
class EvalTable:
    """Value of every formula node at every position of the trace."""

    tree: FormulaTree
    trace: Trace
    values: dict  # (node index, position) -> bool | int

    def value(self, node, position):
        return self.values[(self.tree.index(node), position)]

    def root_value(self, position):
        return self.values[(0, position)]


def _successor(trace: Trace):
    l, loop = trace.length, trace.loop_start

    def sigma(j):
        return j + 1 if j < l else loop

    return sigma


def _loop_closure(trace: Trace, j):
    """Positions the infinite path from j ever visits.

    The path walks j..l and then cycles loopStart..l, so positions
    before j reappear when the loop starts earlier than j.
    """
    start = j if trace.loop_start is None else min(j, trace.loop_start)
    return range(start, trace.length + 1)


def evaluate(tree: FormulaTree, trace: Trace) -> EvalTable:
    """Exact evaluation on the lasso; rejects temporal operators without a loop."""
    has_temporal = any(isinstance(n, (TemporalUnary, TemporalBinary))
                       for n in tree.nodes)
    if has_temporal and trace.loop_start is None:
        raise NoLoopForTemporalError(
            "temporal operators (X/G/F/U) need a lasso counterexample; "
            "this trace has no loop")
    sigma = _successor(trace)
    l = trace.length
    positions = range(1, l + 1)
    values = {}

    # Children carry larger preorder indices, so a descending sweep is
    # bottom-up; indexing by position (not node identity) keeps the
    # table total even when a subtree object is shared.
    for idx in reversed(range(len(tree.nodes))):
        node = tree.nodes[idx]
        kids = tree.children[idx]

        def val(k, j):
            return values[(k, j)]

        if isinstance(node, BoolLit):
            fn = lambda j: node.value
        elif isinstance(node, IntLit):
            fn = lambda j: node.value
        elif isinstance(node, VarRef):
            fn = lambda j: trace.value(node.name, j)
        elif isinstance(node, Unary):
            if node.op == "!":
                fn = lambda j: not val(kids[0], j)
            else:
                fn = lambda j: -val(kids[0], j)
        elif isinstance(node, Binary):
            fn = lambda j: _apply_bin(node.op, val(kids[0], j),
                                      val(kids[1], j))
        elif isinstance(node, Case):
            def fn(j, kids=kids):
                for i in range(0, len(kids), 2):
                    if val(kids[i], j):
                        return val(kids[i + 1], j)
                raise AssertionError("case chain unsatisfied")
        elif isinstance(node, Count):
            fn = lambda j: sum(1 for k in kids if val(k, j))
        elif isinstance(node, TemporalUnary):
            if node.op == "X":
                fn = lambda j: val(kids[0], sigma(j))
            elif node.op == "G":
                fn = lambda j: all(val(kids[0], k)
                                   for k in _loop_closure(trace, j))
            else:  # F
                fn = lambda j: any(val(kids[0], k)
                                   for k in _loop_closure(trace, j))
        elif isinstance(node, TemporalBinary):
            # least fixpoint of  U(j) = psi(j) or (phi(j) and U(sigma(j)))
            for j in positions:
                values[(idx, j)] = bool(val(kids[1], j))
            changed = True
            while changed:
                changed = False
                for j in positions:
                    if values[(idx, j)]:
                        continue
                    if val(kids[1], j) or \
                            (val(kids[0], j) and values[(idx, sigma(j))]):
                        values[(idx, j)] = True
                        changed = True
            continue
        else:
            raise AssertionError(f"unexpected node {node!r}")
        for j in positions:
            values[(idx, j)] = fn(j)

    return EvalTable(tree, trace, values)


def _apply_bin(op, a, b):
    if op == "&":
        return bool(a and b)
    if op == "|":
        return bool(a or b)
    if op == "xor":
        return bool(a) != bool(b)
    if op == "->":
        return (not a) or bool(b)
    if op == "<->":
        return bool(a) == bool(b)
    if op == "=":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    if op == "<=":
        return a <= b
    if op == ">=":
        return a >= b
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        q = a // b
        if q < 0 and q * b != a:
            q += 1
        return q
    raise AssertionError(op)


@dataclass
class FormulaCause:
    """Assignments sufficient to pin the formula's value at one step."""

    step: int
    value: bool
    assignments: set           # (variable, value, position) triples
    contributions: dict = field(default_factory=dict)
    # (node index, position) -> list of (node index, position) obligations


def explain_formula(table: EvalTable, step: int) -> FormulaCause:
    """Sufficient cause of the root value at `step`.

    Conjunctions recurse into every FALSE conjunct when FALSE and all
    conjuncts when TRUE; disjunctions dually; temporal operators are
    unfolded through their expansion laws with a (node, position)
    visited set cutting the loop.
    """
    trace = table.trace
    tree = table.tree
    if not (1 <= step <= trace.length):
        raise StepOutOfRangeError(
            f"step {step} outside [1, {trace.length}]")
    sigma = _successor(trace)
    assignments = set()
    contributions = {}
    visited = set()

    def atom_vars(node, j):
        from .syntax import variables_of
        for name in variables_of(node):
            assignments.add((name, trace.value(name, j), j))

    def visit(node, j):
        idx = tree.index(node)
        if (idx, j) in visited:
            return
        visited.add((idx, j))
        key = (idx, j)
        subs = []

        def recurse(child, k):
            subs.append((tree.index(child), k))
            visit(child, k)

        v = table.values[(idx, j)]
        if isinstance(node, (VarRef, BoolLit, IntLit, Case, Count)):
            atom_vars(node, j)
        elif isinstance(node, Unary) and node.op == "!":
            recurse(node.operand, j)
        elif isinstance(node, Binary):
            op = node.op
            lv = table.value(node.left, j)
            rv = table.value(node.right, j)
            if op == "&":
                chosen = [node.left, node.right] if v else \
                    [c for c, cv in ((node.left, lv), (node.right, rv)) if not cv]
            elif op == "|":
                chosen = [node.left, node.right] if not v else \
                    [c for c, cv in ((node.left, lv), (node.right, rv)) if cv]
            elif op == "->":
                if v:
                    chosen = [c for c, cv in ((node.left, not lv),
                                              (node.right, rv)) if cv]
                else:
                    chosen = [node.left, node.right]
            else:
                # <->, xor and comparisons need both sides either way
                chosen = [node.left, node.right]
            for c in chosen:
                recurse(c, j)
        elif isinstance(node, TemporalUnary):
            if node.op == "X":
                recurse(node.operand, sigma(j))
            elif node.op == "G":
                # G f = f and X G f
                ov = table.value(node.operand, j)
                nv = table.values[(idx, sigma(j))]
                if v:
                    recurse(node.operand, j)
                    subs.append((idx, sigma(j)))
                    visit(node, sigma(j))
                else:
                    if not ov:
                        recurse(node.operand, j)
                    if not nv:
                        subs.append((idx, sigma(j)))
                        visit(node, sigma(j))
            else:
                # F f = f or X F f
                ov = table.value(node.operand, j)
                nv = table.values[(idx, sigma(j))]
                if v:
                    if ov:
                        recurse(node.operand, j)
                    if nv:
                        subs.append((idx, sigma(j)))
                        visit(node, sigma(j))
                else:
                    recurse(node.operand, j)
                    subs.append((idx, sigma(j)))
                    visit(node, sigma(j))
        elif isinstance(node, TemporalBinary):
            # f U g = g or (f and X(f U g)); TRUE takes every true disjunct
            gv = table.value(node.right, j)
            fv = table.value(node.left, j)
            nv = table.values[(idx, sigma(j))]
            if v:
                if gv:
                    recurse(node.right, j)
                if fv and nv:
                    recurse(node.left, j)
                    subs.append((idx, sigma(j)))
                    visit(node, sigma(j))
            else:
                recurse(node.right, j)
                if not fv:
                    recurse(node.left, j)
                if not nv:
                    subs.append((idx, sigma(j)))
                    visit(node, sigma(j))
        else:
            atom_vars(node, j)
        if subs:
            contributions[key] = subs

    root_value = table.values[(0, step)]
    visit(tree.root, step)
    return FormulaCause(step, bool(root_value), assignments, contributions)


def annotate_tree(table: EvalTable, step: int) -> dict:
    """Per-node display record: value at the step plus a color class.

    Boolean TRUE nodes are green, FALSE nodes red, arithmetic subterms
    grey.
    """
    trace = table.trace
    if not (1 <= step <= trace.length):
        raise StepOutOfRangeError(f"step {step} outside [1, {trace.length}]")
    tree = table.tree

    def render(node):
        idx = tree.index(node)
        v = table.values[(idx, step)]
        if isinstance(v, bool):
            color = "green" if v else "red"
        else:
            color = "grey"
        kids = [tree.nodes[i] for i in tree.children[idx]]
        return {
            "id": idx,
            "op": label(node),
            "text": to_text(node),
            "value": v,
            "color": color,
            "children": [render(k) for k in kids],
        }

    return {"step": step, "displayStep": step - 1, "root": render(tree.root)}


def cause_to_json(cause: FormulaCause) -> dict:
    return {
        "step": cause.step,
        "displayStep": cause.step - 1,
        "value": cause.value,
        "assignments": [
            {"variable": var, "value": val, "step": pos,
             "displayStep": pos - 1}
            for var, val, pos in sorted(cause.assignments,
                                        key=lambda a: (a[2], a[0]))
        ],
        "contributions": [
            {"node": k[0], "step": k[1],
             "obligations": [{"node": n, "step": p} for n, p in subs]}
            for k, subs in sorted(cause.contributions.items())
        ],
    }
