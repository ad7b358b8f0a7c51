"""A loaded model + trace + formula bundle, immutable after load.

The extended-trace cache is computed once per session; reloading a
file means building a new session, which is what keeps the cache
consistent with its inputs.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, field

from .encode import build_diagram
from .errors import ParseError
from .explain import explain, result_to_json
from .ir import Diagram, FlatNet, diagram_to_json, flatten, validate_diagram
from .ltl import EvalTable, annotate_tree, cause_to_json, evaluate, \
    explain_formula
from .parser import parse_ltl, parse_model
from .syntax import FormulaTree, to_text
from .trace import (ExtendedTrace, Trace, check_consistency, extend_trace,
                    parse_trace_native, parse_trace_nusmv, trace_to_json)


@dataclass
class Session:
    id: str
    diagram: Diagram
    net: FlatNet
    trace: Trace | None = None
    extended: ExtendedTrace | None = None
    formula: FormulaTree | None = None
    formula_text: str | None = None
    eval_table: EvalTable | None = None
    consistency: list = field(default_factory=list)

    # --- payload builders (shared by CLI and HTTP) ----------------------

    def diagram_doc(self):
        return diagram_to_json(self.diagram)

    def trace_doc(self):
        doc = trace_to_json(self.trace)
        doc["variables"] = self.trace.variables
        return doc

    def extended_doc(self, up_to=None):
        doc = self.extended.to_json()
        if up_to is not None and up_to < doc["upTo"]:
            doc = {"upTo": up_to, "steps": doc["steps"][:up_to]}
        doc["variables"] = {v: g for v, g in sorted(self.diagram.variables.items())}
        return doc

    def explain_doc(self, gate_or_var, step, scope_block=None):
        gate = self.diagram.gate_of_var.get(gate_or_var, gate_or_var)
        result = explain(self.diagram, self.extended, gate, step, scope_block)
        return result_to_json(result, self.diagram, self.net)

    def formula_tree_doc(self, step):
        return annotate_tree(self.eval_table, step)

    def explain_formula_doc(self, step):
        cause = explain_formula(self.eval_table, step)
        doc = cause_to_json(cause)
        doc["tree"] = self.formula_tree_doc(step)
        return doc

    def check_doc(self, strict=False):
        doc = {
            "model": {
                "variables": sorted(self.diagram.variables),
                "inputs": sorted(self.diagram.input_variables()),
            },
            "trace": None,
            "consistency": None,
            "formula": None,
        }
        if self.trace is not None:
            doc["trace"] = {"length": self.trace.length,
                            "loopStart": self.trace.loop_start}
            doc["consistency"] = {
                "mismatches": [
                    {"variable": v, "step": s, "traceValue": tv,
                     "simulatedValue": sv}
                    for v, s, tv, sv in self.consistency
                ],
                "clean": not self.consistency,
            }
        if self.formula is not None:
            doc["formula"] = {
                "text": to_text(self.formula.root),
                "value": self.eval_table.root_value(1),
                "step": 1,
                "displayStep": 0,
                "values": [self.eval_table.root_value(j)
                           for j in range(1, self.trace.length + 1)]
                if self.trace else None,
            }
        return doc


def load_session(model_path=None, model_text=None, trace_path=None,
                 trace_text=None, ltl_text=None) -> Session:
    """Parse everything, build the diagram, extend and check the trace."""
    if model_text is None:
        with open(model_path, encoding="utf-8") as fh:
            model_text = fh.read()
    model = parse_model(model_text)
    diagram = build_diagram(model)
    violations = validate_diagram(diagram)
    if violations:
        raise ParseError("encoded diagram is invalid: "
                         + "; ".join(v.message for v in violations))
    net = flatten(diagram)
    session = Session(id=uuid.uuid4().hex, diagram=diagram, net=net)

    if trace_text is None and trace_path is not None:
        with open(trace_path, encoding="utf-8") as fh:
            trace_text = fh.read()
    if trace_text is not None:
        kinds = diagram.declared_kinds()
        stripped = trace_text.lstrip()
        if stripped.startswith("{"):
            session.trace = parse_trace_native(json.loads(trace_text), kinds)
        else:
            session.trace = parse_trace_nusmv(trace_text, kinds)
        session.extended = extend_trace(diagram, session.trace, net=net)
        session.consistency = check_consistency(diagram, session.trace)

    if ltl_text is None and getattr(model, "specs", None):
        session.formula = FormulaTree(model.specs[0])
        session.formula_text = to_text(model.specs[0])
    elif ltl_text is not None:
        session.formula = parse_ltl(ltl_text, diagram.variables)
        session.formula_text = ltl_text
    if session.formula is not None and session.trace is not None:
        session.eval_table = evaluate(session.formula, session.trace)
    return session
