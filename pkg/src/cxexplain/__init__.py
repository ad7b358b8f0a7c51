"""Counterexample explanation for function block diagrams.

Pipeline: parse a restricted NuSMV-style model and an LTL property,
encode the model as a hierarchical block diagram, replay the
counterexample through the flattened net, then explain either a single
assignment (backward cause traversal) or the violated formula
(expansion-law descent).
"""

from .encode import build_diagram, encode_module
from .errors import *  # noqa: F401,F403 - small, curated error module
from .explain import (Assignment, ExplanationResult, brute_force_min_causes,
                      explain, global_scope, local_cause, result_to_json,
                      terminating_list)
from .ir import (BOOLEAN, BasicBlock, ComplexBlock, Connection, Diagram,
                 FlatNet, Gate, Value, ValueKind, bool_value, diagram_from_json,
                 diagram_to_json, flatten, int_range, int_value, topo_order,
                 validate_diagram)
from .ltl import (EvalTable, FormulaCause, annotate_tree, cause_to_json,
                  evaluate, explain_formula)
from .parser import parse_ltl, parse_model
from .syntax import FormulaTree, SmvModel, SmvModule, model_to_text, to_text
from .trace import (ExtendedTrace, Trace, check_consistency, extend_trace,
                    parse_trace_native, parse_trace_nusmv, step_eval,
                    trace_to_json)

__version__ = "0.1.0"
