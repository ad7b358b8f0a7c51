"""Counterexample traces: parsing, simulation, consistency checking.

The loop is never unrolled here. Simulation and explanation work on the
finite prefix; loopStart is consumed only by LTL evaluation.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import (ChoiceUnsatisfiedError, CombinationalCycleError,
                     DivisionByZeroError, MissingInitialValueError, ParseError,
                     RangeEscapeError, TraceSchemaError, UnknownVariableError)
from .ir import Diagram, FlatNet, ValueKind, flatten, topo_order


@dataclass
class Trace:
    """Per-step assignments of all declared model variables.

    states is 0-indexed internally; steps are 1-based everywhere in the
    API, per the assignment model. loopStart, when present, is the
    1-based index the successor of the last state jumps back to.
    """

    length: int
    states: list[dict]            # step-1 .. step-l variable valuations
    loop_start: int | None = None
    kinds: dict[str, ValueKind] = field(default_factory=dict)

    def __post_init__(self):
        if self.length < 1 or len(self.states) != self.length:
            raise TraceSchemaError(
                f"trace length {self.length} does not match {len(self.states)} states")
        if self.loop_start is not None and not (1 <= self.loop_start <= self.length):
            raise TraceSchemaError(
                f"loopStart {self.loop_start} outside [1, {self.length}]")

    def value(self, var, step):
        return self.states[step - 1][var]

    @property
    def variables(self):
        return sorted(self.states[0])


def _coerce(kind: ValueKind | None, raw, var, where):
    if isinstance(raw, str):
        if raw in ("TRUE", "FALSE"):
            raw = raw == "TRUE"
        elif re.fullmatch(r"-?\d+", raw):
            raw = int(raw)
        else:
            raise ParseError(f"bad value {raw!r} for {var} {where}")
    if kind is not None and not kind.contains(raw):
        raise TraceSchemaError(f"value {raw!r} for {var} {where} is not a {kind}")
    return raw


_STATE_RE = re.compile(r"->\s*(State|Input)\s*:\s*[\d.]*\.(\d+)\s*<-")
_ASSIGN_RE = re.compile(r"([A-Za-z_][\w.$#-]*)\s*=\s*(\S+)")
_LOOP_RE = re.compile(r"--\s*Loop starts here")


def parse_trace_nusmv(text: str, kinds: dict[str, ValueKind]) -> Trace:
    """Read the textual trace format the model checker prints.

    Variables omitted in a state carry their previous value forward;
    `-> Input:` blocks are merged into the state that follows them.
    """
    states = []
    loop_start = None
    pending_loop = False
    current = None
    pending_inputs = {}

    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            continue
        if _LOOP_RE.search(stripped):
            pending_loop = True
            continue
        m = _STATE_RE.search(stripped)
        if m:
            which, num = m.group(1), int(m.group(2))
            if which == "State":
                base = dict(states[-1]) if states else {}
                base.update(pending_inputs)
                pending_inputs = {}
                states.append(base)
                current = states[-1]
                if pending_loop:
                    loop_start = len(states)
                    pending_loop = False
                if num != len(states):
                    raise ParseError(f"state numbered {num}, expected {len(states)}",
                                     line=lineno)
            else:
                current = pending_inputs
            continue
        m = _ASSIGN_RE.match(stripped)
        if m:
            var, raw = m.group(1), m.group(2)
            if var not in kinds:
                raise UnknownVariableError(
                    f"trace assigns undeclared variable {var!r} (line {lineno})")
            if current is None:
                raise ParseError("assignment before any state header", line=lineno)
            current[var] = _coerce(kinds[var], raw, var, f"(line {lineno})")
            continue
        if stripped.startswith(("Trace ", "***", "-- specification",
                                "-- as demonstrated")):
            continue
        raise ParseError(f"unrecognized trace line: {stripped!r}", line=lineno)

    if not states:
        raise ParseError("trace has no states")
    missing = sorted(set(kinds) - set(states[0]))
    if missing:
        raise MissingInitialValueError(
            f"no initial value for: {', '.join(missing)}")
    if pending_loop:
        loop_start = len(states)
    return Trace(len(states), states, loop_start, dict(kinds))


def parse_trace_native(doc: dict, kinds: dict[str, ValueKind]) -> Trace:
    """Read the repo-defined JSON trace document (inverse of trace_to_json)."""
    if not isinstance(doc, dict):
        raise TraceSchemaError("trace document must be an object")
    for key in ("length", "states"):
        if key not in doc:
            raise TraceSchemaError(f"trace document lacks {key!r}")
    length, states = doc["length"], doc["states"]
    if not isinstance(states, list) or len(states) != length:
        raise TraceSchemaError(
            f"states array length {len(states)} does not match length {length}")
    out = []
    for i, state in enumerate(states, 1):
        if not isinstance(state, dict):
            raise TraceSchemaError(f"state {i} is not an object")
        extra = sorted(set(state) - set(kinds))
        if extra:
            raise UnknownVariableError(
                f"state {i} assigns undeclared variable {extra[0]!r}")
        missing = sorted(set(kinds) - set(state))
        if missing:
            raise TraceSchemaError(f"state {i} lacks {missing[0]!r}")
        out.append({v: _coerce(kinds[v], state[v], v, f"(state {i})")
                    for v in state})
    return Trace(length, out, doc.get("loopStart"), dict(kinds))


def trace_to_json(trace: Trace) -> dict:
    return {
        "length": trace.length,
        "loopStart": trace.loop_start,
        "states": [dict(sorted(s.items())) for s in trace.states],
    }


# --- simulation ---------------------------------------------------------

def _trunc_div(a, b):
    q = a // b
    if q < 0 and q * b != a:
        q += 1
    return q


def _apply(block, values, step):
    t = block.type
    ins = [values[g.id] for g in block.inputs]
    if t == "AND":
        return all(ins)
    if t == "OR":
        return any(ins)
    if t == "IFF":
        return ins[0] == ins[1]
    if t == "ADD":
        return ins[0] + ins[1]
    if t == "SUB":
        return ins[0] - ins[1]
    if t == "MUL":
        return ins[0] * ins[1]
    if t == "DIV":
        if ins[1] == 0:
            raise DivisionByZeroError("division by zero", block=block.id, step=step)
        return _trunc_div(ins[0], ins[1])
    if t == "GT":
        return ins[0] > ins[1]
    if t == "LT":
        return ins[0] < ins[1]
    if t == "LE":
        return ins[0] <= ins[1]
    if t == "GE":
        return ins[0] >= ins[1]
    if t == "EQ":
        return ins[0] == ins[1]
    if t == "COUNT":
        return sum(1 for v in ins if v)
    if t == "ASSIGN":
        return ins[0]
    if t == "CHOICE":
        for cond, result in block.choice_pairs():
            if values[cond.id]:
                return values[result.id]
        raise ChoiceUnsatisfiedError("no CHOICE condition satisfied",
                                     block=block.id, step=step)
    raise AssertionError(f"unknown block type {t}")


def step_eval(net: FlatNet, inputs: dict, prev: dict | None, step: int = 1) -> dict:
    """Values of every flat gate for one step.

    inputs maps root input gate ids to their values; prev is the
    previous step's gate map (None at step 1). DELAY outputs the
    default input at step 1 and the previous-step delayed-source value
    afterwards; inverted connections negate in transit.
    """
    values = {}
    visiting = set()

    def check(gate, v):
        if not gate.kind.contains(v):
            raise RangeEscapeError(f"value {v!r} escapes {gate.kind}",
                                   gate=gate.id, step=step)
        return v

    def value(gid):
        if gid in values:
            return values[gid]
        # validate_diagram rejects combinational cycles; this guards
        # direct step_eval use on unvalidated nets.
        if gid in visiting:
            raise CombinationalCycleError(f"combinational cycle through {gid}",
                                          cycle=[gid])
        visiting.add(gid)
        gate = net.gates[gid]
        conn = net.incoming.get(gid)
        if gid in inputs:
            v = inputs[gid]
        elif conn is not None:
            v = value(conn.src)
            if conn.inverted:
                v = not v
        elif gid in net.constants:
            v = net.constants[gid].payload
        elif gid in net.block_of_output:
            block = net.block_of_output[gid]
            if block.type == "DELAY":
                if prev is None:
                    v = value(block.inputs[0].id)
                else:
                    v = prev[block.inputs[1].id]
            else:
                for g in block.inputs:
                    value(g.id)
                v = _apply(block, values, step)
        else:
            raise UnknownVariableError(f"gate {gid} has no driver and no input value")
        visiting.discard(gid)
        values[gid] = check(gate, v)
        return values[gid]

    for gid in net.gates:
        value(gid)
    return values


@dataclass
class ExtendedTrace:
    """Trace augmented with simulated values of every flat gate."""

    base: Trace
    net: FlatNet
    steps: list[dict]  # step-1 .. step-k gate valuations

    @property
    def upto(self):
        return len(self.steps)

    def value(self, gate_id, step):
        return self.steps[step - 1][gate_id]

    def has(self, gate_id, step):
        return 1 <= step <= len(self.steps) and gate_id in self.steps[step - 1]

    def to_json(self):
        return {"upTo": self.upto,
                "steps": [dict(sorted(s.items())) for s in self.steps]}


def extend_trace(diagram: Diagram, trace: Trace, up_to_step: int | None = None,
                 net: FlatNet | None = None) -> ExtendedTrace:
    """Compute internal gate values for steps 1..up_to_step.

    Model input variables are fed from the trace; everything else is
    simulated. Pure function of (diagram, trace, up_to_step).
    """
    if up_to_step is None:
        up_to_step = trace.length
    if up_to_step > trace.length:
        raise TraceSchemaError(
            f"cannot extend to step {up_to_step}: trace length {trace.length}")
    if net is None:
        net = flatten(diagram)
        topo_order(net)  # reject combinational cycles up front
    input_gates = {diagram.gate_of_var[v]: v for v in diagram.input_variables()}
    steps = []
    prev = None
    for step in range(1, up_to_step + 1):
        inputs = {gid: trace.value(v, step) for gid, v in input_gates.items()}
        prev = step_eval(net, inputs, prev, step)
        steps.append(prev)
    return ExtendedTrace(trace, net, steps)


def check_consistency(diagram: Diagram, trace: Trace) -> list[tuple]:
    """Compare simulated values of declared non-input variables with the trace.

    Returns (variable, step, traceValue, simulatedValue) mismatches;
    empty means the model reproduces the counterexample exactly.
    """
    ext = extend_trace(diagram, trace)
    inputs = set(diagram.input_variables())
    mismatches = []
    for var in trace.variables:
        if var in inputs or var not in diagram.gate_of_var:
            continue
        gid = diagram.gate_of_var[var]
        for step in range(1, trace.length + 1):
            expected = trace.value(var, step)
            actual = ext.value(gid, step)
            if expected != actual:
                mismatches.append((var, step, expected, actual))
    mismatches.sort(key=lambda m: (m[1], m[0]))
    return mismatches
