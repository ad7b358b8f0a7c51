"""Function-block-diagram intermediate representation.

A diagram is a tree of complex blocks whose leaves are basic blocks
(gates wired by possibly-inverted connections). Blocks execute once per
discrete step; feedback must pass through a DELAY's delayed-source
input, which reads the previous step and therefore imposes no
evaluation-order constraint.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CombinationalCycleError

BOOL = "boolean"
INT = "integer"

# Basic block vocabulary. DELAY inputs are (default, delayed-source);
# CHOICE inputs alternate (condition, result) pairs.
LOGICAL = ("AND", "OR", "IFF")
ARITHMETIC = ("SUB", "ADD", "MUL", "DIV")
RELATIONAL = ("GT", "LT", "LE", "GE", "EQ")
OTHER = ("DELAY", "CHOICE", "COUNT", "ASSIGN")
BLOCK_TYPES = LOGICAL + ARITHMETIC + RELATIONAL + OTHER

IN = "in"
OUT = "out"


@dataclass(frozen=True)
class ValueKind:
    """boolean, or integer restricted to an inclusive range."""

    kind: str
    lo: int | None = None
    hi: int | None = None

    def __post_init__(self):
        if self.kind not in (BOOL, INT):
            raise ValueError(f"bad value kind {self.kind!r}")
        if self.kind == INT:
            if self.lo is None or self.hi is None or self.lo > self.hi:
                raise ValueError(f"bad integer range [{self.lo}, {self.hi}]")

    @property
    def is_bool(self):
        return self.kind == BOOL

    def contains(self, value):
        if self.kind == BOOL:
            return isinstance(value, bool)
        return isinstance(value, int) and not isinstance(value, bool) \
            and self.lo <= value <= self.hi

    def to_json(self):
        if self.kind == BOOL:
            return {"kind": BOOL}
        return {"kind": INT, "lo": self.lo, "hi": self.hi}

    @staticmethod
    def from_json(doc):
        if doc["kind"] == BOOL:
            return BOOLEAN
        return ValueKind(INT, doc["lo"], doc["hi"])


BOOLEAN = ValueKind(BOOL)


def int_range(lo, hi):
    return ValueKind(INT, lo, hi)


@dataclass(frozen=True)
class Value:
    """A typed literal: a truth value or an in-range integer."""

    kind: ValueKind
    payload: bool | int

    def __post_init__(self):
        if not self.kind.contains(self.payload):
            raise ValueError(f"{self.payload!r} is not a {self.kind}")


def bool_value(v):
    return Value(BOOLEAN, bool(v))


def int_value(v, lo=None, hi=None):
    if lo is None:
        lo, hi = v, v
    return Value(int_range(lo, hi), v)


@dataclass(frozen=True)
class Gate:
    id: str
    name: str
    direction: str  # IN | OUT
    owner: str      # id of the owning block
    kind: ValueKind


@dataclass(frozen=True)
class Connection:
    src: str  # producing gate id
    dst: str  # consuming gate id
    inverted: bool = False

    @property
    def id(self):
        return f"{self.src}->{self.dst}"


@dataclass
class BasicBlock:
    id: str
    type: str
    inputs: list[Gate]
    output: Gate
    # input gate id -> literal bound to an input with no incoming connection
    constants: dict[str, Value] = field(default_factory=dict)

    @property
    def name(self):
        return self.id

    def choice_pairs(self):
        """(condition gate, result gate) pairs of a CHOICE block."""
        return list(zip(self.inputs[0::2], self.inputs[1::2]))


@dataclass
class ComplexBlock:
    id: str
    name: str
    type_name: str
    inputs: list[Gate]
    outputs: list[Gate]
    blocks: list  # BasicBlock | ComplexBlock
    connections: list[Connection]

    def interface_gates(self):
        return list(self.inputs) + list(self.outputs)


@dataclass
class Diagram:
    """Top-level complex block plus the gate <-> variable naming map."""

    root: ComplexBlock
    variables: dict[str, str]  # variable name -> gate id

    def __post_init__(self):
        self.gate_of_var = dict(self.variables)
        self.var_of_gate = {g: v for v, g in self.variables.items()}

    def input_variables(self):
        ins = {g.id for g in self.root.inputs}
        return [v for v, g in self.variables.items() if g in ins]

    def declared_kinds(self):
        gates = {g.id: g for g in iter_gates(self.root)}
        return {v: gates[gid].kind for v, gid in self.variables.items()}


@dataclass(frozen=True)
class Violation:
    code: str
    subject: str  # offending block/gate/connection id
    message: str


def iter_blocks(block):
    """All blocks of the subtree, the argument included."""
    yield block
    if isinstance(block, ComplexBlock):
        for b in block.blocks:
            yield from iter_blocks(b)


def iter_gates(block):
    for b in iter_blocks(block):
        if isinstance(b, BasicBlock):
            yield from b.inputs
            yield b.output
        else:
            yield from b.interface_gates()


def _arity_violations(b: BasicBlock):
    bad = []

    def v(code, msg):
        bad.append(Violation(code, b.id, msg))

    n = len(b.inputs)
    ins_bool = all(g.kind.is_bool for g in b.inputs)
    ins_int = all(not g.kind.is_bool for g in b.inputs)
    if b.type in ("AND", "OR", "COUNT"):
        if n < 1:
            v("arity", f"{b.type} needs at least 1 input, has {n}")
        if not ins_bool:
            v("type-mismatch", f"{b.type} requires boolean inputs")
        if b.type == "COUNT" and b.output.kind.is_bool:
            v("type-mismatch", "COUNT output must be integer")
        if b.type != "COUNT" and not b.output.kind.is_bool:
            v("type-mismatch", f"{b.type} output must be boolean")
    elif b.type == "IFF":
        if n != 2 or not ins_bool or not b.output.kind.is_bool:
            v("type-mismatch", "IFF takes exactly 2 boolean inputs")
    elif b.type in ARITHMETIC:
        if n != 2 or not ins_int or b.output.kind.is_bool:
            v("type-mismatch", f"{b.type} takes exactly 2 integer inputs")
    elif b.type in RELATIONAL:
        if n != 2 or not ins_int or not b.output.kind.is_bool:
            v("type-mismatch",
              f"{b.type} takes exactly 2 integer inputs, boolean output")
    elif b.type == "ASSIGN":
        if n != 1 or b.inputs[0].kind.is_bool != b.output.kind.is_bool:
            v("type-mismatch", "ASSIGN takes 1 input of the output's kind")
    elif b.type == "DELAY":
        if n != 2:
            v("arity", f"DELAY needs (default, delayed-source), has {n}")
        elif not all(g.kind.is_bool == b.output.kind.is_bool
                     for g in b.inputs):
            v("type-mismatch", "DELAY inputs must match the output kind")
    elif b.type == "CHOICE":
        if n == 0 or n % 2 != 0:
            v("arity", f"CHOICE needs alternating (condition, result) pairs, has {n}")
        else:
            conds, results = b.inputs[0::2], b.inputs[1::2]
            if not all(g.kind.is_bool for g in conds):
                v("type-mismatch", "CHOICE conditions must be boolean")
            if not all(g.kind.is_bool == b.output.kind.is_bool
                       for g in results):
                v("type-mismatch", "CHOICE results must match the output kind")
    else:
        v("unknown-type", f"unknown block type {b.type}")
    return bad


def validate_diagram(diagram: Diagram) -> list[Violation]:
    """Structural validation; an empty report means the diagram is well formed.

    Violations are data, not exceptions: each names the offending
    block, gate or connection.
    """
    out = []
    root = diagram.root

    # Gate id uniqueness across the whole diagram.
    seen = {}
    for g in iter_gates(root):
        if g.id in seen:
            out.append(Violation("duplicate-gate-id", g.id,
                                 f"gate id {g.id} declared twice"))
        seen[g.id] = g
    gates = seen

    # Block id uniqueness; gate name uniqueness per interface side.
    block_ids = set()
    for b in iter_blocks(root):
        if b.id in block_ids:
            out.append(Violation("duplicate-block-id", b.id,
                                 f"block id {b.id} declared twice"))
        block_ids.add(b.id)
        sides = (((IN, b.inputs), (OUT, [b.output]))
                 if isinstance(b, BasicBlock)
                 else ((IN, b.inputs), (OUT, b.outputs)))
        for side, gs in sides:
            names = set()
            for g in gs:
                if g.name in names:
                    out.append(Violation(
                        "duplicate-gate-name", g.id,
                        f"gate name {g.name} repeated on {side} side of {b.id}"))
                names.add(g.name)

    for b in iter_blocks(root):
        if isinstance(b, BasicBlock):
            out.extend(_arity_violations(b))
            for gid, val in b.constants.items():
                gate = gates.get(gid)
                if gate is None or gate.owner != b.id:
                    out.append(Violation("bad-constant", b.id,
                                         f"constant bound to foreign gate {gid}"))
                elif not gate.kind.contains(val.payload):
                    out.append(Violation("bad-constant", gid,
                                         f"constant {val.payload!r} outside gate kind"))

    # Connection scoping. Within a complex block, legal producers are its
    # own input gates and children's outputs; legal consumers are its own
    # output gates and children's inputs.
    incoming = {}
    for cb in iter_blocks(root):
        if not isinstance(cb, ComplexBlock):
            continue
        producers = {g.id for g in cb.inputs}
        consumers = {g.id for g in cb.outputs}
        for child in cb.blocks:
            if isinstance(child, BasicBlock):
                producers.add(child.output.id)
                consumers.update(g.id for g in child.inputs)
            else:
                producers.update(g.id for g in child.outputs)
                consumers.update(g.id for g in child.inputs)
        for c in cb.connections:
            if c.src not in producers:
                out.append(Violation("bad-endpoint", c.id,
                                     f"{c.src} cannot produce inside {cb.id}"))
            if c.dst not in consumers:
                out.append(Violation("bad-endpoint", c.id,
                                     f"{c.dst} cannot consume inside {cb.id}"))
            if c.dst in incoming:
                out.append(Violation("multiple-drivers", c.dst,
                                     f"gate {c.dst} has several incoming connections"))
            incoming[c.dst] = c
            if c.src in gates and c.dst in gates:
                sk, dk = gates[c.src].kind, gates[c.dst].kind
                if sk.is_bool != dk.is_bool:
                    out.append(Violation("type-mismatch", c.id,
                                         "connection links boolean and integer gates"))
                if c.inverted and not (sk.is_bool and dk.is_bool):
                    out.append(Violation("bad-inversion", c.id,
                                         "inversion requires boolean endpoints"))

    # Driven-ness: basic inputs need exactly one driver (connection xor
    # constant); interface outputs and nested interface inputs need one
    # incoming connection; root inputs must stay undriven.
    for b in iter_blocks(root):
        if isinstance(b, BasicBlock):
            for g in b.inputs:
                has_conn = g.id in incoming
                has_const = g.id in b.constants
                if has_conn and has_const:
                    out.append(Violation("multiple-drivers", g.id,
                                         "input has both a connection and a constant"))
                elif not has_conn and not has_const:
                    out.append(Violation("undriven", g.id,
                                         f"basic input {g.id} has no driver"))
        else:
            for g in b.outputs:
                if g.id not in incoming:
                    out.append(Violation("undriven", g.id,
                                         f"interface output {g.id} has no driver"))
            if b is not root:
                for g in b.inputs:
                    if g.id not in incoming:
                        out.append(Violation("undriven", g.id,
                                             f"interface input {g.id} has no driver"))
    for g in root.inputs:
        if g.id in incoming:
            out.append(Violation("driven-root-input", g.id,
                                 "diagram input has an incoming connection"))

    # Combinational cycles are detected on the flattened dependency graph.
    if not out:
        try:
            topo_order(flatten(diagram))
        except CombinationalCycleError as e:
            subject = e.cycle[0] if e.cycle else root.id
            out.append(Violation("combinational-cycle", subject, str(e)))
    return out


@dataclass
class FlatNet:
    """Basic blocks and connections only.

    Complex-block interface gates survive as pass-through junctions so
    hierarchical assignments stay addressable; gate_map sends every
    hierarchy gate to its flat counterpart (identity here, since gate
    ids are globally unique).
    """

    blocks: list[BasicBlock]
    junctions: list[Gate]
    connections: list[Connection]
    inputs: list[str]             # root interface input gate ids
    outputs: list[str]            # root interface output gate ids
    gate_map: dict[str, str]

    def __post_init__(self):
        self.gates = {}
        for b in self.blocks:
            for g in b.inputs:
                self.gates[g.id] = g
            self.gates[b.output.id] = b.output
        for g in self.junctions:
            self.gates[g.id] = g
        self.incoming = {c.dst: c for c in self.connections}
        self.block_of_output = {b.output.id: b for b in self.blocks}
        self.owner_block = {}
        for b in self.blocks:
            for g in b.inputs:
                self.owner_block[g.id] = b
            self.owner_block[b.output.id] = b
        self.constants = {}
        for b in self.blocks:
            self.constants.update(b.constants)


def flatten(diagram: Diagram) -> FlatNet:
    """Replace every complex block by its internal net.

    Connections are kept hop-for-hop (producer -> junction -> consumer),
    preserving the constraint structure of the hierarchy.
    """
    blocks, junctions, connections = [], [], []
    for b in iter_blocks(diagram.root):
        if isinstance(b, BasicBlock):
            blocks.append(b)
        else:
            junctions.extend(b.interface_gates())
            connections.extend(b.connections)
    gate_map = {g.id: g.id for b in blocks for g in list(b.inputs) + [b.output]}
    gate_map.update({g.id: g.id for g in junctions})
    return FlatNet(
        blocks=blocks,
        junctions=junctions,
        connections=connections,
        inputs=[g.id for g in diagram.root.inputs],
        outputs=[g.id for g in diagram.root.outputs],
        gate_map=gate_map,
    )


def gate_dependencies(net: FlatNet, include_delay_source=False):
    """Gate-level dependency edges (src gate -> dst gate).

    A DELAY's delayed-source input reads the previous step and is
    excluded unless asked for; its default input is a real step-1
    dependency and always counts.
    """
    edges = [(c.src, c.dst) for c in net.connections]
    for b in net.blocks:
        if b.type == "DELAY":
            edges.append((b.inputs[0].id, b.output.id))
            if include_delay_source:
                edges.append((b.inputs[1].id, b.output.id))
        else:
            edges.extend((g.id, b.output.id) for g in b.inputs)
    return edges


def _gate_order(net: FlatNet):
    """Topological order of all flat gates under the DELAY-cut graph."""
    edges = gate_dependencies(net)
    succ = {g: [] for g in net.gates}
    indeg = {g: 0 for g in net.gates}
    for s, d in edges:
        succ[s].append(d)
        indeg[d] += 1
    ready = sorted(g for g, n in indeg.items() if n == 0)
    order = []
    while ready:
        g = ready.pop()
        order.append(g)
        for d in succ[g]:
            indeg[d] -= 1
            if indeg[d] == 0:
                ready.append(d)
    if len(order) != len(net.gates):
        stuck = sorted(g for g, n in indeg.items() if n > 0)
        raise CombinationalCycleError(
            f"combinational cycle through gates {', '.join(stuck[:8])}",
            cycle=stuck)
    return order


def topo_order(net: FlatNet) -> list[BasicBlock]:
    """Single-step evaluation order of the basic blocks."""
    pos = {g: i for i, g in enumerate(_gate_order(net))}
    return sorted(net.blocks, key=lambda b: pos[b.output.id])


# --- interchange format -------------------------------------------------

def diagram_to_json(diagram: Diagram) -> dict:
    """Interchange document: flat arrays of blocks, gates, connections."""
    blocks, gates, connections = [], [], []

    def gate_doc(g):
        return {"id": g.id, "name": g.name, "direction": g.direction,
                "owner": g.owner, "valueKind": g.kind.to_json()}

    def walk(b, parent):
        if isinstance(b, BasicBlock):
            blocks.append({
                "id": b.id, "kind": "basic", "type": b.type, "parent": parent,
                "inputs": [g.id for g in b.inputs], "output": b.output.id,
                "constants": {gid: v.payload for gid, v in b.constants.items()},
            })
            gates.extend(gate_doc(g) for g in b.inputs)
            gates.append(gate_doc(b.output))
        else:
            blocks.append({
                "id": b.id, "kind": "complex", "name": b.name,
                "typeName": b.type_name, "parent": parent,
                "inputs": [g.id for g in b.inputs],
                "outputs": [g.id for g in b.outputs],
            })
            gates.extend(gate_doc(g) for g in b.interface_gates())
            for c in b.connections:
                connections.append({"id": c.id, "from": c.src, "to": c.dst,
                                    "inverted": c.inverted, "owner": b.id})
            for child in b.blocks:
                walk(child, b.id)

    walk(diagram.root, None)
    return {
        "root": diagram.root.id,
        "blocks": blocks,
        "gates": gates,
        "connections": connections,
        "variables": dict(sorted(diagram.variables.items())),
    }


def diagram_from_json(doc: dict) -> Diagram:
    gates = {}
    for g in doc["gates"]:
        gates[g["id"]] = Gate(g["id"], g["name"], g["direction"], g["owner"],
                              ValueKind.from_json(g["valueKind"]))
    conns = {}
    for c in doc["connections"]:
        conns.setdefault(c["owner"], []).append(
            Connection(c["from"], c["to"], c["inverted"]))
    raw = {b["id"]: b for b in doc["blocks"]}
    children = {}
    for b in doc["blocks"]:
        children.setdefault(b["parent"], []).append(b["id"])

    def build(bid):
        b = raw[bid]
        if b["kind"] == "basic":
            ins = [gates[g] for g in b["inputs"]]
            out = gates[b["output"]]
            consts = {}
            for gid, payload in b.get("constants", {}).items():
                consts[gid] = Value(gates[gid].kind, payload)
            return BasicBlock(b["id"], b["type"], ins, out, consts)
        return ComplexBlock(
            b["id"], b["name"], b["typeName"],
            [gates[g] for g in b["inputs"]],
            [gates[g] for g in b["outputs"]],
            [build(c) for c in children.get(bid, [])],
            conns.get(bid, []),
        )

    return Diagram(build(doc["root"]), dict(doc["variables"]))
