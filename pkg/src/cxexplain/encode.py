"""Turn parsed modules into complex blocks and wire the diagram.

Each module becomes a complex block: inputs are its params, outputs its
internal variables and DEFINEs. Every output variable is driven by a
guard block selecting the init expression net on the first cycle and
the next expression net afterwards; the first-cycle signal is a DELAY
whose default is TRUE and whose delayed source is the constant FALSE.
Plain references inside next expressions read delayed twins (one DELAY
per referenced signal; params always get one), next() references read
the undelayed nets.
"""

from __future__ import annotations

from .errors import (DuplicateNameError, ModelTypeError,
                     UnboundInstanceParamError, UnknownVariableError)
from .ir import (BOOLEAN, BasicBlock, ComplexBlock, Connection, Diagram,
                 Gate, IN, OUT, Value, ValueKind, bool_value, int_range)
from .syntax import (Binary, BoolLit, Case, Count, Expr, IntLit, NextRef,
                     SmvModel, SmvModule, Unary, VarRef, variables_of)


def _pos(expr):
    return getattr(expr, "pos", None) or (None, None)


def _err(msg, expr):
    line, col = _pos(expr)
    return ModelTypeError(msg, line=line, column=col)


def _join_int(ka, kb):
    return int_range(min(ka.lo, kb.lo), max(ka.hi, kb.hi))


def _arith_kind(op, ka, kb, expr):
    corners_a = (ka.lo, ka.hi)
    corners_b = (kb.lo, kb.hi)
    vals = []
    if op == "+":
        vals = [a + b for a in corners_a for b in corners_b]
    elif op == "-":
        vals = [a - b for a in corners_a for b in corners_b]
    elif op == "*":
        vals = [a * b for a in corners_a for b in corners_b]
    elif op == "/":
        if kb.lo == 0 and kb.hi == 0:
            raise _err("division by the constant zero", expr)
        divisors = {d for d in (kb.lo, kb.hi, -1, 1)
                    if d != 0 and kb.lo <= d <= kb.hi}
        vals = []
        for a in corners_a:
            for d in divisors:
                q = a // d
                if q < 0 and q * d != a:
                    q += 1
                vals.append(q)
    return int_range(min(vals), max(vals))


class _KindChecker:
    """Expression kind inference for one module scope."""

    def __init__(self, env):
        self.env = env  # name -> ValueKind

    def infer(self, expr, next_ok=True) -> ValueKind:
        if isinstance(expr, BoolLit):
            return BOOLEAN
        if isinstance(expr, IntLit):
            return int_range(expr.value, expr.value)
        if isinstance(expr, VarRef):
            if expr.name not in self.env:
                line, col = _pos(expr)
                raise UnknownVariableError(
                    f"undeclared variable {expr.name!r} "
                    f"(at {line}:{col})")
            return self.env[expr.name]
        if isinstance(expr, NextRef):
            if not next_ok:
                raise _err("next() is not allowed here", expr)
            if expr.name not in self.env:
                raise UnknownVariableError(
                    f"undeclared variable {expr.name!r} inside next()")
            return self.env[expr.name]
        if isinstance(expr, Unary):
            k = self.infer(expr.operand, next_ok)
            if expr.op == "!":
                if not k.is_bool:
                    raise _err("! needs a boolean operand", expr)
                return BOOLEAN
            if k.is_bool:
                raise _err("unary - needs an integer operand", expr)
            return int_range(-k.hi, -k.lo)
        if isinstance(expr, Binary):
            ka = self.infer(expr.left, next_ok)
            kb = self.infer(expr.right, next_ok)
            op = expr.op
            if op in ("&", "|", "xor", "->", "<->"):
                if not (ka.is_bool and kb.is_bool):
                    raise _err(f"{op} needs boolean operands", expr)
                return BOOLEAN
            if op in ("=", "!="):
                if ka.is_bool != kb.is_bool:
                    raise _err("= compares values of different kinds", expr)
                return BOOLEAN
            if op in ("<", ">", "<=", ">="):
                if ka.is_bool or kb.is_bool:
                    raise _err(f"{op} needs integer operands", expr)
                return BOOLEAN
            if op in ("+", "-", "*", "/"):
                if ka.is_bool or kb.is_bool:
                    raise _err(f"{op} needs integer operands", expr)
                return _arith_kind(op, ka, kb, expr)
            raise AssertionError(op)
        if isinstance(expr, Case):
            result_kind = None
            for cond, result in expr.branches:
                if not self.infer(cond, next_ok).is_bool:
                    raise _err("case condition must be boolean", cond)
                k = self.infer(result, next_ok)
                if result_kind is None:
                    result_kind = k
                elif result_kind.is_bool != k.is_bool:
                    raise _err("case branches disagree on result kind", result)
                elif not k.is_bool:
                    result_kind = _join_int(result_kind, k)
            return result_kind
        if isinstance(expr, Count):
            for a in expr.args:
                if not self.infer(a, next_ok).is_bool:
                    raise _err("count arguments must be boolean", a)
            return int_range(0, len(expr.args))
        raise AssertionError(f"unexpected node {expr!r}")


class _Operand:
    """A resolved expression: either a producing gate or a literal."""

    __slots__ = ("gate", "inverted", "const", "kind")

    def __init__(self, kind, gate=None, inverted=False, const=None):
        self.kind = kind
        self.gate = gate
        self.inverted = inverted
        self.const = const


class _Scope:
    """Gate/block factory for the inside of one complex block."""

    def __init__(self, owner_id):
        self.owner = owner_id
        self.blocks = []
        self.connections = []
        self._n = 0

    def fresh_block(self, btype, in_kinds, out_kind, tag=None):
        bid = f"{self.owner}/{tag or btype.lower()}{self._n}"
        self._n += 1
        ins = [Gate(f"{bid}/in{i}", f"in{i}", IN, bid, k)
               for i, k in enumerate(in_kinds)]
        out = Gate(f"{bid}/out", "out", OUT, bid, out_kind)
        block = BasicBlock(bid, btype, ins, out)
        self.blocks.append(block)
        return block

    def connect(self, operand: _Operand, dst: Gate, block=None):
        """Wire an operand into a consuming gate.

        Literals bind as constants on basic inputs; interface gates get
        an ASSIGN driver instead, since they need a connection.
        """
        if operand.const is not None or operand.gate is None:
            if block is not None:
                block.constants[dst.id] = operand.const
            else:
                feeder = self.fresh_block("ASSIGN", [operand.const.kind],
                                          operand.const.kind, tag="const")
                feeder.constants[feeder.inputs[0].id] = operand.const
                self.connections.append(Connection(feeder.output.id, dst.id))
        else:
            self.connections.append(
                Connection(operand.gate, dst.id, operand.inverted))


class _ModuleEncoder:
    def __init__(self, module: SmvModule, prefix: str):
        self.module = module
        self.prefix = prefix
        self.scope = _Scope(prefix)
        env = dict(module.params)
        for v in module.vars:
            env[v.name] = v.kind
        self.checker = _KindChecker(env)
        self.define_kind = {}
        self._infer_defines()
        self.in_gates = {n: Gate(f"{prefix}/in/{n}", n, IN, prefix, k)
                         for n, k in module.params}
        self.out_gates = {}
        for v in module.vars:
            self.out_gates[v.name] = Gate(f"{prefix}/out/{v.name}", v.name,
                                          OUT, prefix, v.kind)
        for n, _ in module.defines:
            self.out_gates[n] = Gate(f"{prefix}/out/{n}", n, OUT, prefix,
                                     self.define_kind[n])
        # Undelayed source gate per signal; var guards are pre-allocated
        # so init/next nets can reference any variable.
        self.source = dict()
        self.guards = {}
        for v in module.vars:
            guard = self.scope.fresh_block(
                "CHOICE", [BOOLEAN, v.kind, BOOLEAN, v.kind], v.kind,
                tag=f"guard_{v.name}_")
            self.guards[v.name] = guard
            self.source[v.name] = guard.output.id
        for n, k in module.params:
            self.source[n] = self.in_gates[n].id
        self.delayed = {}
        self._first_cycle = None

    def _infer_defines(self):
        pending = dict(self.module.defines)
        visiting = set()

        def resolve(name):
            if name in self.define_kind:
                return
            if name in visiting:
                raise ModelTypeError(f"circular DEFINE {name!r}")
            visiting.add(name)
            for ref in variables_of(pending[name]):
                if ref in pending and ref not in self.checker.env:
                    resolve(ref)
            k = self.checker.infer(pending[name], next_ok=False)
            self.define_kind[name] = k
            self.checker.env[name] = k
            visiting.discard(name)

        for name in pending:
            resolve(name)

    # --- signal sources ---------------------------------------------------

    def first_cycle(self) -> str:
        if self._first_cycle is None:
            d = self.scope.fresh_block("DELAY", [BOOLEAN, BOOLEAN], BOOLEAN,
                                       tag="firstcycle")
            d.constants[d.inputs[0].id] = bool_value(True)
            d.constants[d.inputs[1].id] = bool_value(False)
            self._first_cycle = d.output.id
        return self._first_cycle

    def delayed_twin(self, name) -> str:
        if name not in self.delayed:
            kind = self.checker.env[name]
            d = self.scope.fresh_block("DELAY", [kind, kind], kind,
                                       tag=f"delay_{name.replace('.', '_')}_")
            default = bool_value(False) if kind.is_bool \
                else Value(kind, kind.lo)
            d.constants[d.inputs[0].id] = default
            self.scope.connections.append(
                Connection(self.undelayed_source(name), d.inputs[1].id))
            self.delayed[name] = d.output.id
        return self.delayed[name]

    def undelayed_source(self, name) -> str:
        if name in self.source:
            return self.source[name]
        # define bodies are built on demand, memoized
        body = self.module.define(name)
        if body is None:
            raise UnknownVariableError(f"undeclared variable {name!r}")
        op = self.encode(body, delayed_refs=False)
        gid = self.materialize(op, self.define_kind[name])
        self.source[name] = gid
        return gid

    # --- expression encoding ----------------------------------------------

    def materialize(self, operand: _Operand, kind=None) -> str:
        """Force an operand to be a real gate (ASSIGN-wrap literals)."""
        if operand.gate is not None and not operand.inverted:
            return operand.gate
        if operand.gate is not None:
            # explicit NOT-as-connection target: run through ASSIGN
            blk = self.scope.fresh_block("ASSIGN", [BOOLEAN], BOOLEAN,
                                         tag="buf")
            self.scope.connections.append(
                Connection(operand.gate, blk.inputs[0].id, True))
            return blk.output.id
        blk = self.scope.fresh_block("ASSIGN", [operand.const.kind],
                                     kind or operand.const.kind, tag="const")
        blk.constants[blk.inputs[0].id] = operand.const
        return blk.output.id

    def _gather(self, expr, op):
        if isinstance(expr, Binary) and expr.op == op:
            return self._gather(expr.left, op) + self._gather(expr.right, op)
        return [expr]

    def encode(self, expr: Expr, delayed_refs: bool) -> _Operand:
        """Net for an expression.

        delayed_refs selects the reference convention: inside next
        expressions plain names read the delayed twins, next(x) reads
        the undelayed net. Init expressions and DEFINE bodies use
        undelayed references throughout.
        """
        if isinstance(expr, BoolLit):
            return _Operand(BOOLEAN, const=bool_value(expr.value))
        if isinstance(expr, IntLit):
            return _Operand(int_range(expr.value, expr.value),
                            const=Value(int_range(expr.value, expr.value),
                                        expr.value))
        if isinstance(expr, VarRef):
            kind = self.checker.env[expr.name]
            if delayed_refs:
                return _Operand(kind, gate=self.delayed_twin(expr.name))
            return _Operand(kind, gate=self.undelayed_source(expr.name))
        if isinstance(expr, NextRef):
            kind = self.checker.env[expr.name]
            return _Operand(kind, gate=self.undelayed_source(expr.name))
        if isinstance(expr, Unary):
            if expr.op == "!":
                op = self.encode(expr.operand, delayed_refs)
                if op.const is not None:
                    return _Operand(BOOLEAN,
                                    const=bool_value(not op.const.payload))
                return _Operand(BOOLEAN, gate=op.gate,
                                inverted=not op.inverted)
            # unary minus: 0 - e
            inner = self.encode(expr.operand, delayed_refs)
            kind = int_range(-inner.kind.hi, -inner.kind.lo)
            blk = self.scope.fresh_block(
                "SUB", [int_range(0, 0), inner.kind], kind, tag="neg")
            blk.constants[blk.inputs[0].id] = Value(int_range(0, 0), 0)
            self.scope.connect(inner, blk.inputs[1], block=blk)
            return _Operand(kind, gate=blk.output.id)
        if isinstance(expr, Binary):
            return self._encode_binary(expr, delayed_refs)
        if isinstance(expr, Case):
            kinds = []
            ops = []
            for cond, result in expr.branches:
                ops.append((self.encode(cond, delayed_refs),
                            self.encode(result, delayed_refs)))
                kinds.append(ops[-1][1].kind)
            out_kind = kinds[0]
            for k in kinds[1:]:
                out_kind = k if out_kind.is_bool else _join_int(out_kind, k)
            in_kinds = []
            for c, r in ops:
                in_kinds.extend((BOOLEAN, r.kind if not out_kind.is_bool
                                 else BOOLEAN))
            blk = self.scope.fresh_block("CHOICE", in_kinds, out_kind,
                                         tag="case")
            for i, (c, r) in enumerate(ops):
                self.scope.connect(c, blk.inputs[2 * i], block=blk)
                self.scope.connect(r, blk.inputs[2 * i + 1], block=blk)
            return _Operand(out_kind, gate=blk.output.id)
        if isinstance(expr, Count):
            ops = [self.encode(a, delayed_refs) for a in expr.args]
            kind = int_range(0, len(ops))
            blk = self.scope.fresh_block("COUNT", [BOOLEAN] * len(ops), kind)
            for op, g in zip(ops, blk.inputs):
                self.scope.connect(op, g, block=blk)
            return _Operand(kind, gate=blk.output.id)
        raise AssertionError(f"unexpected node {expr!r}")

    def _encode_binary(self, expr: Binary, delayed_refs: bool) -> _Operand:
        op = expr.op
        if op in ("&", "|"):
            parts = self._gather(expr, op)
            ops = [self.encode(p, delayed_refs) for p in parts]
            blk = self.scope.fresh_block(
                "AND" if op == "&" else "OR", [BOOLEAN] * len(ops), BOOLEAN)
            for o, g in zip(ops, blk.inputs):
                self.scope.connect(o, g, block=blk)
            return _Operand(BOOLEAN, gate=blk.output.id)
        if op == "->":
            a = self.encode(expr.left, delayed_refs)
            b = self.encode(expr.right, delayed_refs)
            a.inverted = not a.inverted
            if a.const is not None:
                a = _Operand(BOOLEAN, const=bool_value(not a.const.payload))
            blk = self.scope.fresh_block("OR", [BOOLEAN, BOOLEAN], BOOLEAN,
                                         tag="imp")
            self.scope.connect(a, blk.inputs[0], block=blk)
            self.scope.connect(b, blk.inputs[1], block=blk)
            return _Operand(BOOLEAN, gate=blk.output.id)
        a = self.encode(expr.left, delayed_refs)
        b = self.encode(expr.right, delayed_refs)
        if op in ("<->", "xor") or (op in ("=", "!=") and a.kind.is_bool):
            blk = self.scope.fresh_block("IFF", [BOOLEAN, BOOLEAN], BOOLEAN)
            self.scope.connect(a, blk.inputs[0], block=blk)
            self.scope.connect(b, blk.inputs[1], block=blk)
            invert = op in ("xor", "!=")
            return _Operand(BOOLEAN, gate=blk.output.id, inverted=invert)
        if op in ("=", "!="):
            blk = self.scope.fresh_block("EQ", [a.kind, b.kind], BOOLEAN)
            self.scope.connect(a, blk.inputs[0], block=blk)
            self.scope.connect(b, blk.inputs[1], block=blk)
            return _Operand(BOOLEAN, gate=blk.output.id, inverted=op == "!=")
        if op in ("<", ">", "<=", ">="):
            btype = {"<": "LT", ">": "GT", "<=": "LE", ">=": "GE"}[op]
            blk = self.scope.fresh_block(btype, [a.kind, b.kind], BOOLEAN)
            self.scope.connect(a, blk.inputs[0], block=blk)
            self.scope.connect(b, blk.inputs[1], block=blk)
            return _Operand(BOOLEAN, gate=blk.output.id)
        if op in ("+", "-", "*", "/"):
            btype = {"+": "ADD", "-": "SUB", "*": "MUL", "/": "DIV"}[op]
            kind = _arith_kind(op, a.kind, b.kind, expr)
            blk = self.scope.fresh_block(btype, [a.kind, b.kind], kind)
            self.scope.connect(a, blk.inputs[0], block=blk)
            self.scope.connect(b, blk.inputs[1], block=blk)
            return _Operand(kind, gate=blk.output.id)
        raise AssertionError(op)

    # --- whole module -----------------------------------------------------

    def build(self) -> ComplexBlock:
        mod = self.module
        for n, k in mod.params:
            self.delayed_twin(n)  # every param gets a delayed version
        for v in mod.vars:
            if self.checker.infer(v.init, next_ok=False).is_bool != v.kind.is_bool:
                raise _err(f"init({v.name}) kind does not match declaration",
                           v.init)
            if self.checker.infer(v.next).is_bool != v.kind.is_bool:
                raise _err(f"next({v.name}) kind does not match declaration",
                           v.next)
            guard = self.guards[v.name]
            init_net = self.encode(v.init, delayed_refs=False)
            next_net = self.encode(v.next, delayed_refs=True)
            self.scope.connections.append(
                Connection(self.first_cycle(), guard.inputs[0].id))
            self.scope.connect(init_net, guard.inputs[1], block=guard)
            guard.constants[guard.inputs[2].id] = bool_value(True)
            self.scope.connect(next_net, guard.inputs[3], block=guard)
            self.scope.connections.append(
                Connection(guard.output.id, self.out_gates[v.name].id))
        for n, _ in mod.defines:
            gid = self.undelayed_source(n)
            self.scope.connections.append(
                Connection(gid, self.out_gates[n].id))
        return ComplexBlock(
            self.prefix, self.prefix, mod.name,
            [self.in_gates[n] for n, _ in mod.params],
            [self.out_gates[v.name] for v in mod.vars]
            + [self.out_gates[n] for n, _ in mod.defines],
            self.scope.blocks, self.scope.connections)


def encode_module(module: SmvModule, prefix: str | None = None) -> ComplexBlock:
    """Encode one parsed module as a complex block."""
    return _ModuleEncoder(module, prefix or module.name).build()


def build_diagram(model: SmvModel) -> Diagram:
    """Root complex block mirroring main, instances wired per actual params."""
    main = model.main
    root_scope = _Scope("main")
    in_gates = {v.name: Gate(f"main/in/{v.name}", v.name, IN, "main", v.kind)
                for v in main.vars}
    variables = {v.name: in_gates[v.name].id for v in main.vars}

    env = {v.name: v.kind for v in main.vars}
    child_blocks = []
    instance_modules = {}
    for inst in main.instances:
        if inst.module_name not in model.modules or inst.module_name == "main":
            raise UnboundInstanceParamError(
                f"instance {inst.name!r} refers to unknown module "
                f"{inst.module_name!r}")
        mod = model.modules[inst.module_name]
        instance_modules[inst.name] = mod
        block = encode_module(mod, inst.name)
        child_blocks.append(block)
        for g in block.outputs:
            dotted = f"{inst.name}.{g.name}"
            if dotted in variables:
                raise DuplicateNameError(f"duplicate variable {dotted!r}")
            variables[dotted] = g.id
            env[dotted] = g.kind

    checker = _KindChecker(env)
    enc = _ModuleEncoder.__new__(_ModuleEncoder)
    enc.scope = root_scope
    enc.checker = checker
    enc.prefix = "main"
    enc.delayed = {}
    enc._first_cycle = None
    enc.module = SmvModule("main", [], [], [], [])
    enc.define_kind = {}
    enc.source = dict()
    for v in main.vars:
        enc.source[v.name] = in_gates[v.name].id
    for block in child_blocks:
        for g in block.outputs:
            enc.source[f"{block.id}.{g.name}"] = g.id

    for inst, block in zip(main.instances, child_blocks):
        mod = instance_modules[inst.name]
        if len(inst.args) != len(mod.params):
            raise UnboundInstanceParamError(
                f"instance {inst.name!r} passes {len(inst.args)} arguments, "
                f"module {mod.name!r} takes {len(mod.params)}")
        for arg, (pname, pkind), gate in zip(inst.args, mod.params,
                                             block.inputs):
            try:
                akind = checker.infer(arg, next_ok=False)
            except UnknownVariableError as e:
                raise UnboundInstanceParamError(
                    f"argument {pname!r} of instance {inst.name!r}: {e}")
            if akind.is_bool != pkind.is_bool:
                raise _err(
                    f"argument {pname!r} of instance {inst.name!r} has the "
                    "wrong kind", arg)
            operand = enc.encode(arg, delayed_refs=False)
            root_scope.connect(operand, gate)

    root = ComplexBlock("main", "main", "main",
                        [in_gates[v.name] for v in main.vars], [],
                        child_blocks + root_scope.blocks,
                        root_scope.connections)
    return Diagram(root, variables)
