"""AST for model expressions and temporal formulas, plus pretty-printing.

One node family serves both: model expressions never contain temporal
operators, formulas may. Source positions are carried for diagnostics
but excluded from equality so printed-and-reparsed trees compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ir import ValueKind


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class VarRef(Expr):
    name: str  # possibly dotted: inst.var
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class NextRef(Expr):
    name: str
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Unary(Expr):
    op: str  # "!" | "-"
    operand: Expr
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Binary(Expr):
    op: str  # & | xor -> <-> = != < > <= >= + - * /
    left: Expr
    right: Expr
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Case(Expr):
    branches: tuple  # ((condition, result), ...)
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Count(Expr):
    args: tuple
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class TemporalUnary(Expr):
    op: str  # X G F
    operand: Expr
    pos: tuple | None = field(default=None, compare=False)


@dataclass(frozen=True)
class TemporalBinary(Expr):
    op: str  # U
    left: Expr
    right: Expr
    pos: tuple | None = field(default=None, compare=False)


def children(node: Expr) -> list[Expr]:
    if isinstance(node, (Unary, TemporalUnary)):
        return [node.operand]
    if isinstance(node, (Binary, TemporalBinary)):
        return [node.left, node.right]
    if isinstance(node, Case):
        out = []
        for cond, result in node.branches:
            out.extend((cond, result))
        return out
    if isinstance(node, Count):
        return list(node.args)
    return []


def variables_of(node: Expr) -> set[str]:
    names = set()

    def walk(n):
        if isinstance(n, (VarRef, NextRef)):
            names.add(n.name)
        for c in children(n):
            walk(c)

    walk(node)
    return names


def contains_temporal(node: Expr) -> bool:
    if isinstance(node, (TemporalUnary, TemporalBinary)):
        return True
    return any(contains_temporal(c) for c in children(node))


# Precedence, loosest first. Relations bind tighter than U so plain
# comparisons stay inside atoms; unary operators bind tightest.
_LEVELS = {
    "<->": 0, "->": 1,
    "|": 2, "xor": 2,
    "&": 3,
    "U": 4,
    "=": 5, "!=": 5, "<": 5, ">": 5, "<=": 5, ">=": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7,
}
_UNARY_LEVEL = 8
_RIGHT_ASSOC = {"->", "U"}


def precedence(node: Expr) -> int:
    if isinstance(node, (Binary, TemporalBinary)):
        return _LEVELS[node.op]
    if isinstance(node, (Unary, TemporalUnary)):
        return _UNARY_LEVEL
    return 9


def to_text(node: Expr) -> str:
    """Parseable rendering with minimal parentheses."""
    if isinstance(node, BoolLit):
        return "TRUE" if node.value else "FALSE"
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, VarRef):
        return node.name
    if isinstance(node, NextRef):
        return f"next({node.name})"
    if isinstance(node, Case):
        arms = " ".join(f"{to_text(c)} : {to_text(r)};" for c, r in node.branches)
        return f"case {arms} esac"
    if isinstance(node, Count):
        return f"count({', '.join(to_text(a) for a in node.args)})"
    if isinstance(node, (Unary, TemporalUnary)):
        inner = to_text(node.operand)
        if precedence(node.operand) < _UNARY_LEVEL:
            inner = f"({inner})"
        sep = " " if node.op in ("X", "G", "F") else ""
        return f"{node.op}{sep}{inner}"
    if isinstance(node, (Binary, TemporalBinary)):
        lvl = _LEVELS[node.op]
        right_assoc = node.op in _RIGHT_ASSOC
        left = to_text(node.left)
        if precedence(node.left) < lvl or \
                (precedence(node.left) == lvl and right_assoc):
            left = f"({left})"
        right = to_text(node.right)
        if precedence(node.right) < lvl or \
                (precedence(node.right) == lvl and not right_assoc):
            right = f"({right})"
        return f"{left} {node.op} {right}"
    raise AssertionError(f"unknown node {node!r}")


def label(node: Expr) -> str:
    """Short operator tag for tree displays."""
    if isinstance(node, (Binary, TemporalBinary, Unary, TemporalUnary)):
        return node.op
    if isinstance(node, BoolLit):
        return "TRUE" if node.value else "FALSE"
    if isinstance(node, IntLit):
        return str(node.value)
    if isinstance(node, VarRef):
        return node.name
    if isinstance(node, NextRef):
        return f"next({node.name})"
    if isinstance(node, Case):
        return "case"
    if isinstance(node, Count):
        return "count"
    raise AssertionError(f"unknown node {node!r}")


# --- model declarations ---------------------------------------------------

@dataclass
class SmvVar:
    name: str
    kind: ValueKind
    init: Expr | None = None   # None only for main's input variables
    next: Expr | None = None


@dataclass
class SmvInstance:
    name: str
    module_name: str
    args: list


@dataclass
class SmvModule:
    name: str
    params: list          # (name, ValueKind) pairs
    vars: list            # SmvVar
    defines: list         # (name, Expr) pairs
    instances: list       # SmvInstance; only main may have any

    def var(self, name):
        for v in self.vars:
            if v.name == name:
                return v
        return None

    def define(self, name):
        for n, e in self.defines:
            if n == name:
                return e
        return None


@dataclass
class SmvModel:
    modules: dict

    @property
    def main(self):
        return self.modules["main"]


def kind_to_text(kind: ValueKind) -> str:
    return "boolean" if kind.is_bool else f"{kind.lo}..{kind.hi}"


def model_to_text(model: SmvModel) -> str:
    out = []
    for mod in model.modules.values():
        params = ""
        if mod.params:
            params = "(" + ", ".join(f"{n} : {kind_to_text(k)}"
                                     for n, k in mod.params) + ")"
        out.append(f"MODULE {mod.name}{params}")
        decls = [v for v in mod.vars] + mod.instances
        if decls:
            out.append("VAR")
            for v in mod.vars:
                out.append(f"  {v.name} : {kind_to_text(v.kind)};")
            for inst in mod.instances:
                args = ", ".join(to_text(a) for a in inst.args)
                out.append(f"  {inst.name} : {inst.module_name}({args});")
        assigns = [v for v in mod.vars if v.init is not None]
        if assigns:
            out.append("ASSIGN")
            for v in assigns:
                out.append(f"  init({v.name}) := {to_text(v.init)};")
                out.append(f"  next({v.name}) := {to_text(v.next)};")
        if mod.defines:
            out.append("DEFINE")
            for name, expr in mod.defines:
                out.append(f"  {name} := {to_text(expr)};")
        out.append("")
    return "\n".join(out)


class FormulaTree:
    """A formula with stable preorder node indexing."""

    def __init__(self, root: Expr):
        self.root = root
        self.nodes = []
        self.children = []
        self._index = {}

        def walk(n):
            idx = len(self.nodes)
            self.nodes.append(n)
            self.children.append([])
            self._index[id(n)] = idx
            for c in children(n):
                self.children[idx].append(walk(c))
            return idx

        walk(root)

    def __len__(self):
        return len(self.nodes)

    def index(self, node) -> int:
        return self._index[id(node)]

    def to_text(self) -> str:
        return to_text(self.root)

    def variables(self) -> set[str]:
        return variables_of(self.root)
