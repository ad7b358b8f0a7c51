"""Tokenizer and recursive-descent parsers for the model subset and LTL.

The model grammar is the restricted subset documented in
docs/grammar.md: a main module holding input variables and module
instances, other modules holding typed params plus variables declared
with both init and next. Unsupported constructs raise errors naming the
violated restriction instead of generic syntax failures.
"""

from __future__ import annotations

import re

from .errors import (DuplicateNameError, ParseError, UnknownVariableError,
                     UnsupportedFeatureError, UnsupportedOperatorError)
from .ir import BOOLEAN, ValueKind, int_range
from .syntax import (Binary, BoolLit, Case, Count, Expr, FormulaTree, IntLit,
                     NextRef, SmvInstance, SmvModel, SmvModule, SmvVar,
                     TemporalBinary, TemporalUnary, Unary, VarRef,
                     contains_temporal)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<comment>--[^\n]*)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_$\#]*(?:\.[A-Za-z_][A-Za-z0-9_$\#]*)*)
  | (?P<op>:=|<->|->|<=|>=|!=|\.\.|[()\[\]{},;:=<>+\-*/!|&])
""", re.VERBOSE)

_SECTION_KEYWORDS = {"VAR", "IVAR", "ASSIGN", "DEFINE", "INIT", "TRANS",
                     "INVAR", "FROZENVAR", "LTLSPEC", "SPEC", "CTLSPEC",
                     "INVARSPEC", "JUSTICE", "FAIRNESS", "COMPASSION",
                     "MODULE"}

_UNSUPPORTED_WORDS = {"mod", "union", "in", "word", "process", "init_", "A", "E"}

# Temporal vocabulary for formula mode. Past-time and bounded/release
# operators are recognized so they can be rejected with a precise error.
_TEMPORAL_UNARY = {"X", "G", "F"}
_REJECTED_TEMPORAL = {"H", "O", "S", "Y", "Z", "T", "V", "R", "W", "M"}

_BIN_LEVELS = {
    "<->": 0, "->": 1,
    "|": 2, "xor": 2,
    "&": 3,
    "U": 4,
    "=": 5, "!=": 5, "<": 5, ">": 5, "<=": 5, ">=": 5,
    "+": 6, "-": 6,
    "*": 7, "/": 7,
}
_RIGHT_ASSOC = {"->", "U"}


class Token:
    __slots__ = ("kind", "value", "line", "col")

    def __init__(self, kind, value, line, col):
        self.kind = kind      # "num" | "ident" | "op" | "eof"
        self.value = value
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.value!r}@{self.line}:{self.col})"


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if not m:
            raise ParseError(f"unexpected character {text[i]!r}",
                             line=line, column=col)
        lexeme = m.group(0)
        if m.lastgroup not in ("ws", "comment"):
            tokens.append(Token(m.lastgroup, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        i = m.end()
    tokens.append(Token("eof", "<eof>", line, col))
    return tokens


class _Parser:
    def __init__(self, text, formula_mode=False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.formula_mode = formula_mode

    def peek(self, ahead=0):
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at(self, value):
        return self.peek().value == value

    def accept(self, value):
        if self.at(value):
            return self.advance()
        return None

    def expect(self, value):
        tok = self.peek()
        if tok.value != value:
            raise ParseError(f"unexpected {tok.value!r}", line=tok.line,
                             column=tok.col, expected=[value])
        return self.advance()

    def expect_ident(self, what="identifier"):
        tok = self.peek()
        if tok.kind != "ident":
            raise ParseError(f"unexpected {tok.value!r}", line=tok.line,
                             column=tok.col, expected=[what])
        return self.advance()

    # --- expressions ----------------------------------------------------

    def parse_expr(self, min_level=0) -> Expr:
        left = self.parse_unary()
        while True:
            tok = self.peek()
            op = tok.value
            if self.formula_mode and tok.kind == "ident" \
                    and op in _REJECTED_TEMPORAL:
                raise UnsupportedOperatorError(
                    f"operator {op} is not supported (at {tok.line}:{tok.col})")
            if op == "U" and not self.formula_mode:
                break
            if op not in _BIN_LEVELS:
                break
            level = _BIN_LEVELS[op]
            if level < min_level:
                break
            self.advance()
            nxt = level if op in _RIGHT_ASSOC else level + 1
            right = self.parse_expr(nxt)
            pos = (tok.line, tok.col)
            if op == "U":
                left = TemporalBinary("U", left, right, pos=pos)
            else:
                left = Binary(op, left, right, pos=pos)
        return left

    def parse_unary(self) -> Expr:
        tok = self.peek()
        pos = (tok.line, tok.col)
        if self.at("!"):
            self.advance()
            return Unary("!", self.parse_unary(), pos=pos)
        if self.at("-"):
            self.advance()
            operand = self.parse_unary()
            if isinstance(operand, IntLit):
                return IntLit(-operand.value, pos=pos)
            return Unary("-", operand, pos=pos)
        if self.formula_mode and tok.kind == "ident":
            if tok.value in _TEMPORAL_UNARY:
                self.advance()
                if self.at("["):
                    raise UnsupportedOperatorError(
                        f"bounded operator {tok.value}[...] is not supported "
                        f"(at {tok.line}:{tok.col})")
                return TemporalUnary(tok.value, self.parse_unary(), pos=pos)
            if tok.value in _REJECTED_TEMPORAL:
                raise UnsupportedOperatorError(
                    f"operator {tok.value} is not supported "
                    f"(at {tok.line}:{tok.col})")
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.peek()
        pos = (tok.line, tok.col)
        if self.at("("):
            self.advance()
            inner = self.parse_expr(0)
            self.expect(")")
            return inner
        if self.at("{"):
            raise UnsupportedFeatureError(
                "set notation is not supported: assignments must be deterministic",
                rule="deterministic-assignments", line=tok.line, column=tok.col)
        if tok.kind == "num":
            self.advance()
            return IntLit(int(tok.value), pos=pos)
        if tok.kind == "ident":
            name = tok.value
            if name == "TRUE":
                self.advance()
                return BoolLit(True, pos=pos)
            if name == "FALSE":
                self.advance()
                return BoolLit(False, pos=pos)
            if name in ("mod", "union", "in"):
                raise UnsupportedFeatureError(
                    f"operator {name!r} is outside the supported subset",
                    rule="operator-subset", line=tok.line, column=tok.col)
            if name == "next":
                self.advance()
                self.expect("(")
                ref = self.expect_ident("variable name")
                self.expect(")")
                return NextRef(ref.value, pos=pos)
            if name == "case":
                return self.parse_case()
            if name == "count":
                self.advance()
                self.expect("(")
                args = [self.parse_expr(0)]
                while self.accept(","):
                    args.append(self.parse_expr(0))
                self.expect(")")
                return Count(tuple(args), pos=pos)
            self.advance()
            if self.at("("):
                raise ParseError(f"{name!r} is not a function", line=tok.line,
                                 column=tok.col)
            return VarRef(name, pos=pos)
        raise ParseError(f"unexpected {tok.value!r}", line=tok.line,
                         column=tok.col, expected=["expression"])

    def parse_case(self) -> Expr:
        tok = self.expect("case")
        branches = []
        while not self.at("esac"):
            cond = self.parse_expr(0)
            self.expect(":")
            result = self.parse_expr(0)
            self.expect(";")
            branches.append((cond, result))
        self.expect("esac")
        if not branches:
            raise ParseError("empty case expression", line=tok.line, column=tok.col)
        if branches[-1][0] != BoolLit(True):
            raise UnsupportedFeatureError(
                "case chain must end with a TRUE-guarded branch",
                rule="case-exhaustive", line=tok.line, column=tok.col)
        return Case(tuple(branches), pos=(tok.line, tok.col))

    # --- type annotations ------------------------------------------------

    def parse_kind(self) -> ValueKind:
        tok = self.peek()
        if self.accept("boolean"):
            return BOOLEAN
        neg = bool(self.accept("-"))
        if self.peek().kind == "num":
            lo = int(self.advance().value) * (-1 if neg else 1)
            self.expect("..")
            neg2 = bool(self.accept("-"))
            hi_tok = self.peek()
            if hi_tok.kind != "num":
                raise ParseError("expected integer upper bound",
                                 line=hi_tok.line, column=hi_tok.col)
            self.advance()
            hi = int(hi_tok.value) * (-1 if neg2 else 1)
            if lo > hi:
                raise ParseError(f"empty range {lo}..{hi}",
                                 line=tok.line, column=tok.col)
            return int_range(lo, hi)
        raise UnsupportedFeatureError(
            f"unsupported type at {tok.line}:{tok.col}: only boolean and "
            "integer intervals (start..end) are allowed", rule="scalar-types",
            line=tok.line, column=tok.col)


def parse_ltl(text: str, variables=None) -> FormulaTree:
    """Parse an LTL formula; atoms must reference declared variables.

    Standard precedence: unary operators bind tightest, then U, then
    conjunction, disjunction, implication and equivalence.
    """
    p = _Parser(text, formula_mode=True)
    root = p.parse_expr(0)
    tok = p.peek()
    if tok.kind != "eof":
        raise ParseError(f"trailing input {tok.value!r}", line=tok.line,
                         column=tok.col)
    tree = FormulaTree(root)
    for node in tree.nodes:
        if isinstance(node, NextRef):
            raise UnsupportedOperatorError(
                "next() is not an LTL operator; use X")
        if isinstance(node, (Case, Count)) and contains_temporal(node):
            raise UnsupportedOperatorError(
                "temporal operators inside case/count atoms are not supported")
    if variables is not None:
        known = set(variables)
        for node in tree.nodes:
            if isinstance(node, VarRef) and node.name not in known:
                raise UnknownVariableError(
                    f"formula references undeclared variable {node.name!r}")
    return tree


_RESTRICTIONS = {
    "INIT": "INIT declarations are not allowed: variables must be assigned "
            "with init() and next()",
    "TRANS": "TRANS declarations are not allowed: variables must be assigned "
             "with init() and next()",
    "INVAR": "INVAR declarations are not allowed",
    "FROZENVAR": "FROZENVAR declarations are not allowed",
    "JUSTICE": "fairness declarations are not allowed",
    "FAIRNESS": "fairness declarations are not allowed",
    "COMPASSION": "fairness declarations are not allowed",
    "SPEC": "CTL specifications are not supported",
    "CTLSPEC": "CTL specifications are not supported",
    "INVARSPEC": "invariant specifications are not supported",
}


def parse_model(text: str) -> SmvModel:
    """Parse the restricted model text into modules rooted at main."""
    p = _Parser(text)
    modules = {}
    specs = []
    while not p.at("<eof>") and p.peek().kind != "eof":
        mod, mod_specs = _parse_module(p)
        if mod.name in modules:
            raise DuplicateNameError(f"module {mod.name!r} declared twice")
        modules[mod.name] = mod
        specs.extend(mod_specs)
    if "main" not in modules:
        raise ParseError("model has no main module")
    _check_restrictions(modules)
    model = SmvModel(modules)
    model.specs = specs
    return model


def _parse_module(p: _Parser):
    p.expect("MODULE")
    name_tok = p.expect_ident("module name")
    name = name_tok.value
    params = []
    if p.accept("("):
        while not p.at(")"):
            pn = p.expect_ident("parameter name")
            if not p.accept(":"):
                raise UnsupportedFeatureError(
                    f"parameter {pn.value!r} of module {name!r} lacks a type "
                    "annotation (varName : type)", rule="typed-params",
                    line=pn.line, column=pn.col)
            params.append((pn.value, p.parse_kind()))
            if not p.accept(","):
                break
        p.expect(")")

    var_kinds = {}
    instances = []
    defines = []
    inits = {}
    nexts = {}
    order = []
    specs = []

    while True:
        tok = p.peek()
        if tok.kind == "eof" or tok.value == "MODULE":
            break
        if tok.value in _RESTRICTIONS:
            raise UnsupportedFeatureError(_RESTRICTIONS[tok.value],
                                          rule=tok.value, line=tok.line,
                                          column=tok.col)
        if tok.value == "LTLSPEC":
            p.advance()
            fp = _Parser("", formula_mode=True)
            fp.tokens = p.tokens
            fp.pos = p.pos
            root = fp.parse_expr(0)
            p.pos = fp.pos
            p.accept(";")
            specs.append(root)
            continue
        if tok.value in ("VAR", "IVAR"):
            p.advance()
            while p.peek().kind == "ident" and \
                    p.peek().value not in _SECTION_KEYWORDS and \
                    p.peek(1).value == ":":
                vn = p.expect_ident("variable name")
                p.expect(":")
                nxt = p.peek()
                if nxt.kind == "ident" and nxt.value not in ("boolean",):
                    mod_name = p.advance().value
                    args = []
                    if p.accept("("):
                        while not p.at(")"):
                            args.append(p.parse_expr(0))
                            if not p.accept(","):
                                break
                        p.expect(")")
                    instances.append(SmvInstance(vn.value, mod_name, args))
                else:
                    kind = p.parse_kind()
                    if vn.value in var_kinds:
                        raise DuplicateNameError(
                            f"variable {vn.value!r} declared twice in {name!r}")
                    var_kinds[vn.value] = kind
                    order.append(vn.value)
                p.expect(";")
            continue
        if tok.value == "ASSIGN":
            p.advance()
            while p.peek().value in ("init", "next"):
                which = p.advance().value
                p.expect("(")
                vn = p.expect_ident("variable name")
                p.expect(")")
                p.expect(":=")
                expr = p.parse_expr(0)
                p.expect(";")
                if vn.value not in var_kinds:
                    raise UnknownVariableError(
                        f"assignment to undeclared variable {vn.value!r} "
                        f"in module {name!r}")
                store = inits if which == "init" else nexts
                if vn.value in store:
                    raise DuplicateNameError(
                        f"{which}({vn.value}) assigned twice in {name!r}")
                store[vn.value] = expr
            continue
        if tok.value == "DEFINE":
            p.advance()
            while p.peek().kind == "ident" and \
                    p.peek().value not in _SECTION_KEYWORDS and \
                    p.peek(1).value == ":=":
                dn = p.expect_ident("define name")
                p.expect(":=")
                expr = p.parse_expr(0)
                p.expect(";")
                if any(n == dn.value for n, _ in defines):
                    raise DuplicateNameError(
                        f"define {dn.value!r} declared twice in {name!r}")
                defines.append((dn.value, expr))
            continue
        raise ParseError(f"unexpected {tok.value!r}", line=tok.line,
                         column=tok.col,
                         expected=["VAR", "ASSIGN", "DEFINE", "MODULE"])

    variables = [SmvVar(n, var_kinds[n], inits.get(n), nexts.get(n))
                 for n in order]
    names = [n for n, _ in params] + order + [i.name for i in instances] \
        + [n for n, _ in defines]
    dup = {n for n in names if names.count(n) > 1}
    if dup:
        raise DuplicateNameError(
            f"name {sorted(dup)[0]!r} declared twice in module {name!r}")
    return SmvModule(name, params, variables, defines, instances), specs


def _check_restrictions(modules):
    main = modules["main"]
    if main.params:
        raise UnsupportedFeatureError(
            "main must not take parameters", rule="main-shape")
    for v in main.vars:
        if v.init is not None or v.next is not None:
            raise UnsupportedFeatureError(
                "main is restricted to input variable declarations and "
                f"module instances; {v.name!r} has assignments",
                rule="main-shape")
    if main.defines:
        raise UnsupportedFeatureError(
            "main is restricted to input variable declarations and module "
            "instances; DEFINE is not allowed there", rule="main-shape")
    for mod in modules.values():
        if mod.name == "main":
            continue
        if mod.instances:
            raise UnsupportedFeatureError(
                f"module {mod.name!r} declares an instance; instances are "
                "allowed only in main (every variable of a non-main module "
                "must carry init and next)", rule="main-shape")
        for v in mod.vars:
            if v.init is None or v.next is None:
                raise UnsupportedFeatureError(
                    f"variable {v.name!r} of module {mod.name!r} must be "
                    "declared with both init and next", rule="init-next")
            if contains_temporal(v.init) or contains_temporal(v.next):
                raise UnsupportedFeatureError(
                    "temporal operators cannot appear in assignments",
                    rule="operator-subset")
            if _contains_next(v.init):
                raise UnsupportedFeatureError(
                    f"init({v.name}) must not use the next operator",
                    rule="init-next")
        for dn, expr in mod.defines:
            if _contains_next(expr):
                raise UnsupportedFeatureError(
                    f"DEFINE {dn!r} is not allowed to use the next operator",
                    rule="define-no-next")


def _contains_next(expr):
    from .syntax import children
    if isinstance(expr, NextRef):
        return True
    return any(_contains_next(c) for c in children(expr))
