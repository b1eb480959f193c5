"""Formula engine: parse, evaluate, differentiate, simplify, pretty-print.

Grammar (prec low to high): +/- < */ < unary minus < ^ (right-assoc), so
-x^2 parses as -(x^2) and 2^3^2 as 2^(3^2). `pi` is a reserved constant.
Known functions: sin, cos, tan, exp, ln, sqrt, abs.

Scalar evaluation is strict: any operation leaving its real domain raises
EvalDomainError naming the operation and value; non-finite results never
propagate silently. The numpy compilation path (compile_numpy) trades that
strictness for speed and yields NaN/inf instead, which grid consumers treat
as skipped cells.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvalDomainError, OrnataError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "sqrt", "abs")

_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


class UnboundVariableError(OrnataError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


def _finite(op: str, value: float, probe: float) -> float:
    if not math.isfinite(value):
        raise EvalDomainError(op, probe)
    return value


class Expr:
    """Base AST node. Subclasses implement eval/diff/simp/fmt."""

    def eval(self, env):
        raise NotImplementedError

    def diff(self, var):
        raise NotImplementedError

    def simp(self):
        return self

    def fmt(self):
        raise NotImplementedError

    def prec(self):
        return _PREC_ATOM

    def __repr__(self):
        return f"{type(self).__name__}({self.fmt()!r})"


@dataclass(frozen=True, repr=False)
class Num(Expr):
    value: float

    def eval(self, env):
        return self.value

    def diff(self, var):
        return Num(0.0)

    def fmt(self):
        v = self.value
        if v == int(v) and abs(v) < 1e16:
            return str(int(v))
        return repr(v)

    def prec(self):
        # a negative literal prints with a leading minus and re-parses as
        # unary minus, so it must parenthesize like one
        return _PREC_NEG if self.value < 0 else _PREC_ATOM


@dataclass(frozen=True, repr=False)
class Const(Expr):
    """Named constant. Only `pi` today."""

    name: str
    value: float

    def eval(self, env):
        return self.value

    def diff(self, var):
        return Num(0.0)

    def fmt(self):
        return self.name


PI = Const("pi", math.pi)


@dataclass(frozen=True, repr=False)
class Var(Expr):
    name: str

    def eval(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise UnboundVariableError(self.name) from None

    def diff(self, var):
        return Num(1.0) if self.name == var else Num(0.0)

    def fmt(self):
        return self.name


@dataclass(frozen=True, repr=False)
class Neg(Expr):
    arg: Expr

    def eval(self, env):
        return -self.arg.eval(env)

    def diff(self, var):
        return Neg(self.arg.diff(var))

    def simp(self):
        a = self.arg.simp()
        if isinstance(a, Neg):
            return a.arg
        if isinstance(a, Num):
            return Num(-a.value)
        return Neg(a)

    def fmt(self):
        return "-" + _child(self.arg, _PREC_NEG)

    def prec(self):
        return _PREC_NEG


class _Bin(Expr):
    op = "?"
    _prec = 0

    def __init__(self, left: Expr, right: Expr):
        self.left = left
        self.right = right

    def __eq__(self, other):
        return (
            type(other) is type(self)
            and other.left == self.left
            and other.right == self.right
        )

    def __hash__(self):
        return hash((type(self), self.left, self.right))

    def prec(self):
        return self._prec


class Add(_Bin):
    op = "+"
    _prec = _PREC_ADD

    def eval(self, env):
        a, b = self.left.eval(env), self.right.eval(env)
        return _finite("add", a + b, a)

    def diff(self, var):
        return Add(self.left.diff(var), self.right.diff(var))

    def simp(self):
        l, r = self.left.simp(), self.right.simp()
        if isinstance(l, Num) and l.value == 0:
            return r
        if isinstance(r, Num) and r.value == 0:
            return l
        return _fold(Add(l, r))

    def fmt(self):
        return f"{_child(self.left, _PREC_ADD)} + {_child(self.right, _PREC_ADD)}"


class Sub(_Bin):
    op = "-"
    _prec = _PREC_ADD

    def eval(self, env):
        a, b = self.left.eval(env), self.right.eval(env)
        return _finite("subtract", a - b, a)

    def diff(self, var):
        return Sub(self.left.diff(var), self.right.diff(var))

    def simp(self):
        l, r = self.left.simp(), self.right.simp()
        if isinstance(r, Num) and r.value == 0:
            return l
        if isinstance(l, Num) and l.value == 0:
            return Neg(r).simp()
        return _fold(Sub(l, r))

    def fmt(self):
        # right side needs parens at equal precedence: a - (b + c)
        return f"{_child(self.left, _PREC_ADD)} - {_child(self.right, _PREC_ADD + 1)}"


class Mul(_Bin):
    op = "*"
    _prec = _PREC_MUL

    def eval(self, env):
        a, b = self.left.eval(env), self.right.eval(env)
        return _finite("multiply", a * b, a)

    def diff(self, var):
        return Add(
            Mul(self.left.diff(var), self.right),
            Mul(self.left, self.right.diff(var)),
        )

    def simp(self):
        l, r = self.left.simp(), self.right.simp()
        for a, b in ((l, r), (r, l)):
            if isinstance(a, Num):
                if a.value == 0:
                    return Num(0.0)
                if a.value == 1:
                    return b
        return _fold(Mul(l, r))

    def fmt(self):
        return f"{_child(self.left, _PREC_MUL)} * {_child(self.right, _PREC_MUL)}"


class Div(_Bin):
    op = "/"
    _prec = _PREC_MUL

    def eval(self, env):
        a, b = self.left.eval(env), self.right.eval(env)
        if b == 0:
            raise EvalDomainError("divide", b)
        return _finite("divide", a / b, b)

    def diff(self, var):
        return Div(
            Sub(
                Mul(self.left.diff(var), self.right),
                Mul(self.left, self.right.diff(var)),
            ),
            Pow(self.right, Num(2.0)),
        )

    def simp(self):
        l, r = self.left.simp(), self.right.simp()
        if isinstance(r, Num) and r.value == 1:
            return l
        if isinstance(l, Num) and l.value == 0:
            return Num(0.0)
        return _fold(Div(l, r))

    def fmt(self):
        return f"{_child(self.left, _PREC_MUL)} / {_child(self.right, _PREC_MUL + 1)}"


class Pow(_Bin):
    op = "^"
    _prec = _PREC_POW

    def eval(self, env):
        a, b = self.left.eval(env), self.right.eval(env)
        if a == 0 and b < 0:
            raise EvalDomainError("pow", a)
        if a < 0 and b != int(b):
            raise EvalDomainError("pow", a)
        try:
            v = math.pow(a, b)
        except (OverflowError, ValueError):
            raise EvalDomainError("pow", a) from None
        return _finite("pow", v, a)

    def diff(self, var):
        u, v = self.left, self.right
        if var not in variables(v):
            # power rule, valid whenever the exponent is independent of var
            return Mul(Mul(v, Pow(u, Sub(v, Num(1.0)))), u.diff(var))
        # general case u^v = exp(v ln u)
        return Mul(
            Pow(u, v),
            Add(Mul(v.diff(var), Call("ln", u)), Div(Mul(v, u.diff(var)), u)),
        )

    def simp(self):
        l, r = self.left.simp(), self.right.simp()
        if isinstance(r, Num):
            if r.value == 1:
                return l
            if r.value == 0:
                return Num(1.0)
        if isinstance(l, Num) and l.value == 1:
            return Num(1.0)
        return _fold(Pow(l, r))

    def fmt(self):
        # left operand at higher precedence: (2^3)^2 keeps its parens
        return f"{_child(self.left, _PREC_POW + 1)}^{_child(self.right, _PREC_NEG)}"


@dataclass(frozen=True, repr=False)
class Call(Expr):
    fn: str
    arg: Expr

    def eval(self, env):
        x = self.arg.eval(env)
        fn = self.fn
        if fn == "sin":
            return math.sin(x)
        if fn == "cos":
            return math.cos(x)
        if fn == "tan":
            return _finite("tan", math.tan(x), x)
        if fn == "exp":
            try:
                return _finite("exp", math.exp(x), x)
            except OverflowError:
                raise EvalDomainError("exp", x) from None
        if fn == "ln":
            if x <= 0:
                raise EvalDomainError("ln", x)
            return math.log(x)
        if fn == "sqrt":
            if x < 0:
                raise EvalDomainError("sqrt", x)
            return math.sqrt(x)
        if fn == "abs":
            return abs(x)
        raise EvalDomainError(fn, x)

    def diff(self, var):
        u = self.arg
        du = u.diff(var)
        fn = self.fn
        if fn == "sin":
            inner = Call("cos", u)
        elif fn == "cos":
            inner = Neg(Call("sin", u))
        elif fn == "tan":
            inner = Div(Num(1.0), Pow(Call("cos", u), Num(2.0)))
        elif fn == "exp":
            inner = Call("exp", u)
        elif fn == "ln":
            inner = Div(Num(1.0), u)
        elif fn == "sqrt":
            inner = Div(Num(1.0), Mul(Num(2.0), Call("sqrt", u)))
        elif fn == "abs":
            # undefined at u=0; u/abs(u) raises there at evaluation time
            inner = Div(u, Call("abs", u))
        else:
            raise OrnataError(f"cannot differentiate {fn}")
        return Mul(inner, du)

    def simp(self):
        return _fold(Call(self.fn, self.arg.simp()))

    def fmt(self):
        return f"{self.fn}({self.arg.fmt()})"


def _child(node: Expr, min_prec: int) -> str:
    s = node.fmt()
    if node.prec() < min_prec:
        return f"({s})"
    return s


def _fold(node: Expr) -> Expr:
    """Fold a node whose children are all literals, keeping it when folding
    would raise or overflow."""
    kids = []
    if isinstance(node, _Bin):
        kids = [node.left, node.right]
    elif isinstance(node, Call):
        kids = [node.arg]
    if kids and all(isinstance(k, (Num, Const)) for k in kids):
        try:
            return Num(node.eval({}))
        except OrnataError:
            pass
    return node


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []  # (kind, value, byte_offset)
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:]
            stripped = rest.lstrip()
            if not stripped:
                break
            off = len(text[: pos + (len(rest) - len(stripped))].encode())
            raise ParseError(f"unexpected character {stripped[0]!r}", off)
        start = m.start(m.lastgroup)
        off = len(text[:start].encode())
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), off))
        pos = m.end()
    tokens.append(("end", "", len(text.encode())))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, value, off = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", off)
        self.next()

    def parse_expr(self):
        node = self.parse_term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.next()
                rhs = self.parse_term()
                node = Add(node, rhs) if value == "+" else Sub(node, rhs)
            else:
                return node

    def parse_term(self):
        node = self.parse_factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "*/":
                self.next()
                rhs = self.parse_factor()
                node = Mul(node, rhs) if value == "*" else Div(node, rhs)
            else:
                return node

    def parse_factor(self):
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.next()
            return Neg(self.parse_factor())
        return self.parse_power()

    def parse_power(self):
        base = self.parse_atom()
        kind, value, _ = self.peek()
        if kind == "op" and value == "^":
            self.next()
            return Pow(base, self.parse_factor())
        return base

    def parse_atom(self):
        kind, value, off = self.next()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if value == "pi":
                return PI
            nk, nv, _ = self.peek()
            if nk == "op" and nv == "(":
                if value not in FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", off)
                self.next()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(value, arg)
            return Var(value)
        if kind == "op" and value == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        raise ParseError(
            "unexpected end of formula" if kind == "end" else f"unexpected token {value!r}",
            off,
        )


def parse(text: str) -> Expr:
    """Parse formula text into an AST. Raises ParseError with a byte offset."""
    if not text.strip():
        raise ParseError("empty formula", 0)
    parser = _Parser(_tokenize(text))
    node = parser.parse_expr()
    kind, value, off = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected token {value!r}", off)
    return node


# ---------------------------------------------------------------------------
# module-level API over the node methods

def evaluate(expr: Expr, bindings: dict | None = None) -> float:
    return expr.eval(bindings or {})


def differentiate(expr: Expr, var: str) -> Expr:
    return expr.diff(var)


def simplify(expr: Expr) -> Expr:
    return expr.simp()


def pretty_print(expr: Expr) -> str:
    return expr.fmt()


def variables(expr: Expr) -> set:
    """Free variable names (pi excluded)."""
    out = set()
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, Neg):
            stack.append(node.arg)
        elif isinstance(node, _Bin):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Call):
            stack.append(node.arg)
    return out


# ---------------------------------------------------------------------------
# numpy compilation for grid evaluation

_NP_FN = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "ln": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}


def compile_numpy(expr: Expr, var_order: tuple[str, ...]):
    """Compile to a vectorized fn(*arrays) -> array.

    Out-of-domain points come back NaN/inf rather than raising; callers that
    need strict semantics use evaluate() pointwise.
    """

    def build(node):
        if isinstance(node, (Num, Const)):
            v = node.value
            return lambda args: v
        if isinstance(node, Var):
            try:
                idx = var_order.index(node.name)
            except ValueError:
                raise UnboundVariableError(node.name) from None
            return lambda args: args[idx]
        if isinstance(node, Neg):
            f = build(node.arg)
            return lambda args: -f(args)
        if isinstance(node, Call):
            f = build(node.arg)
            g = _NP_FN[node.fn]
            return lambda args: g(f(args))
        l, r = build(node.left), build(node.right)
        if isinstance(node, Add):
            return lambda args: l(args) + r(args)
        if isinstance(node, Sub):
            return lambda args: l(args) - r(args)
        if isinstance(node, Mul):
            return lambda args: l(args) * r(args)
        if isinstance(node, Div):
            return lambda args: np.divide(l(args), r(args))
        if isinstance(node, Pow):
            return lambda args: np.power(l(args), r(args))
        raise OrnataError(f"cannot compile {node!r}")

    f = build(expr)

    def fn(*arrays):
        args = [np.asarray(a, dtype=float) for a in arrays]
        with np.errstate(all="ignore"):
            out = np.asarray(f(args), dtype=float)
        if args and out.shape != args[0].shape:
            out = np.broadcast_to(out, np.broadcast(*args).shape).copy()
        return out

    return fn
