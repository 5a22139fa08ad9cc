"""Expression language for functions on K: grammar, parser, printer, evaluator.

Grammar (EBNF, whitespace between tokens is ignored)::

    expr     = term { ("+" | "-") term } ;
    term     = unary { ("*" | "/") unary } ;
    unary    = "-" unary | power ;
    power    = atom [ "^" exponent ] ;
    exponent = INT | "-" INT | "(" [ "-" ] INT ")" ;
    atom     = INT | LITERAL | IDENT | call | "(" expr ")" ;
    call     = "root" "(" INT "," expr ")"
             | "qpow" "(" INT "/" INT "," expr ")"
             | "henselroot" "(" INT ";" expr { "," expr } ")" ;
    LITERAL  = "[" digits "]" [ "e" [ "-" ] INT ] [ "~" [ "-" ] INT ] ;

``^`` takes only an integer exponent; fractional powers are written with
``qpow(a/b, e)``.  Identifiers other than the three function names are
variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DomainError,
    ExprSyntaxError,
    HypothesisViolated,
    NotInDomain,
    PadlabError,
)
from .field import parse_element

FUNCTIONS = ("root", "qpow", "henselroot")


# -- AST --------------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Lit:
    text: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int


@dataclass(frozen=True)
class Root:
    n: int
    arg: object


@dataclass(frozen=True)
class QPow:
    a: int
    b: int
    arg: object


@dataclass(frozen=True)
class HenselRoot:
    n: int
    coeffs: tuple


def Add(l, r):  # noqa: N802 - constructor-style helpers
    return Bin("+", l, r)


def Sub(l, r):  # noqa: N802
    return Bin("-", l, r)


def Mul(l, r):  # noqa: N802
    return Bin("*", l, r)


def Div(l, r):  # noqa: N802
    return Bin("/", l, r)


# -- lexer ------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r\n]+)"
    r"|(?P<LITERAL>\[[0-9:,\s]*\](?:e-?\d+)?(?:~-?\d+)?)"
    r"|(?P<INT>\d+)"
    r"|(?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),;])"
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text):
    toks = []
    pos, line, col = 0, 1, 1
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ExprSyntaxError(line, col, ["token"], repr(text[pos]))
        s = m.group(0)
        kind = m.lastgroup
        if kind != "ws":
            if kind == "op":
                kind = s
            elif kind == "IDENT" and s in FUNCTIONS:
                kind = s
            toks.append(Token(kind, s, line, col))
        for ch in s:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    toks.append(Token("EOF", "", line, col))
    return toks


def _show(kind):
    return kind if kind.isupper() else f"'{kind}'"


class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0
        self.expected = set()

    @property
    def tok(self):
        return self.toks[self.i]

    def at(self, kind):
        self.expected.add(kind)
        return self.tok.kind == kind

    def advance(self):
        t = self.tok
        self.i += 1
        self.expected = set()
        return t

    def expect(self, kind):
        if not self.at(kind):
            self.fail()
        return self.advance()

    def fail(self):
        t = self.tok
        found = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ExprSyntaxError(t.line, t.col, [_show(k) for k in self.expected], found)

    def parse(self):
        e = self.expr()
        self.expect("EOF")
        return e

    def expr(self):
        e = self.term()
        while True:
            if self.at("+"):
                self.advance()
                e = Bin("+", e, self.term())
            elif self.at("-"):
                self.advance()
                e = Bin("-", e, self.term())
            else:
                return e

    def term(self):
        e = self.unary()
        while True:
            if self.at("*"):
                self.advance()
                e = Bin("*", e, self.unary())
            elif self.at("/"):
                self.advance()
                e = Bin("/", e, self.unary())
            else:
                return e

    def unary(self):
        if self.at("-"):
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.advance()
            return Pow(base, self.exponent())
        return base

    def exponent(self):
        if self.at("("):
            self.advance()
            n = self.signed_int()
            self.expect(")")
            return n
        return self.signed_int()

    def signed_int(self):
        sign = 1
        if self.at("-"):
            self.advance()
            sign = -1
        return sign * int(self.expect("INT").text)

    def atom(self):
        if self.at("INT"):
            return Num(int(self.advance().text))
        if self.at("LITERAL"):
            return Lit(re.sub(r"\s+", "", self.advance().text))
        if self.at("IDENT"):
            return Var(self.advance().text)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("root"):
            self.advance()
            self.expect("(")
            n = int(self.expect("INT").text)
            self.expect(",")
            e = self.expr()
            self.expect(")")
            return Root(n, e)
        if self.at("qpow"):
            self.advance()
            self.expect("(")
            a = self.signed_int()
            self.expect("/")
            b = int(self.expect("INT").text)
            self.expect(",")
            e = self.expr()
            self.expect(")")
            return QPow(a, b, e)
        if self.at("henselroot"):
            self.advance()
            self.expect("(")
            n = int(self.expect("INT").text)
            self.expect(";")
            coeffs = [self.expr()]
            while self.at(","):
                self.advance()
                coeffs.append(self.expr())
            self.expect(")")
            return HenselRoot(n, tuple(coeffs))
        self.fail()


def parse(text):
    """Parse an expression; raises :class:`ExprSyntaxError` with position and expected set."""
    return _Parser(text).parse()


# -- printer ----------------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}


def _level(e):
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return 3
    if isinstance(e, Pow):
        return 4
    return 5


def to_text(e):
    """Canonical text: no spaces, only the parentheses the grammar needs."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Lit):
        return e.text
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        inner = to_text(e.arg)
        return "-" + (f"({inner})" if _level(e.arg) < 3 else inner)
    if isinstance(e, Bin):
        L = _PREC[e.op]
        lt, rt = to_text(e.left), to_text(e.right)
        if _level(e.left) < L:
            lt = f"({lt})"
        if _level(e.right) <= L:
            rt = f"({rt})"
        return f"{lt}{e.op}{rt}"
    if isinstance(e, Pow):
        bt = to_text(e.base)
        if _level(e.base) < 5:
            bt = f"({bt})"
        return f"{bt}^{e.exp}"
    if isinstance(e, Root):
        return f"root({e.n},{to_text(e.arg)})"
    if isinstance(e, QPow):
        return f"qpow({e.a}/{e.b},{to_text(e.arg)})"
    if isinstance(e, HenselRoot):
        return f"henselroot({e.n};{','.join(to_text(c) for c in e.coeffs)})"
    raise TypeError(f"not an expression node: {e!r}")


def variables(e):
    out = set()

    def walk(n):
        if isinstance(n, Var):
            out.add(n.name)
        elif isinstance(n, Neg):
            walk(n.arg)
        elif isinstance(n, Bin):
            walk(n.left)
            walk(n.right)
        elif isinstance(n, (Pow,)):
            walk(n.base)
        elif isinstance(n, (Root, QPow)):
            walk(n.arg)
        elif isinstance(n, HenselRoot):
            for c in n.coeffs:
                walk(c)

    walk(e)
    return sorted(out)


# -- evaluation -------------------------------------------------------------------

@dataclass
class EvalResult:
    value: object
    precision: object
    ledger: list

    def to_json(self):
        from .field import INF
        return {"value": str(self.value),
                "precision": "inf" if self.precision == INF else self.precision,
                "ledger": self.ledger}


def evaluate(expr, assignment, ctx):
    """Evaluate ``expr`` in ``ctx``; returns value, its absolute precision and a ledger.

    The ledger has one entry per precision-sensitive node (division, root,
    qpow, henselroot) in evaluation order.
    """
    from .powers import build_qth_power_map, is_nth_power
    from .solvers import hensel_root_monic

    if isinstance(expr, str):
        expr = parse(expr)
    env = {k: ctx.element(v) for k, v in (assignment or {}).items()}
    ledger = []

    def note(node, value):
        from .field import INF
        ledger.append({"expr": to_text(node),
                       "precision": "inf" if value.prec == INF else value.prec,
                       "valuation": "inf" if value.val == INF else value.val})

    def ev(n):
        if isinstance(n, Num):
            return ctx.from_int(n.value)
        if isinstance(n, Lit):
            return parse_element(n.text, ctx)
        if isinstance(n, Var):
            if n.name not in env:
                raise DomainError(f"unassigned variable {n.name}", subexpr=n.name)
            return env[n.name]
        if isinstance(n, Neg):
            return -ev(n.arg)
        if isinstance(n, Bin):
            l, r = ev(n.left), ev(n.right)
            if n.op == "+":
                return l + r
            if n.op == "-":
                return l - r
            if n.op == "*":
                return l * r
            try:
                out = l / r
            except PadlabError as exc:
                exc.data.setdefault("subexpr", to_text(n))
                raise
            note(n, out)
            return out
        if isinstance(n, Pow):
            b = ev(n.base)
            try:
                return b ** n.exp
            except PadlabError as exc:
                exc.data.setdefault("subexpr", to_text(n))
                raise
        if isinstance(n, Root):
            x = ev(n.arg)
            ok, w = (False, None) if x.is_zero() else is_nth_power(x, n.n)
            if not ok:
                raise DomainError(f"{to_text(n.arg)} is not a {n.n}-th power", subexpr=to_text(n))
            note(n, w)
            return w
        if isinstance(n, QPow):
            x = ev(n.arg)
            qmap = build_qth_power_map(ctx, Fraction(n.a, n.b))
            try:
                out = qmap(x)
            except NotInDomain as exc:
                raise DomainError(str(exc), subexpr=to_text(n)) from None
            note(n, out)
            return out
        if isinstance(n, HenselRoot):
            if len(n.coeffs) != n.n:
                raise DomainError(f"henselroot({n.n};...) needs {n.n} coefficients",
                                  subexpr=to_text(n))
            coeffs = [ev(c) for c in n.coeffs]
            try:
                out = hensel_root_monic(coeffs).solution
            except HypothesisViolated as exc:
                raise DomainError(str(exc), subexpr=to_text(n)) from None
            note(n, out)
            return out
        raise TypeError(f"not an expression node: {n!r}")

    value = ev(expr)
    return EvalResult(value, value.prec, ledger)


def compile_function(expr, ctx, var="x"):
    """A one-variable callable for the numeric routines."""
    if isinstance(expr, str):
        expr = parse(expr)
    names = variables(expr)

    def f(x):
        if hasattr(x, "coords"):
            env = {n: c for n, c in zip(names, x.coords)}
        else:
            env = {var: x}
        return evaluate(expr, env, ctx).value

    return f


def check_ledger(expr, assignment, ctx, extra=4):
    """Recompute at precision N + extra; True when results agree at the reported precision."""
    lo = evaluate(expr, assignment, ctx)
    hi_ctx = ctx.with_precision(ctx.N + extra)
    hi_env = {k: hi_ctx.coerce(ctx.element(v)) for k, v in (assignment or {}).items()}
    hi = evaluate(expr, hi_env, hi_ctx)
    back = ctx.coerce(hi.value)
    return (lo.value - back).with_prec(lo.precision).is_zero(), lo, hi


# -- rational functions -----------------------------------------------------------

def _padd(a, b, ctx):
    n = max(len(a), len(b))
    z = ctx.zero()
    return [(a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)]


def _pmul(a, b, ctx):
    out = [ctx.zero()] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def to_rational(expr, ctx, var="x"):
    """(numerator, denominator) coefficient lists, little endian, for a rational expression in ``var``."""
    if isinstance(expr, str):
        expr = parse(expr)
    one = [ctx.one()]

    def rf(n):
        if isinstance(n, Num):
            return [ctx.from_int(n.value)], one
        if isinstance(n, Lit):
            return [parse_element(n.text, ctx)], one
        if isinstance(n, Var):
            if n.name != var:
                raise DomainError(f"unexpected variable {n.name}", subexpr=n.name)
            return [ctx.zero(), ctx.one()], one
        if isinstance(n, Neg):
            a, b = rf(n.arg)
            return [-c for c in a], b
        if isinstance(n, Bin):
            (a, b), (c, d) = rf(n.left), rf(n.right)
            if n.op == "+":
                return _padd(_pmul(a, d, ctx), _pmul(c, b, ctx), ctx), _pmul(b, d, ctx)
            if n.op == "-":
                return _padd(_pmul(a, d, ctx), [-x for x in _pmul(c, b, ctx)], ctx), _pmul(b, d, ctx)
            if n.op == "*":
                return _pmul(a, c, ctx), _pmul(b, d, ctx)
            return _pmul(a, d, ctx), _pmul(b, c, ctx)
        if isinstance(n, Pow):
            a, b = rf(n.base)
            if n.exp < 0:
                a, b = b, a
            pa, pb = one, one
            for _ in range(abs(n.exp)):
                pa, pb = _pmul(pa, a, ctx), _pmul(pb, b, ctx)
            return pa, pb
        raise DomainError(f"{to_text(n)} is not rational", subexpr=to_text(n))

    return rf(expr)
