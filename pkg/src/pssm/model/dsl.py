"""Line-oriented problem language: parser and printer.

A problem file is a sequence of statements, one per line; ``#`` starts a
comment::

    problem kdv
    vars x, t
    params k, lambda
    unknown U(x, t) alias a
    eq dt(U) + dx(dx(dx(U))) + 6*U*dx(U) = 0
    reduce z = k*x - lambda*t with c = lambda/k
    ansatz U: total_degree 8
    seeds U[0] U[1] U[2]
    match total_degree 5

Derivatives are written ``d<var>(...)``.  Division is only allowed by
numeric constants.  Declarations are collected before equations are
resolved, so statement order is free except that ``ansatz``, ``seeds`` and
``match`` always refer to the variables left after any reduction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import (BadDerivative, ModelError, ParseError, SeedError,
                      UnknownFunction, UnknownIdentifier)
from ..series import Explicit, Parity, TotalDegree, graded_key
from .ast import (Const, Deriv, Expr, FuncRef, Negate, Param, Power, Product,
                  Sum, canon, contains_function)
from .problem import ProblemSpec, Unknown, WaveReduction

_NAME = r"[A-Za-z][A-Za-z0-9_]*"
_TOKEN_RE = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|(" + _NAME + r")|(.))")


@dataclass
class _Tok:
    kind: str
    value: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            break
        pos = m.end()
        num, name, op = m.groups()
        if num is None and name is None and op is None:
            break
        start = col0 + m.start(m.lastindex)
        if num is not None:
            out.append(_Tok("num", num, start))
        elif name is not None:
            out.append(_Tok("name", name, start))
        elif op in "+-*/^()":
            out.append(_Tok("op", op, start))
        elif not op.isspace():
            raise ParseError(f"unexpected character {op!r}", line, start)
    out.append(_Tok("end", "", col0 + len(text)))
    return out


class _ExprParser:
    """Recursive descent over: sum := term (('+'|'-') term)*, with ``^`` binding tightest."""

    def __init__(self, text, line, col0, vars, params, functions):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.vars = vars
        self.params = params
        self.functions = functions
        self.in_deriv = 0

    def error(self, cls, message, tok=None):
        tok = tok or self.toks[self.i]
        return cls(message, self.line, tok.col)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok.value != value or tok.kind == "end":
            raise self.error(ParseError, f"expected {value!r}", tok)
        return tok

    def parse(self) -> Expr:
        if self.peek().kind == "end":
            raise self.error(ParseError, "empty expression")
        e = self.sum()
        if self.peek().kind != "end":
            raise self.error(ParseError, f"unexpected {self.peek().value!r}")
        return e

    def sum(self):
        terms = [self.term()]
        while self.peek().kind == "op" and self.peek().value in "+-":
            op = self.take().value
            t = self.term()
            terms.append(t if op == "+" else Negate(t))
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self):
        factors = [self.unary()]
        while self.peek().kind == "op" and self.peek().value in "*/":
            op = self.take().value
            tok = self.peek()
            f = self.unary()
            if op == "/":
                value = _constant_value(canon(f))
                if value is None:
                    raise self.error(ParseError, "division is only allowed by numeric constants", tok)
                if value == 0:
                    raise self.error(ParseError, "division by zero", tok)
                f = Const(1 / value)
            factors.append(f)
        return factors[0] if len(factors) == 1 else Product(tuple(factors))

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.value in "+-":
            self.take()
            inner = self.unary()
            return inner if tok.value == "+" else Negate(inner)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().kind == "op" and self.peek().value == "^":
            self.take()
            tok = self.take()
            if tok.kind != "num" or not tok.value.isdigit():
                raise self.error(ParseError, "exponent must be a nonnegative integer", tok)
            return Power(base, int(tok.value))
        return base

    def atom(self):
        tok = self.take()
        if tok.kind == "num":
            return Const(Fraction(tok.value))
        if tok.kind == "op" and tok.value == "(":
            e = self.sum()
            self.expect(")")
            return e
        if tok.kind == "name":
            if self.peek().kind == "op" and self.peek().value == "(":
                return self.call(tok)
            if tok.value in self.params:
                return Param(tok.value)
            if tok.value in self.functions:
                return FuncRef(tok.value)
            if tok.value in self.vars:
                raise self.error(UnknownIdentifier,
                                 f"independent variable {tok.value!r} cannot appear as a value", tok)
            if self.in_deriv:
                # derivatives only act on unknown functions
                raise self.error(UnknownFunction, f"unknown function {tok.value!r}", tok)
            raise self.error(UnknownIdentifier, f"unknown identifier {tok.value!r}", tok)
        if tok.kind == "end":
            raise self.error(ParseError, "unexpected end of expression", tok)
        raise self.error(ParseError, f"unexpected {tok.value!r}", tok)

    def call(self, tok):
        name = tok.value
        self.take()
        is_deriv = name.startswith("d") and len(name) > 1
        self.in_deriv += is_deriv
        inner = self.sum()
        self.in_deriv -= is_deriv
        self.expect(")")
        if is_deriv:
            var = name[1:]
            if var not in self.vars:
                raise self.error(BadDerivative, f"derivative with respect to unknown variable {var!r}", tok)
            if not contains_function(inner):
                raise self.error(BadDerivative, "derivative of an expression without unknown functions", tok)
            return Deriv(inner, var, 1)
        if name in self.functions:
            raise self.error(ParseError, f"{name!r} takes no arguments inside equations", tok)
        raise self.error(UnknownFunction, f"unknown function {name!r}", tok)


def _constant_value(e: Expr):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Negate) and isinstance(e.child, Const):
        return -e.child.value
    return None


def parse_expr(text: str, vars=(), params=(), functions=(), line: int = 1, column: int = 1) -> Expr:
    """Parse an expression into canonical form."""
    return canon(_ExprParser(text, line, column, set(vars), set(params), set(functions)).parse())


# ---------------------------------------------------------------- printing

_SUM, _PRODUCT, _UNARY, _POWER, _ATOM = range(1, 6)


def _prec(e: Expr) -> int:
    match e:
        case Sum():
            return _SUM
        case Product():
            return _PRODUCT
        case Const(value=v):
            return _ATOM if v.denominator == 1 else _PRODUCT
        case Negate():
            return _UNARY
        case Power():
            return _POWER
    return _ATOM


def _wrap(e: Expr, minimum: int) -> str:
    text = format_expr(e)
    return f"({text})" if _prec(e) < minimum else text


def format_expr(e: Expr) -> str:
    """Print an expression so that parsing the text gives it back."""
    match e:
        case Const(value=v):
            return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
        case Param(name=n) | FuncRef(name=n):
            return n
        case Deriv(child=c, var=v, order=n):
            return f"d{v}(" * n + format_expr(c) + ")" * n
        case Negate(child=c):
            return "-" + _wrap(c, _PRODUCT)
        case Power(child=c, exponent=n):
            return f"{_wrap(c, _ATOM)}^{n}"
        case Product(children=cs):
            return "*".join(_wrap(c, _POWER) if i else _wrap(c, _PRODUCT) for i, c in enumerate(cs))
        case Sum(children=cs):
            parts = [format_expr(cs[0])]
            for c in cs[1:]:
                if isinstance(c, Negate):
                    parts.append(" - " + _wrap(c.child, _PRODUCT))
                else:
                    parts.append(" + " + _wrap(c, _PRODUCT))
            return "".join(parts)
    raise TypeError(f"not an expression node: {e!r}")


def _format_exponents(exps) -> str:
    return "[" + ", ".join("(" + ",".join(str(i) for i in e) + ")" for e in sorted(exps, key=graded_key)) + "]"


def _format_support(s) -> str:
    if isinstance(s, TotalDegree):
        return f"total_degree {s.degree}"
    if isinstance(s, Parity):
        return f"parity {','.join(s.parities)} total_degree {s.degree}"
    return "explicit " + _format_exponents(s.exponents)


def format_problem(p: ProblemSpec) -> str:
    """Render a resolved problem as DSL text (already reduced, so no ``reduce`` line)."""
    lines = [f"problem {p.name}", "vars " + ", ".join(p.vars)]
    if p.params:
        lines.append("params " + ", ".join(p.params))
    for u in p.unknowns:
        line = f"unknown {u.name}({', '.join(p.vars)})"
        if u.alias:
            line += f" alias {u.alias}"
        lines.append(line)
    for eq in p.equations:
        lines.append(f"eq {format_expr(eq)} = 0")
    for u in p.unknowns:
        lines.append(f"ansatz {u.name}: {_format_support(u.support)}")
    if p.seeds:
        lines.append("seeds " + " ".join(f"{fn}[{','.join(str(i) for i in e)}]" for fn, e in p.seeds))
    if p.match is not None:
        lines.append(f"match {_format_support(p.match)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- statements

_EXPONENT_LIST_RE = re.compile(r"\(\s*(\d+(?:\s*,\s*\d+)*)\s*\)")
_SEED_RE = re.compile(r"(" + _NAME + r")\[\s*(\d+(?:\s*,\s*\d+)*)\s*\]")
_REDUCE_RE = re.compile(
    r"(?P<z>{n})\s*=\s*(?P<k>{n})\s*\*\s*(?P<x>{n})\s*-\s*(?P<lam>{n})\s*\*\s*(?P<t>{n})"
    r"\s+with\s+(?P<c>{n})\s*=\s*(?P<lam2>{n})\s*/\s*(?P<k2>{n})\s*\Z".format(n=_NAME)
)
_UNKNOWN_RE = re.compile(
    r"(?P<name>{n})\s*\((?P<args>[^)]*)\)\s*(?:alias\s+(?P<alias>{n}))?\s*\Z".format(n=_NAME)
)


@dataclass
class _Stmt:
    keyword: str
    body: str
    line: int
    col: int  # 1-based column where body starts


def _split_statements(text: str) -> list:
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        m = re.match(r"(\w+)\s*", stripped)
        if m is None:
            raise ParseError("expected a statement keyword", lineno, indent + 1)
        out.append(_Stmt(m.group(1), stripped[m.end():], lineno, indent + m.end() + 1))
    return out


def _name_list(stmt: _Stmt) -> tuple:
    names = [n for n in re.split(r"[\s,]+", stmt.body.strip()) if n]
    for n in names:
        if not re.fullmatch(_NAME, n):
            raise ParseError(f"invalid name {n!r}", stmt.line, stmt.col)
    if len(set(names)) != len(names):
        raise ParseError("duplicate name", stmt.line, stmt.col)
    return tuple(names)


def _parse_exponent_list(text: str, stmt: _Stmt) -> list:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ParseError("expected a bracketed list of exponent tuples", stmt.line, stmt.col)
    inner = body[1:-1]
    found = list(_EXPONENT_LIST_RE.finditer(inner))
    leftover = _EXPONENT_LIST_RE.sub("", inner).replace(",", "").strip()
    if leftover:
        raise ParseError(f"cannot read exponent list near {leftover[:10]!r}", stmt.line, stmt.col)
    return [tuple(int(i) for i in m.group(1).split(",")) for m in found]


def _parse_support(text: str, stmt: _Stmt, nvars: int):
    body = text.strip()
    m = re.fullmatch(r"total_degree\s+(\d+)", body)
    if m:
        return TotalDegree(int(m.group(1)))
    m = re.fullmatch(r"parity\s+([a-z,\s]+?)\s+total_degree\s+(\d+)", body)
    if m:
        pars = tuple(p for p in re.split(r"[\s,]+", m.group(1)) if p)
        if len(pars) != nvars:
            raise ParseError(f"parity needs one entry per variable ({nvars})", stmt.line, stmt.col)
        try:
            return Parity(pars, int(m.group(2)))
        except ValueError as exc:
            raise ParseError(str(exc), stmt.line, stmt.col) from None
    if body.startswith("explicit"):
        exps = _parse_exponent_list(body[len("explicit"):], stmt)
        if any(len(e) != nvars for e in exps):
            raise ParseError(f"exponent tuples need {nvars} entries", stmt.line, stmt.col)
        return Explicit(exps)
    raise ParseError("expected 'total_degree N', 'parity ... total_degree N' or 'explicit [...]'",
                     stmt.line, stmt.col)


def parse_seeds(text: str) -> list:
    """Seed list such as ``U[0] U[1]`` or ``U[0,1], V[2,0]``."""
    stmt = _Stmt("seeds", text, 1, 1)
    found = list(_SEED_RE.finditer(text))
    if not found or _SEED_RE.sub("", text).replace(",", " ").strip():
        raise ParseError("expected seeds like F[0] or F[1,2]", 1, stmt.col)
    return [(m.group(1), tuple(int(i) for i in m.group(2).split(","))) for m in found]


def parse_support(text: str, nvars: int):
    """Support text as used by ``ansatz`` and ``match`` statements."""
    return _parse_support(text, _Stmt("match", text, 1, 1), nvars)


def parse_problem(text: str) -> ProblemSpec:
    """Parse and resolve DSL text into a :class:`ProblemSpec`."""
    from .wave import reduce_equations

    stmts = _split_statements(text)
    name = None
    vars: tuple = ()
    params: tuple = ()
    declared: list = []
    eq_stmts, ansatz_stmts, seed_stmts, match_stmts, reduce_stmts = [], [], [], [], []
    for s in stmts:
        kw = s.keyword
        if kw == "problem":
            if not re.fullmatch(r"[A-Za-z0-9_\-]+", s.body.strip()):
                raise ParseError("problem name expected", s.line, s.col)
            name = s.body.strip()
        elif kw == "vars":
            vars = _name_list(s)
        elif kw == "params":
            params = _name_list(s)
        elif kw == "unknown":
            m = _UNKNOWN_RE.match(s.body.strip())
            if m is None:
                raise ParseError("expected 'unknown F(v1, ...) [alias a]'", s.line, s.col)
            args = tuple(a for a in re.split(r"[\s,]+", m.group("args")) if a)
            declared.append((m.group("name"), args, m.group("alias"), s))
        elif kw == "eq":
            eq_stmts.append(s)
        elif kw == "ansatz":
            ansatz_stmts.append(s)
        elif kw == "seeds":
            seed_stmts.append(s)
        elif kw == "match":
            match_stmts.append(s)
        elif kw == "reduce":
            reduce_stmts.append(s)
        else:
            raise ParseError(f"unknown statement {kw!r}", s.line, s.col - len(kw) - 1 if s.col > len(kw) else 1)

    if name is None:
        raise ModelError("missing 'problem' statement")
    if not vars:
        raise ModelError("missing 'vars' statement")
    if not declared:
        raise ModelError("no unknown functions declared")
    if not eq_stmts:
        raise ModelError("no equations")
    clash = set(vars) & set(params)
    if clash:
        raise ModelError(f"{sorted(clash)[0]!r} is declared both as variable and parameter")
    functions = []
    aliases = {}
    for fn, args, alias, s in declared:
        if args != vars:
            raise ParseError(f"unknown {fn} must depend on ({', '.join(vars)})", s.line, s.col)
        if fn in functions or fn in params or fn in vars:
            raise ParseError(f"name {fn!r} already in use", s.line, s.col)
        functions.append(fn)
        aliases[fn] = alias

    equations = []
    for s in eq_stmts:
        body = s.body
        if body.count("=") != 1:
            raise ParseError("an equation needs exactly one '='", s.line, s.col)
        lhs_text, rhs_text = body.split("=")
        lhs = parse_expr(lhs_text, vars, params, functions, s.line, s.col)
        rhs = parse_expr(rhs_text, vars, params, functions, s.line, s.col + len(lhs_text) + 1)
        equations.append(canon(Sum((lhs, Negate(rhs)))))

    reduction = None
    if len(reduce_stmts) > 1:
        s = reduce_stmts[1]
        raise ParseError("only one reduce statement is allowed", s.line, s.col)
    if reduce_stmts:
        s = reduce_stmts[0]
        m = _REDUCE_RE.match(s.body.strip())
        if m is None:
            raise ParseError("expected 'reduce z = k*x - lambda*t with c = lambda/k'", s.line, s.col)
        if m.group("lam2") != m.group("lam") or m.group("k2") != m.group("k"):
            raise ParseError("phase speed must be defined as speed/wavenumber", s.line, s.col)
        reduction = WaveReduction(m.group("z"), m.group("x"), m.group("t"), m.group("k"),
                                  m.group("lam"), m.group("c"))
        try:
            vars, params, equations = reduce_equations(vars, params, equations, reduction)
        except ModelError as exc:
            raise type(exc)(exc.message, s.line, s.col) from None

    unknowns = {}
    for s in ansatz_stmts:
        m = re.match(r"(" + _NAME + r")\s*:\s*(.*)\Z", s.body.strip())
        if m is None:
            raise ParseError("expected 'ansatz F: <support>'", s.line, s.col)
        fn = m.group(1)
        if fn not in functions:
            raise UnknownFunction(f"ansatz for undeclared function {fn!r}", s.line, s.col)
        if fn in unknowns:
            raise ParseError(f"second ansatz for {fn}", s.line, s.col)
        unknowns[fn] = Unknown(fn, _parse_support(m.group(2), s, len(vars)), aliases[fn])
    for fn in functions:
        if fn not in unknowns:
            raise ModelError(f"missing ansatz for {fn}")

    seeds = []
    for s in seed_stmts:
        body = s.body.strip()
        found = list(_SEED_RE.finditer(body))
        if _SEED_RE.sub("", body).strip():
            raise ParseError("expected seeds like F[0] or F[1,2]", s.line, s.col)
        for m in found:
            fn = m.group(1)
            e = tuple(int(i) for i in m.group(2).split(","))
            col = s.col + m.start()
            if fn not in unknowns:
                raise SeedError(f"seed for undeclared function {fn!r}", s.line, col)
            if len(e) != len(vars) or not unknowns[fn].support.admits(e):
                raise SeedError(f"{fn}{list(e)} is not an ansatz coefficient", s.line, col)
            if (fn, e) in seeds:
                raise SeedError(f"duplicate seed {fn}{list(e)}", s.line, col)
            seeds.append((fn, e))

    match = None
    if len(match_stmts) > 1:
        s = match_stmts[1]
        raise ParseError("only one match statement is allowed", s.line, s.col)
    if match_stmts:
        s = match_stmts[0]
        match = _parse_support(s.body, s, len(vars))

    return ProblemSpec(name, tuple(vars), tuple(params),
                       tuple(unknowns[fn] for fn in functions), tuple(equations),
                       tuple(seeds), match, reduction)
