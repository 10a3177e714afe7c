"""Turn a problem into a polynomial system by matching series coefficients."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import lcm

from .errors import UnreliableMatch
from .exact import Polynomial, RationalFunction
from .model.ast import (Const, Deriv, Expr, FuncRef, Negate, Param, Power,
                        Product, Sum)
from .model.problem import ProblemSpec
from .series import TotalDegree, TruncSeries, graded_key, monomials_upto


def evaluate(expr: Expr, env: dict, vars: tuple, bound: int) -> TruncSeries:
    """Evaluate an expression tree on series, truncating products at ``bound``."""
    match expr:
        case Const(value=v):
            return TruncSeries.constant(vars, v)
        case Param(name=n):
            return TruncSeries.constant(vars, RationalFunction.symbol(n))
        case FuncRef(name=n):
            return env[n]
        case Deriv(child=c, var=v, order=k):
            return evaluate(c, env, vars, bound).diff(v, k)
        case Negate(child=c):
            return -evaluate(c, env, vars, bound)
        case Sum(children=cs):
            return reduce(lambda a, b: a + b, (evaluate(c, env, vars, bound) for c in cs))
        case Product(children=cs):
            return reduce(lambda a, b: a.mul(b, bound), (evaluate(c, env, vars, bound) for c in cs))
        case Power(child=c, exponent=n):
            base = evaluate(c, env, vars, bound)
            out = base
            for _ in range(n - 1):
                out = out.mul(base, bound)
            return out
    raise TypeError(f"not an expression node: {expr!r}")


def product_bound(p: ProblemSpec) -> int:
    return max(u.support.max_degree(len(p.vars)) for u in p.unknowns)


def match_monomials(p: ProblemSpec) -> list:
    """Monomials whose coefficients are matched, in graded order.

    Without an explicit match statement the bound is the smallest ansatz
    degree minus the highest derivative order.
    """
    nv = len(p.vars)
    m = p.match
    if m is None:
        reliable = p.reliable_degree()
        if reliable is None:
            reliable = min(u.support.max_degree(nv) for u in p.unknowns) - p.max_derivative_order()
        return monomials_upto(nv, reliable)
    if isinstance(m, TotalDegree):
        reliable = p.reliable_degree()
        if reliable is not None and m.degree > reliable:
            raise UnreliableMatch(m.degree, reliable)
        return monomials_upto(nv, m.degree)
    return m.monomials(nv)


@dataclass(frozen=True)
class AlgEquation:
    equation: int
    monomial: tuple
    poly: Polynomial

    def label(self) -> str:
        return f"E{self.equation}{list(self.monomial)}"


@dataclass
class AlgSystem:
    equations: list
    unknowns: list
    seeds: list
    params: list
    sources: dict = field(default_factory=dict)  # symbol -> (function, exponents)
    trivial: list = field(default_factory=list)  # (equation, monomial) matched identically

    @property
    def knowns(self) -> list:
        return list(self.params) + list(self.seeds)

    def classify(self) -> "Classification":
        return classify(self)


def _clear(c: RationalFunction) -> Polynomial:
    """Multiply out constant denominators; integer coefficients with gcd 1."""
    if not c.den.is_constant():
        # coefficients are polynomial in the symbols; keep the numerator
        return c.num
    num = c.num
    dens = [v.denominator for _, v in num.items()]
    scale = lcm(*dens) if dens else 1
    return num.scale(scale) if scale != 1 else num


def expand_pde(p: ProblemSpec) -> AlgSystem:
    """Substitute the ansatz and collect one polynomial equation per matched monomial."""
    env = p.ansatz_series()
    bound = product_bound(p)
    monos = match_monomials(p)
    equations = []
    trivial = []
    for i, eq in enumerate(p.equations):
        s = evaluate(eq, env, p.vars, bound)
        for m in monos:
            c = s.coefficient(m)
            if c.is_zero():
                trivial.append((i, m))
                continue
            equations.append(AlgEquation(i, tuple(m), _clear(c)))
    seeds = set(p.seed_symbols())
    coeffs = p.coefficient_symbols()
    sources = {name: (fn, e) for name, fn, e in coeffs}
    unknowns = [name for name, _, _ in coeffs if name not in seeds]
    return AlgSystem(equations, unknowns, p.seed_symbols(), list(p.params), sources, trivial)


@dataclass(frozen=True)
class Classification:
    equations: int
    unknowns: int
    seeds: int
    params: int
    status: str

    def to_text(self) -> str:
        return (f"{self.equations} equations, {self.unknowns} unknowns, "
                f"{self.seeds} seeds, {self.params} parameters: {self.status}")


def classify(system: AlgSystem) -> Classification:
    ne, nu = len(system.equations), len(system.unknowns)
    if ne == 0 and nu == 0:
        status = "trivially determined"
    elif ne == nu:
        status = "square"
    elif ne < nu:
        status = "underdetermined"
    else:
        status = "overdetermined"
    return Classification(ne, nu, len(system.seeds), len(system.params), status)


def sort_equations(equations) -> list:
    return sorted(equations, key=lambda e: (e.equation, graded_key(e.monomial)))


__all__ = ["AlgEquation", "AlgSystem", "Classification", "classify", "evaluate",
           "expand_pde", "match_monomials", "product_bound"]
