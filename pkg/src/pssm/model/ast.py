"""PDE expression trees and their canonical simplification."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class FuncRef:
    name: str


@dataclass(frozen=True)
class Deriv:
    child: "Expr"
    var: str
    order: int = 1


@dataclass(frozen=True)
class Sum:
    children: tuple


@dataclass(frozen=True)
class Product:
    children: tuple


@dataclass(frozen=True)
class Power:
    child: "Expr"
    exponent: int


@dataclass(frozen=True)
class Negate:
    child: "Expr"


Expr = Union[Const, Param, FuncRef, Deriv, Sum, Product, Power, Negate]

ZERO = Const(Fraction(0))
ONE = Const(Fraction(1))


def contains_function(expr: Expr) -> bool:
    match expr:
        case FuncRef():
            return True
        case Const() | Param():
            return False
        case Deriv(child=c) | Power(child=c) | Negate(child=c):
            return contains_function(c)
        case Sum(children=cs) | Product(children=cs):
            return any(contains_function(c) for c in cs)
    raise TypeError(f"not an expression node: {expr!r}")


def functions_in(expr: Expr) -> set:
    match expr:
        case FuncRef(name=n):
            return {n}
        case Const() | Param():
            return set()
        case Deriv(child=c) | Power(child=c) | Negate(child=c):
            return functions_in(c)
        case Sum(children=cs) | Product(children=cs):
            return set().union(*(functions_in(c) for c in cs))
    raise TypeError(f"not an expression node: {expr!r}")


def params_in(expr: Expr) -> set:
    match expr:
        case Param(name=n):
            return {n}
        case Const() | FuncRef():
            return set()
        case Deriv(child=c) | Power(child=c) | Negate(child=c):
            return params_in(c)
        case Sum(children=cs) | Product(children=cs):
            return set().union(*(params_in(c) for c in cs))
    raise TypeError(f"not an expression node: {expr!r}")


def max_derivative_order(expr: Expr) -> int:
    """Largest total number of differentiations applied above any FuncRef."""
    match expr:
        case FuncRef():
            return 0
        case Const() | Param():
            return 0
        case Deriv(child=c, order=n):
            return n + max_derivative_order(c)
        case Power(child=c) | Negate(child=c):
            return max_derivative_order(c)
        case Sum(children=cs) | Product(children=cs):
            return max((max_derivative_order(c) for c in cs), default=0)
    raise TypeError(f"not an expression node: {expr!r}")


def _is_scalar(expr: Expr) -> bool:
    """True for factors that commute with differentiation."""
    match expr:
        case Const() | Param():
            return True
        case Power(child=Param()):
            return True
    return False


def canon(expr: Expr) -> Expr:
    """Canonical form used for structural equality and printing.

    Sums and products are flattened, numeric factors folded to the front,
    parameter powers merged, negation pulled to the outside, scalar factors
    pulled out of derivatives, and nested same-variable derivatives merged.
    """
    match expr:
        case Const(value=v):
            v = Fraction(v)
            return Negate(Const(-v)) if v < 0 else Const(v)
        case Param() | FuncRef():
            return expr
        case Negate(child=c):
            c = canon(c)
            if isinstance(c, Negate):
                return c.child
            if c == ZERO:
                return ZERO
            return Negate(c)
        case Deriv(child=c, var=v, order=n):
            return _canon_deriv(canon(c), v, n)
        case Power(child=c, exponent=n):
            return _canon_power(canon(c), n)
        case Sum(children=cs):
            return _canon_sum([canon(c) for c in cs])
        case Product(children=cs):
            return _canon_product([canon(c) for c in cs])
    raise TypeError(f"not an expression node: {expr!r}")


def _canon_deriv(c: Expr, var: str, n: int) -> Expr:
    if isinstance(c, Negate):
        return Negate(_canon_deriv(c.child, var, n))
    if isinstance(c, Product):
        scalars = [f for f in c.children if _is_scalar(f)]
        if scalars:
            rest = [f for f in c.children if not _is_scalar(f)]
            inner = _canon_product(rest) if rest else ONE
            return _canon_product(scalars + [_canon_deriv(inner, var, n)])
    if isinstance(c, Deriv) and c.var == var:
        return Deriv(c.child, var, c.order + n)
    if not contains_function(c):
        return ZERO
    return Deriv(c, var, n)


def _canon_power(c: Expr, n: int) -> Expr:
    if n == 0:
        return ONE
    if n == 1:
        return c
    if isinstance(c, Const):
        return Const(c.value ** n)
    if isinstance(c, Negate):
        inner = _canon_power(c.child, n)
        return inner if n % 2 == 0 else Negate(inner)
    if isinstance(c, Power):
        return Power(c.child, c.exponent * n)
    return Power(c, n)


def _canon_sum(children: list) -> Expr:
    flat = []
    total = Fraction(0)
    for c in children:
        if isinstance(c, Sum):
            flat.extend(c.children)
        elif isinstance(c, Negate) and isinstance(c.child, Sum):
            flat.extend(canon(Negate(x)) for x in c.child.children)
        else:
            flat.append(c)
    terms = []
    for c in flat:
        if isinstance(c, Const):
            total += c.value
        elif isinstance(c, Negate) and isinstance(c.child, Const):
            total -= c.child.value
        else:
            terms.append(c)
    if total:
        terms.append(canon(Const(total)))
    if not terms:
        return ZERO
    if len(terms) == 1:
        return terms[0]
    return Sum(tuple(terms))


def _canon_product(children: list) -> Expr:
    coeff = Fraction(1)
    powers: dict[str, int] = {}
    others = []
    stack = list(children)
    while stack:
        c = stack.pop(0)
        if isinstance(c, Product):
            stack[:0] = list(c.children)
        elif isinstance(c, Negate):
            coeff = -coeff
            stack.insert(0, c.child)
        elif isinstance(c, Const):
            coeff *= c.value
        elif isinstance(c, Param):
            powers[c.name] = powers.get(c.name, 0) + 1
        elif isinstance(c, Power) and isinstance(c.child, Param):
            powers[c.child.name] = powers.get(c.child.name, 0) + c.exponent
        else:
            others.append(c)
    if coeff == 0:
        return ZERO
    factors = []
    if abs(coeff) != 1:
        factors.append(Const(abs(coeff)))
    for name in sorted(powers):
        factors.append(_canon_power(Param(name), powers[name]))
    factors.extend(others)
    if not factors:
        body = ONE
    elif len(factors) == 1:
        body = factors[0]
    else:
        body = Product(tuple(factors))
    return Negate(body) if coeff < 0 else body


def add(*terms: Expr) -> Expr:
    return canon(Sum(tuple(terms)))


def mul(*factors: Expr) -> Expr:
    return canon(Product(tuple(factors)))


def neg(expr: Expr) -> Expr:
    return canon(Negate(expr))
