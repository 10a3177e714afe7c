"""Traveling-wave reduction of two-variable problems."""
from __future__ import annotations

from fractions import Fraction

from ..errors import NotReducible
from ..series import Explicit, Parity, TotalDegree
from .ast import (Const, Deriv, Expr, FuncRef, Negate, Param, Power, Product,
                  Sum, canon)
from .problem import ProblemSpec, Unknown, WaveReduction


def _substitute(e: Expr, r: WaveReduction) -> Expr:
    match e:
        case Param(name=n) if n == r.speed:
            return Product((Param(r.phase_speed), Param(r.wavenumber)))
        case Const() | Param() | FuncRef():
            return e
        case Deriv(child=c, var=v, order=n):
            inner = Deriv(_substitute(c, r), r.new_var, n)
            k_n = Power(Param(r.wavenumber), n)
            if v == r.space_var:
                return Product((k_n, inner))
            # d/dt = -lambda d/dz = -c*k d/dz
            sign = Const(Fraction((-1) ** n))
            return Product((sign, Power(Param(r.phase_speed), n), k_n, inner))
        case Power(child=c, exponent=n):
            return Power(_substitute(c, r), n)
        case Negate(child=c):
            return Negate(_substitute(c, r))
        case Sum(children=cs):
            return Sum(tuple(_substitute(c, r) for c in cs))
        case Product(children=cs):
            return Product(tuple(_substitute(c, r) for c in cs))
    raise TypeError(f"not an expression node: {e!r}")


def k_valuation(e: Expr, k: str) -> int:
    """Largest power of the parameter ``k`` that divides every term."""
    match e:
        case Param(name=n):
            return 1 if n == k else 0
        case Const() | FuncRef():
            return 0
        case Deriv(child=c) | Negate(child=c):
            return k_valuation(c, k)
        case Power(child=c, exponent=n):
            return n * k_valuation(c, k)
        case Sum(children=cs):
            return min(k_valuation(c, k) for c in cs)
        case Product(children=cs):
            return sum(k_valuation(c, k) for c in cs)
    raise TypeError(f"not an expression node: {e!r}")


def divide_k(e: Expr, k: str, v: int) -> Expr:
    """Divide by ``k**v``; requires ``v <= k_valuation(e, k)``."""
    if v == 0:
        return e
    match e:
        case Param(name=n) if n == k and v == 1:
            return Const(Fraction(1))
        case Deriv(child=c, var=var, order=n):
            return Deriv(divide_k(c, k, v), var, n)
        case Negate(child=c):
            return Negate(divide_k(c, k, v))
        case Sum(children=cs):
            return Sum(tuple(divide_k(c, k, v) for c in cs))
        case Product(children=cs):
            out = []
            left = v
            for c in cs:
                take = min(left, k_valuation(c, k))
                out.append(divide_k(c, k, take))
                left -= take
            return Product(tuple(out))
        case Power(child=c, exponent=n):
            q, rem = divmod(v, n)
            if rem == 0:
                return Power(divide_k(c, k, q), n)
            return Product((Power(divide_k(c, k, q), n - rem), Power(divide_k(c, k, q + 1), rem)))
    raise ValueError(f"cannot divide {e!r} by {k}^{v}")


def reduce_equations(vars, params, equations, r: WaveReduction):
    """Rewrite equations in (x, t) as ODEs in the wave variable.

    Every equation is divided by the largest power of the wavenumber common
    to all of its terms, so the speed enters only through the phase speed.
    Returns the new variables, parameters and equations.
    """
    if set(vars) != {r.space_var, r.time_var} or len(vars) != 2:
        raise NotReducible(
            f"reduction needs exactly the variables {r.space_var} and {r.time_var}, got {tuple(vars)}"
        )
    if r.wavenumber not in params or r.speed not in params:
        raise NotReducible(f"parameters {r.wavenumber} and {r.speed} must be declared")
    if r.phase_speed in params or r.phase_speed in vars:
        raise NotReducible(f"name {r.phase_speed!r} is already in use")
    if r.new_var in params:
        raise NotReducible(f"name {r.new_var!r} is already a parameter")
    new_params = tuple(r.phase_speed if p == r.speed else p for p in params)
    out = []
    for eq in equations:
        e = canon(_substitute(eq, r))
        v = k_valuation(e, r.wavenumber)
        out.append(canon(divide_k(e, r.wavenumber, v)))
    return (r.new_var,), new_params, out


def _reduce_support(s, fn):
    if isinstance(s, TotalDegree):
        return TotalDegree(s.degree)
    if isinstance(s, Parity) and len(set(s.parities)) == 1:
        return Parity((s.parities[0],), s.degree)
    raise NotReducible(f"ansatz of {fn} has no one-variable counterpart")


def traveling_wave_reduce(p: ProblemSpec, r: WaveReduction) -> ProblemSpec:
    """Reduce a two-variable problem to one variable.

    Total-degree supports keep their degree.  A seed at exponents (i, j)
    becomes the seed at total degree i + j.  An explicit match set cannot be
    carried over and is dropped in favour of the default.
    """
    vars, params, equations = reduce_equations(p.vars, p.params, p.equations, r)
    unknowns = tuple(Unknown(u.name, _reduce_support(u.support, u.name), u.alias) for u in p.unknowns)
    seeds = []
    for fn, e in p.seeds:
        s = (fn, (sum(e),))
        if s not in seeds:
            seeds.append(s)
    match = p.match
    if isinstance(match, (Explicit, Parity)):
        match = None
    return ProblemSpec(p.name, vars, params, unknowns, tuple(equations), tuple(seeds), match, r)
