"""Truncated multivariate power series with rational-function coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as cartesian
from math import prod
from typing import Callable, Iterable, Mapping, Union

from .errors import UnboundedSupport, VarMismatch
from .exact import ONE, ZERO, RationalFunction

Exponents = tuple


def graded_key(e: Exponents):
    """Graded-lex sort key for exponent vectors (ascending)."""
    return (sum(e), e)


def monomials_upto(nvars: int, degree: int) -> list:
    """All exponent vectors in ``nvars`` variables of total degree <= degree."""
    if degree < 0:
        return []
    out = [e for e in cartesian(range(degree + 1), repeat=nvars) if sum(e) <= degree]
    return sorted(out, key=graded_key)


@dataclass(frozen=True)
class TotalDegree:
    degree: int | None

    def admits(self, e: Exponents) -> bool:
        return self.degree is None or sum(e) <= self.degree

    def monomials(self, nvars: int) -> list:
        if self.degree is None:
            raise UnboundedSupport("total-degree support without a bound")
        return monomials_upto(nvars, self.degree)

    def max_degree(self, nvars: int) -> int:
        if self.degree is None:
            raise UnboundedSupport("total-degree support without a bound")
        return self.degree


@dataclass(frozen=True)
class Explicit:
    exponents: frozenset

    def __init__(self, exponents: Iterable):
        exps = frozenset(tuple(int(i) for i in e) for e in exponents)
        if any(i < 0 for e in exps for i in e):
            raise ValueError("explicit support needs nonnegative exponents")
        object.__setattr__(self, "exponents", exps)

    def admits(self, e: Exponents) -> bool:
        return tuple(e) in self.exponents

    def monomials(self, nvars: int) -> list:
        bad = [e for e in self.exponents if len(e) != nvars]
        if bad:
            raise VarMismatch(f"exponent {bad[0]} does not have {nvars} entries")
        return sorted(self.exponents, key=graded_key)

    def max_degree(self, nvars: int) -> int:
        return max((sum(e) for e in self.exponents), default=0)


_PARITY_OK = {"even": lambda i: i % 2 == 0, "odd": lambda i: i % 2 == 1, "any": lambda i: True}


@dataclass(frozen=True)
class Parity:
    """Per-variable parity filter on top of a total-degree bound."""

    parities: tuple
    degree: int | None

    def __post_init__(self):
        for p in self.parities:
            if p not in _PARITY_OK:
                raise ValueError(f"unknown parity {p!r}")

    def admits(self, e: Exponents) -> bool:
        if self.degree is not None and sum(e) > self.degree:
            return False
        return all(_PARITY_OK[p](i) for p, i in zip(self.parities, e))

    def monomials(self, nvars: int) -> list:
        if self.degree is None:
            raise UnboundedSupport("parity support without a degree bound")
        if len(self.parities) != nvars:
            raise VarMismatch("parity list does not match the variables")
        return [e for e in monomials_upto(nvars, self.degree) if self.admits(e)]

    def max_degree(self, nvars: int) -> int:
        return max((sum(e) for e in self.monomials(nvars)), default=0)


SupportPolicy = Union[TotalDegree, Explicit, Parity]


def _combine_parity(p: str, q: str) -> str:
    if "any" in (p, q):
        return "any"
    return "even" if p == q else "odd"


def _flip(p: str, order: int) -> str:
    if p == "any" or order % 2 == 0:
        return p
    return "odd" if p == "even" else "even"


def _union(a: SupportPolicy, b: SupportPolicy, nvars: int) -> SupportPolicy:
    if a == b:
        return a
    if isinstance(a, TotalDegree) and isinstance(b, TotalDegree):
        return TotalDegree(max(a.degree, b.degree))
    if isinstance(a, Parity) and isinstance(b, Parity) and a.parities == b.parities:
        return Parity(a.parities, max(a.degree, b.degree))
    return Explicit(set(a.monomials(nvars)) | set(b.monomials(nvars)))


class TruncSeries:
    """Sparse truncated series: exponent vector -> RationalFunction.

    Instances are treated as immutable; every operation returns a new series.
    """

    __slots__ = ("vars", "support", "_coeffs")

    def __init__(self, vars: Iterable[str], support: SupportPolicy, coeffs: Mapping | None = None):
        self.vars = tuple(vars)
        if not self.vars:
            raise ValueError("a series needs at least one variable")
        self.support = support
        clean = {}
        for e, c in (coeffs or {}).items():
            e = tuple(e)
            if len(e) != len(self.vars):
                raise VarMismatch(f"exponent {e} does not match variables {self.vars}")
            c = RationalFunction.coerce(c)
            if c.is_zero():
                continue
            if not support.admits(e):
                raise ValueError(f"exponent {e} is outside the series support")
            clean[e] = c
        self._coeffs = clean

    @classmethod
    def _raw(cls, vars, support, coeffs):
        s = cls.__new__(cls)
        s.vars = vars
        s.support = support
        s._coeffs = coeffs
        return s

    @classmethod
    def zero(cls, vars: Iterable[str]) -> "TruncSeries":
        vars = tuple(vars)
        return cls._raw(vars, TotalDegree(0), {})

    @classmethod
    def constant(cls, vars: Iterable[str], value) -> "TruncSeries":
        vars = tuple(vars)
        origin = (0,) * len(vars)
        value = RationalFunction.coerce(value)
        coeffs = {} if value.is_zero() else {origin: value}
        return cls._raw(vars, Explicit([origin]), coeffs)

    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def items(self):
        """(exponents, coefficient) pairs in graded-lex order."""
        return sorted(self._coeffs.items(), key=lambda kv: graded_key(kv[0]))

    def __len__(self):
        return len(self._coeffs)

    def is_zero(self) -> bool:
        return not self._coeffs

    def max_degree(self) -> int:
        return self.support.max_degree(len(self.vars))

    def coefficient(self, exponents: Exponents) -> RationalFunction:
        return self._coeffs.get(tuple(exponents), ZERO)

    def _check_vars(self, other: "TruncSeries"):
        if self.vars != other.vars:
            raise VarMismatch(f"variables {self.vars} and {other.vars} differ")

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        self._check_vars(other)
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            v = out.get(e)
            v = c if v is None else v + c
            if v.is_zero():
                out.pop(e, None)
            else:
                out[e] = v
        return TruncSeries._raw(self.vars, _union(self.support, other.support, len(self.vars)), out)

    def __neg__(self) -> "TruncSeries":
        return self.scale(-ONE)

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        return self + (-other)

    def scale(self, factor) -> "TruncSeries":
        factor = RationalFunction.coerce(factor)
        if factor.is_zero():
            return TruncSeries._raw(self.vars, self.support, {})
        return TruncSeries._raw(
            self.vars, self.support, {e: c * factor for e, c in self._coeffs.items()}
        )

    def mul(self, other: "TruncSeries", out_bound: int | None = None) -> "TruncSeries":
        """Truncated Cauchy product keeping total degree <= out_bound."""
        self._check_vars(other)
        if out_bound is None:
            out_bound = max(self.max_degree(), other.max_degree())
        if out_bound < 0:
            raise ValueError("out_bound must be nonnegative")
        acc: dict = {}
        for ea, ca in self._coeffs.items():
            da = sum(ea)
            if da > out_bound:
                continue
            for eb, cb in other._coeffs.items():
                if da + sum(eb) > out_bound:
                    continue
                e = tuple(i + j for i, j in zip(ea, eb))
                term = ca * cb
                prev = acc.get(e)
                acc[e] = term if prev is None else prev + term
        out = {e: c for e, c in acc.items() if not c.is_zero()}
        if isinstance(self.support, Parity) and isinstance(other.support, Parity):
            pars = tuple(_combine_parity(p, q) for p, q in zip(self.support.parities, other.support.parities))
            support = Parity(pars, out_bound)
        else:
            support = TotalDegree(out_bound)
        return TruncSeries._raw(self.vars, support, out)

    def diff(self, var: str, order: int = 1) -> "TruncSeries":
        """Termwise derivative; coefficients pick up the falling factorial."""
        if var not in self.vars:
            raise VarMismatch(f"{var!r} is not a variable of this series")
        if order < 1:
            raise ValueError("derivative order must be positive")
        k = self.vars.index(var)
        out = {}
        for e, c in self._coeffs.items():
            n = e[k]
            if n < order:
                continue
            factor = prod(range(n - order + 1, n + 1))
            ne = e[:k] + (n - order,) + e[k + 1:]
            out[ne] = c * factor
        sup = self.support
        if isinstance(sup, TotalDegree):
            support = TotalDegree(None if sup.degree is None else max(sup.degree - order, 0))
        elif isinstance(sup, Parity):
            pars = tuple(_flip(p, order) if i == k else p for i, p in enumerate(sup.parities))
            support = Parity(pars, None if sup.degree is None else max(sup.degree - order, 0))
        else:
            support = Explicit(
                e[:k] + (e[k] - order,) + e[k + 1:] for e in sup.exponents if e[k] >= order
            )
        return TruncSeries._raw(self.vars, support, out)

    def map_coefficients(self, fn: Callable[[RationalFunction], RationalFunction]) -> "TruncSeries":
        out = {}
        for e, c in self._coeffs.items():
            v = fn(c)
            if not v.is_zero():
                out[e] = v
        return TruncSeries._raw(self.vars, self.support, out)

    def subs(self, bindings: Mapping) -> "TruncSeries":
        return self.map_coefficients(lambda c: c.subs(bindings))

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        if self.vars != other.vars or set(self._coeffs) != set(other._coeffs):
            return False
        return all(c == other._coeffs[e] for e, c in self._coeffs.items())

    __hash__ = None

    def to_text(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for e, c in self.items():
            var_part = "*".join(
                v if n == 1 else f"{v}^{n}" for v, n in zip(self.vars, e) if n
            )
            text = c.to_text()
            negative = False
            if c.is_polynomial() and len(c.num) == 1 and text.startswith("-"):
                negative, text = True, text[1:]
            if c.is_polynomial() and len(c.num) > 1:
                text = f"({text})"
            if var_part:
                text = var_part if text == "1" else f"{text}*{var_part}"
            if not parts:
                parts.append(f"-{text}" if negative else text)
            else:
                parts.append(f" - {text}" if negative else f" + {text}")
        return "".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"TruncSeries({self.to_text()!r})"


def default_namer(fn_name: str, exponents: Exponents) -> str:
    return fn_name + "".join(f"_{i}" for i in exponents)


def alias_namer(alias: str) -> Callable[[str, Exponents], str]:
    """Names like ``a_3`` (one variable) or ``a_21`` (indices below ten)."""

    def namer(fn_name, exponents):
        if len(exponents) > 1 and all(i < 10 for i in exponents):
            return f"{alias}_" + "".join(str(i) for i in exponents)
        return alias + "".join(f"_{i}" for i in exponents)

    return namer


def ansatz(fn_name: str, vars: Iterable[str], support: SupportPolicy,
           seed_namer: Callable[[str, Exponents], str] = default_namer) -> TruncSeries:
    """Generic series with one fresh coefficient symbol per admitted monomial."""
    vars = tuple(vars)
    coeffs = {e: RationalFunction.symbol(seed_namer(fn_name, e)) for e in support.monomials(len(vars))}
    return TruncSeries._raw(vars, support, coeffs)


def series_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a + b


def series_mul(a: TruncSeries, b: TruncSeries, out_bound: int | None = None) -> TruncSeries:
    return a.mul(b, out_bound)


def series_diff(s: TruncSeries, var: str, order: int = 1) -> TruncSeries:
    return s.diff(var, order)


def coefficient(s: TruncSeries, exponents: Exponents) -> RationalFunction:
    return s.coefficient(exponents)
