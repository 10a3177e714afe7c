"""Exact arithmetic kernel.

Rationals are :class:`fractions.Fraction`.  :class:`Polynomial` is a sparse
multivariate polynomial over Q in named symbols and :class:`RationalFunction`
a ratio of two of them.  Rational-function equality is decided by
cross-multiplication, so the stored (display) form never has to be unique.

Monomials are tuples of ``(symbol, exponent)`` pairs sorted by symbol name;
that tuple is the canonical dictionary key.  Display order is a separate
concern handled by :func:`symbol_key` and :func:`term_sort_key`.
"""
from __future__ import annotations

import re
from fractions import Fraction
from math import gcd, isqrt, lcm
from numbers import Rational
from typing import Iterable, Mapping

from .errors import DegenerateSubstitution, DivisionByZero, ParseError

Monomial = tuple

SYMBOL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_INDEXED_RE = re.compile(r"([A-Za-z][A-Za-z0-9]*?)((?:_\d+)+)\Z")


def symbol_key(name: str):
    """Sort key for symbols: plain parameters first, then indexed coefficients.

    Indexed names (``a_2``, ``U_0_3``) compare by prefix and then numerically
    by index, so ``a_2`` precedes ``a_10``.
    """
    m = _INDEXED_RE.match(name)
    if m is None:
        return (0, name, (), name)
    idx = tuple(int(p) for p in m.group(2).split("_")[1:])
    return (1, m.group(1), idx, name)


def ordered_symbols(names: Iterable[str]) -> list[str]:
    return sorted(set(names), key=symbol_key)


def term_sort_key(mono: Monomial, variables: list[str]):
    """Graded reverse-lexicographic key; sort descending for display."""
    exps = dict(mono)
    deg = sum(exps.values())
    return (deg, tuple(-exps.get(v, 0) for v in reversed(variables)))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        na, ea = a[i]
        nb, eb = b[j]
        if na == nb:
            out.append((na, ea + eb))
            i += 1
            j += 1
        elif na < nb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    if i < la:
        out.extend(a[i:])
    if j < lb:
        out.extend(b[j:])
    return tuple(out)


def _mono_div(a: Monomial, b: Monomial):
    """a / b if b divides a, else None."""
    if not b:
        return a
    da = dict(a)
    for name, e in b:
        have = da.get(name, 0)
        if have < e:
            return None
        if have == e:
            del da[name]
        else:
            da[name] = have - e
    return tuple(sorted(da.items()))


def _mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    return tuple((n, min(e, db[n])) for n, e in a if n in db)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    raise TypeError(f"cannot use {type(value).__name__} as an exact coefficient")


class Polynomial:
    """Immutable sparse polynomial with :class:`~fractions.Fraction` coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff:
                    clean[mono] = _as_fraction(coeff)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        # terms already canonical, no zero coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def symbol(cls, name: str) -> "Polynomial":
        if not SYMBOL_RE.match(name):
            raise ValueError(f"invalid symbol name {name!r}")
        return cls._raw({((name, 1),): Fraction(1)})

    @classmethod
    def constant(cls, value) -> "Polynomial":
        value = _as_fraction(value)
        return cls._raw({(): value} if value else {})

    @classmethod
    def monomial(cls, mono: Monomial, coeff=1) -> "Polynomial":
        coeff = _as_fraction(coeff)
        return cls._raw({mono: coeff} if coeff else {})

    @staticmethod
    def coerce(value) -> "Polynomial":
        if isinstance(value, Polynomial):
            return value
        return Polynomial.constant(value)

    # -- inspection -------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and () in self._terms)

    def constant_value(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def symbols(self) -> frozenset:
        return frozenset(n for mono in self._terms for n, _ in mono)

    def degree(self, name: str) -> int:
        best = 0
        for mono in self._terms:
            for n, e in mono:
                if n == name and e > best:
                    best = e
        return best

    def total_degree(self) -> int:
        return max((sum(e for _, e in m) for m in self._terms), default=0)

    def collect(self, name: str) -> dict:
        """Coefficients of the powers of ``name``: {exponent: Polynomial}."""
        parts: dict[int, dict] = {}
        for mono, c in self._terms.items():
            e = 0
            rest = []
            for n, k in mono:
                if n == name:
                    e = k
                else:
                    rest.append((n, k))
            parts.setdefault(e, {})[tuple(rest)] = c
        return {e: Polynomial._raw(t) for e, t in sorted(parts.items())}

    def content(self) -> Fraction:
        """Positive rational g such that self / g has coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self._terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def monomial_content(self) -> Monomial:
        it = iter(self._terms)
        try:
            g = next(it)
        except StopIteration:
            return ()
        for mono in it:
            if not g:
                break
            g = _mono_gcd(g, mono)
        return g

    def leading_coefficient(self) -> Fraction:
        if not self._terms:
            return Fraction(0)
        variables = ordered_symbols(self.symbols())
        mono = max(self._terms, key=lambda m: term_sort_key(m, variables))
        return self._terms[mono]

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.constant(other)
            except TypeError:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for mono, c in other._terms.items():
            v = out.get(mono)
            if v is None:
                out[mono] = c
            else:
                v += c
                if v:
                    out[mono] = v
                else:
                    del out[mono]
        return Polynomial._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = Polynomial.constant(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                c = _as_fraction(other)
            except TypeError:
                return NotImplemented
            return self.scale(c)
        if not self._terms or not other._terms:
            return Polynomial._raw({})
        a, b = self._terms, other._terms
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = _mono_mul(ma, mb)
                v = get(m)
                out[m] = ca * cb if v is None else v + ca * cb
        return Polynomial._raw({m: c for m, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c) -> "Polynomial":
        c = _as_fraction(c)
        if not c:
            return Polynomial._raw({})
        if c == 1:
            return self
        return Polynomial._raw({m: v * c for m, v in self._terms.items()})

    def mul_monomial(self, mono: Monomial, coeff=1) -> "Polynomial":
        coeff = _as_fraction(coeff)
        if not coeff:
            return Polynomial._raw({})
        return Polynomial._raw(
            {_mono_mul(m, mono): c * coeff for m, c in self._terms.items()}
        )

    def div_monomial(self, mono: Monomial) -> "Polynomial":
        out = {}
        for m, c in self._terms.items():
            q = _mono_div(m, mono)
            if q is None:
                raise ValueError("monomial does not divide polynomial")
            out[q] = c
        return Polynomial._raw(out)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        result = Polynomial.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self._terms == other._terms
        try:
            return self._terms == Polynomial.constant(other)._terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def exact_div(self, other: "Polynomial"):
        """Quotient if ``other`` divides ``self`` exactly, else ``None``."""
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        if self.is_zero():
            return self
        if other.is_monomial():
            (mono, c), = other._terms.items()
            out = {}
            for m, v in self._terms.items():
                q = _mono_div(m, mono)
                if q is None:
                    return None
                out[q] = v / c
            return Polynomial._raw(out)
        variables = ordered_symbols(self.symbols() | other.symbols())
        key = lambda m: term_sort_key(m, variables)  # noqa: E731
        lead_d = max(other._terms, key=key)
        lead_c = other._terms[lead_d]
        remainder = self
        quotient: dict = {}
        limit = len(self._terms) * len(other._terms) + 8
        while remainder._terms:
            limit -= 1
            if limit < 0:
                return None
            lead_r = max(remainder._terms, key=key)
            q = _mono_div(lead_r, lead_d)
            if q is None:
                return None
            coeff = remainder._terms[lead_r] / lead_c
            quotient[q] = quotient.get(q, 0) + coeff
            remainder = remainder - other.mul_monomial(q, coeff)
        return Polynomial({m: c for m, c in quotient.items()})

    def sqrt(self):
        """Exact square root with positive leading coefficient, or ``None``."""
        if self.is_zero():
            return self
        variables = ordered_symbols(self.symbols())
        key = lambda m: term_sort_key(m, variables)  # noqa: E731
        lead = max(self._terms, key=key)
        root_lead = _sqrt_term(lead, self._terms[lead])
        if root_lead is None:
            return None
        root = Polynomial.monomial(*root_lead)
        twice_lead = root_lead[1] * 2
        for _ in range(len(self._terms) + 1):
            rem = self - root * root
            if rem.is_zero():
                return root
            lm = max(rem._terms, key=key)
            q = _mono_div(lm, root_lead[0])
            if q is None or key(q) >= key(root_lead[0]):
                return None
            root = root + Polynomial.monomial(q, rem._terms[lm] / twice_lead)
        return root if (self - root * root).is_zero() else None

    # -- substitution and evaluation --------------------------------------
    def subs(self, bindings: Mapping[str, "Polynomial"]) -> "Polynomial":
        """Substitute polynomial values for symbols."""
        return poly_substitute(self, bindings).as_polynomial()

    def evaluate(self, values: Mapping[str, object]):
        """Numeric evaluation; every symbol must be bound."""
        total = 0
        for mono, c in self._terms.items():
            term = c
            for n, e in mono:
                term = term * values[n] ** e
            total = total + term
        return total

    def evaluate_float(self, values: Mapping[str, float]) -> float:
        total = 0.0
        for mono, c in self._terms.items():
            term = float(c)
            for n, e in mono:
                term *= float(values[n]) ** e
            total += term
        return total

    # -- display ----------------------------------------------------------
    def sorted_terms(self) -> list:
        variables = ordered_symbols(self.symbols())
        return sorted(
            self._terms.items(),
            key=lambda mc: term_sort_key(mc[0], variables),
            reverse=True,
        )

    def to_text(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for i, (mono, c) in enumerate(self.sorted_terms()):
            sign = "-" if c < 0 else "+"
            mag = -c if c < 0 else c
            factors = [_format_factor(n, e) for n, e in sorted(mono, key=lambda t: symbol_key(t[0]))]
            if mag != 1 or not factors:
                factors.insert(0, str(mag))
            body = "*".join(factors)
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"


def _format_factor(name: str, exp: int) -> str:
    return name if exp == 1 else f"{name}^{exp}"


def _sqrt_fraction(value: Fraction):
    if value < 0:
        return None
    n, d = value.numerator, value.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn != n or rd * rd != d:
        return None
    return Fraction(rn, rd)


def _sqrt_term(mono: Monomial, coeff: Fraction):
    c = _sqrt_fraction(coeff)
    if c is None or any(e % 2 for _, e in mono):
        return None
    return tuple((n, e // 2) for n, e in mono), c


def _integer_scale(*polys: Polynomial) -> Fraction:
    """Factor f making every f*p integral with overall coefficient gcd 1."""
    num = 0
    den = 1
    for p in polys:
        for c in p._terms.values():
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
    return Fraction(den, num) if num else Fraction(1)


class RationalFunction:
    """Ratio of polynomials kept in a light canonical form.

    The stored form has integer coefficients in both parts, overall integer
    content 1, a positive leading denominator coefficient, and no common
    monomial factor.  No multivariate gcd is taken, so two equal functions
    may be stored differently; ``==`` compares by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num, den=1):
        num = Polynomial.coerce(num)
        den = Polynomial.coerce(den)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        self.num, self.den = _normalize(num, den)

    @classmethod
    def _raw(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        r = cls.__new__(cls)
        r.num = num
        r.den = den
        return r

    @classmethod
    def symbol(cls, name: str) -> "RationalFunction":
        return cls._raw(Polynomial.symbol(name), _ONE)

    @staticmethod
    def coerce(value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            return value
        if isinstance(value, Polynomial):
            return RationalFunction(value)
        return RationalFunction(Polynomial.constant(value))

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def as_polynomial(self) -> Polynomial:
        if not self.den.is_constant():
            raise ValueError(f"{self} is not a polynomial")
        return self.num.scale(1 / self.den.constant_value())

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.constant_value() / self.den.constant_value()

    def symbols(self) -> frozenset:
        return self.num.symbols() | self.den.symbols()

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        d1, d2 = self.den, other.den
        if d1 == d2:
            return RationalFunction(self.num + other.num, d1)
        if d1.is_monomial() and d2.is_monomial():
            (m1, c1), = d1.items()
            (m2, c2), = d2.items()
            g = _mono_gcd(m1, m2)
            l_mono = _mono_mul(m1, _mono_div(m2, g))
            f1 = Polynomial.monomial(_mono_div(l_mono, m1), 1 / c1)
            f2 = Polynomial.monomial(_mono_div(l_mono, m2), 1 / c2)
            return RationalFunction(
                self.num * f1 + other.num * f2, Polynomial.monomial(l_mono)
            )
        q = d1.exact_div(d2)
        if q is not None:
            return RationalFunction(self.num + other.num * q, d1)
        q = d2.exact_div(d1)
        if q is not None:
            return RationalFunction(self.num * q + other.num, d2)
        return RationalFunction(self.num * d2 + other.num * d1, d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self.num, self.den)

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if self.num.is_zero() or other.num.is_zero():
            return ZERO
        if self.den.is_constant() and other.den.is_constant():
            return RationalFunction(self.num * other.num, self.den * other.den)
        n1, d1, n2, d2 = self.num, self.den, other.num, other.den
        # cheap cross-cancellation of identical factors
        if d1 == n2:
            return RationalFunction(n1, d2)
        if d2 == n1:
            return RationalFunction(n2, d1)
        return RationalFunction(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        if other.num.is_zero():
            raise DivisionByZero(f"division of {self} by zero")
        return self * RationalFunction(other.den, other.num)

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return RationalFunction(1) / (self ** (-n))
        return RationalFunction(self.num ** n, self.den ** n)

    def __eq__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return ratfunc_equal(self, other)

    __hash__ = None

    # -- substitution and evaluation --------------------------------------
    def subs(self, bindings: Mapping[str, "RationalFunction"]) -> "RationalFunction":
        touched = self.symbols().intersection(bindings)
        if not touched:
            return self
        n = poly_substitute(self.num, bindings)
        d = poly_substitute(self.den, bindings)
        if d.is_zero():
            raise DegenerateSubstitution(
                f"denominator {self.den.to_text()} vanishes under substitution"
            )
        return n / d

    def evaluate(self, values: Mapping[str, object]):
        d = self.den.evaluate(values)
        if d == 0:
            raise DivisionByZero(f"denominator {self.den.to_text()} vanishes")
        return self.num.evaluate(values) / d

    def evaluate_float(self, values: Mapping[str, float]) -> float:
        d = self.den.evaluate_float(values)
        if d == 0.0:
            raise DivisionByZero(f"denominator {self.den.to_text()} vanishes")
        return self.num.evaluate_float(values) / d

    # -- display ----------------------------------------------------------
    def to_text(self) -> str:
        if self.den == _ONE:
            return self.num.to_text()
        num = self.num.to_text()
        if len(self.num) > 1:
            num = f"({num})"
        den = self.den.to_text()
        if len(self.den) == 1:
            (mono, c), = self.den.items()
            # a bare integer or a single symbol power needs no parentheses
            if not mono or (c == 1 and len(mono) == 1):
                return f"{num}/{den}"
        return f"{num}/({den})"

    def __str__(self):
        return self.to_text()

    def __repr__(self):
        return f"RationalFunction({self.to_text()!r})"


def _coerce_or_none(value):
    try:
        return RationalFunction.coerce(value)
    except TypeError:
        return None


def _normalize(num: Polynomial, den: Polynomial):
    if num.is_zero():
        return num, _ONE
    g = _mono_gcd(num.monomial_content(), den.monomial_content())
    if g:
        num = num.div_monomial(g)
        den = den.div_monomial(g)
    if not den.is_constant() and not den.is_monomial():
        q = num.exact_div(den)
        if q is not None:
            num, den = q, _ONE
    f = _integer_scale(num, den)
    if den.leading_coefficient() < 0:
        f = -f
    return num.scale(f), den.scale(f)


_ONE = Polynomial.constant(1)
ZERO = RationalFunction._raw(Polynomial.constant(0), _ONE)
ONE = RationalFunction._raw(_ONE, _ONE)


def poly_arith(lhs: Polynomial, rhs: Polynomial, op: str) -> Polynomial:
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    raise ValueError(f"unknown polynomial operation {op!r}")


def ratfunc_arith(lhs, rhs, op: str) -> RationalFunction:
    lhs = RationalFunction.coerce(lhs)
    rhs = RationalFunction.coerce(rhs)
    if op == "add":
        return lhs + rhs
    if op == "sub":
        return lhs - rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown rational-function operation {op!r}")


def ratfunc_equal(lhs, rhs) -> bool:
    lhs = RationalFunction.coerce(lhs)
    rhs = RationalFunction.coerce(rhs)
    if lhs.den == rhs.den:
        return lhs.num == rhs.num
    return (lhs.num * rhs.den - rhs.num * lhs.den).is_zero()


def poly_substitute(p: Polynomial, bindings: Mapping) -> RationalFunction:
    """Substitute rational functions for symbols of ``p``.

    All terms are brought over one denominator, the product of each bound
    symbol's denominator raised to its top degree in ``p``, so no pairwise
    rational additions happen.
    """
    bound = sorted(p.symbols().intersection(bindings))
    if not bound:
        return RationalFunction(p)
    values = {s: RationalFunction.coerce(bindings[s]) for s in bound}
    top = {s: p.degree(s) for s in bound}
    common = _ONE
    for s in bound:
        den = values[s].den
        if den != _ONE:
            common = common * den ** top[s]
    if common.is_zero():
        raise DegenerateSubstitution("substitution denominator vanishes")
    num_pows = {s: [_ONE] for s in bound}
    den_pows = {s: [_ONE] for s in bound}

    def power(cache, base, e):
        while len(cache) <= e:
            cache.append(cache[-1] * base)
        return cache[e]

    total: dict = {}
    for mono, c in p.items():
        rest = []
        factor = None
        for n, e in mono:
            if n in values:
                v = values[n]
                piece = power(num_pows[n], v.num, e)
                if v.den != _ONE and top[n] > e:
                    piece = piece * power(den_pows[n], v.den, top[n] - e)
                factor = piece if factor is None else factor * piece
            else:
                rest.append((n, e))
        for n in bound:
            if values[n].den != _ONE and all(n != m for m, _ in mono):
                piece = power(den_pows[n], values[n].den, top[n])
                factor = piece if factor is None else factor * piece
        term = factor.mul_monomial(tuple(rest), c) if factor is not None else Polynomial.monomial(tuple(rest), c)
        for m, v in term.items():
            total[m] = total.get(m, 0) + v
    return RationalFunction(Polynomial(total), common)


# -- text parsing -----------------------------------------------------------
_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m.group(1):
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2):
            tokens.append(("id", m.group(2), m.start(2)))
        elif m.group(3):
            if m.group(3) not in "+-*/^()":
                raise ParseError(f"unexpected character {m.group(3)!r}", 1, m.start(3) + 1)
            tokens.append(("op", m.group(3), m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _RFParser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", 1, tok[2] + 1)
        self.i += 1
        return tok

    def parse(self):
        value = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", 1, tok[2] + 1)
        return value

    def expr(self):
        value = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", 1, pos + 1)
                value = value / rhs
        return value

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.take()
            inner = self.unary()
            return -inner if value == "-" else inner
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "num":
                raise ParseError("exponent must be a nonnegative integer", 1, tok[2] + 1)
            return base ** int(tok[1])
        return base

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return RationalFunction(int(value))
        if kind == "id":
            return RationalFunction.symbol(value)
        if value == "(":
            inner = self.expr()
            self.take(")")
            return inner
        raise ParseError(f"unexpected {value or 'end of input'!r}", 1, pos + 1)


def parse_ratfunc(text: str) -> RationalFunction:
    """Parse the canonical text grammar (``+ - * / ^``, integers, symbols)."""
    return _RFParser(text).parse()


def parse_polynomial(text: str) -> Polynomial:
    return parse_ratfunc(text).as_polynomial()


def symbol(name: str) -> RationalFunction:
    return RationalFunction.symbol(name)
