"""Independent checks of solved series: residuals, numeric evaluation and oracles."""
from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Mapping, Sequence

from .errors import AssumptionViolated, OutOfDomain, SchemaError
from .exact import RationalFunction, poly_substitute
from .expand import evaluate, match_monomials, product_bound
from .model.problem import ProblemSpec
from .series import Parity, TruncSeries
from .solve import SolveResult


# ---------------------------------------------------------------- residuals

@dataclass
class ResidualReport:
    entries: list  # (equation, monomial, RationalFunction)

    @property
    def all_zero(self) -> bool:
        return all(r.is_zero() for _, _, r in self.entries)

    @property
    def max_degree(self) -> int:
        return max((sum(m) for _, m, _ in self.entries), default=0)

    def nonzero(self) -> list:
        return [(i, m, r) for i, m, r in self.entries if not r.is_zero()]

    def to_json_obj(self) -> dict:
        rows = []
        for i, m, r in self.entries:
            row = {"equation": i, "monomial": list(m), "zero": r.is_zero()}
            if not r.is_zero():
                row["residual"] = r.to_text()
            rows.append(row)
        return {"schema": 1, "all_zero": self.all_zero, "max_degree": self.max_degree, "entries": rows}

    def to_text(self) -> str:
        lines = [f"E{i}{list(m)}: " + ("0" if r.is_zero() else r.to_text()) for i, m, r in self.entries]
        lines.append(f"checked through total degree {self.max_degree}: "
                     + ("all zero" if self.all_zero else f"{len(self.nonzero())} nonzero"))
        return "\n".join(lines)


def substituted_series(p: ProblemSpec, r: SolveResult) -> dict:
    """Ansatz series of every unknown with the result's values plugged in."""
    values = dict(r.bindings)
    values.update(r.assignments)
    return {name: s.subs(values) for name, s in p.ansatz_series().items()}


def residual(p: ProblemSpec, r: SolveResult) -> ResidualReport:
    """Recompute every matched coefficient with the solved series.

    This goes through the series engine directly rather than through the
    expanded polynomial system, so it is an independent check of solving.
    """
    env = substituted_series(p, r)
    bound = product_bound(p)
    monos = match_monomials(p)
    entries = []
    for i, eq in enumerate(p.equations):
        s = evaluate(eq, env, p.vars, bound)
        for m in monos:
            entries.append((i, tuple(m), s.coefficient(m)))
    return ResidualReport(entries)


# ---------------------------------------------------------------- numeric evaluation

@dataclass
class EvalGrid:
    bindings: dict  # symbol -> Fraction | int | float
    points: dict  # variable -> sequence of values
    precision: str = "exact"  # or "float64"

    def __post_init__(self):
        if self.precision not in ("exact", "float64"):
            raise ValueError("precision must be 'exact' or 'float64'")

    def grid(self, vars: Sequence[str]) -> list:
        missing = [v for v in vars if v not in self.points]
        if missing:
            raise SchemaError(f"no grid points for variable {missing[0]}")
        return list(cartesian(*(self.points[v] for v in vars)))


def _is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def check_assumptions(r: SolveResult, bindings: Mapping):
    values = {k: RationalFunction.coerce(Fraction(v)) for k, v in bindings.items()}
    for a in r.assumptions:
        if not a.symbols() <= set(values):
            continue
        if poly_substitute(a, values).is_zero():
            raise AssumptionViolated(a.to_text())


def numeric_coefficients(r: SolveResult, shape: TruncSeries, grid: EvalGrid) -> dict:
    """Coefficient values of ``shape`` under the result and the grid bindings.

    Coefficients are computed exactly whenever every binding is rational,
    and only converted to floats afterwards in float64 mode.
    """
    check_assumptions(r, grid.bindings)
    exact = all(_is_exact(v) for v in grid.bindings.values())
    out = {}
    for e, c in shape.items():
        value = c.subs({k: r.value(k) for k in c.symbols()})
        unbound = sorted(value.symbols() - set(grid.bindings))
        if unbound:
            raise SchemaError(f"no value bound for {', '.join(unbound)}")
        if exact:
            v = value.evaluate({k: Fraction(x) for k, x in grid.bindings.items()})
            out[e] = v if grid.precision == "exact" else float(v)
        else:
            out[e] = value.evaluate_float({k: float(x) for k, x in grid.bindings.items()})
    return out


def horner(coeffs: Mapping, point: Sequence):
    """Nested Horner evaluation, outermost in the first variable.

    Terms are grouped by the exponent of the first variable and each group
    is evaluated recursively, visiting exponents from high to low.
    """
    if not coeffs:
        return 0
    if len(point) == 1:
        x = point[0]
        acc = 0
        top = max(e[0] for e in coeffs)
        flat = {e[0]: c for e, c in coeffs.items()}
        for n in range(top, -1, -1):
            acc = acc * x + flat.get(n, 0)
        return acc
    groups: dict = {}
    for e, c in coeffs.items():
        groups.setdefault(e[0], {})[e[1:]] = c
    x = point[0]
    acc = 0
    for n in range(max(groups), -1, -1):
        inner = horner(groups[n], point[1:]) if n in groups else 0
        acc = acc * x + inner
    return acc


def eval_series(r: SolveResult, shape: TruncSeries, grid: EvalGrid, workers: int | None = None) -> list:
    """Evaluate the solved series at every grid point, in grid order."""
    coeffs = numeric_coefficients(r, shape, grid)
    points = grid.grid(shape.vars)
    if grid.precision == "exact":
        points = [tuple(Fraction(x) for x in pt) for pt in points]
    else:
        points = [tuple(float(x) for x in pt) for pt in points]

    def one(pt):
        return horner(coeffs, pt)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(one, points))
    else:
        values = [one(pt) for pt in points]
    return list(zip(points, values))


# ---------------------------------------------------------------- oracles

@dataclass(frozen=True)
class OracleSpec:
    kind: str
    params: dict = field(default_factory=dict)

    KINDS = ("burgers_tan", "kdv_sech", "burgers_time_factor")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown oracle {self.kind!r}")


class DegenerateTimeFactor(UserWarning):
    """alpha = 0 collapses the time factor to zero."""


def burgers_tan(a1: float, nu: float, x: float) -> float:
    """Odd stationary Burgers profile through the origin with slope a1."""
    if nu == 0 or a1 / nu <= 0:
        raise OutOfDomain("burgers_tan needs a1/nu > 0")
    w = math.sqrt(a1 / (2 * nu))
    if abs(x) * w >= math.pi / 2:
        raise OutOfDomain(f"x = {x} is past the pole of the tan profile")
    return math.sqrt(2 * nu * a1) * math.tan(x * w)


def kdv_sech(c: float, k: float, z: float) -> float:
    """KdV soliton profile in the wave variable, (c/2) sech^2(sqrt(c) z / (2k))."""
    if c <= 0:
        raise OutOfDomain("kdv_sech needs c > 0")
    if k == 0:
        raise OutOfDomain("kdv_sech needs k != 0")
    return c / 2 / math.cosh(math.sqrt(c) * z / (2 * k)) ** 2


def burgers_time_factor(alpha: float, beta: float, C: float, t: float) -> float:
    """alpha / (beta + C exp(-alpha t)), the logistic solution of a' = alpha a - beta a^2."""
    if alpha == 0:
        warnings.warn("alpha = 0: time factor is identically zero", DegenerateTimeFactor, stacklevel=2)
        return 0.0
    den = beta + C * math.exp(-alpha * t)
    if den == 0:
        raise OutOfDomain(f"time factor has a pole at t = {t}")
    return alpha / den


def time_factor_constant(alpha: float, beta: float, a0: float) -> float:
    """Integration constant C fixed by the initial value a(0) = a0."""
    if a0 == 0:
        raise OutOfDomain("a(0) = 0 cannot be reached by the time factor")
    return alpha / a0 - beta


def quasi_separation_rates(u: float, du: float, d2u: float, nu: float) -> tuple:
    """Frozen-x rates (alpha, beta) = (nu U''/U, U') of the quasi-separated form.

    These are evaluated at a single x and treated as constants; the product
    U(x) a(t) is not claimed to solve the PDE.
    """
    if u == 0:
        raise OutOfDomain("U vanishes at the frozen point")
    return nu * d2u / u, du


def frozen_x_rates(r: SolveResult, shape: TruncSeries, bindings: Mapping, x, nu) -> tuple:
    """Evaluate U, U', U'' of a solved one-variable series and return (alpha, beta)."""
    if len(shape.vars) != 1:
        raise ValueError("quasi-separation needs a one-variable series")
    var = shape.vars[0]
    vals = []
    for s in (shape, shape.diff(var, 1), shape.diff(var, 2)):
        grid = EvalGrid(dict(bindings), {var: [x]}, "float64")
        vals.append(float(eval_series(r, s, grid)[0][1]))
    return quasi_separation_rates(*vals, float(nu))


def oracle_value(o: OracleSpec, point) -> float:
    p = o.params
    x = point[0] if isinstance(point, (tuple, list)) else point
    try:
        if o.kind == "burgers_tan":
            return burgers_tan(float(p["a1"]), float(p["nu"]), float(x))
        if o.kind == "kdv_sech":
            return kdv_sech(float(p["c"]), float(p.get("k", 1)), float(x))
        return burgers_time_factor(float(p["alpha"]), float(p["beta"]), float(p["C"]), float(x))
    except KeyError as exc:
        raise SchemaError(f"oracle {o.kind} needs parameter {exc.args[0]}") from None


# ---------------------------------------------------------------- comparison

def first_omitted_order(shape: TruncSeries) -> int:
    """Lowest total degree the truncated series could be missing."""
    top = shape.max_degree()
    sup = shape.support
    if isinstance(sup, Parity) and len(sup.parities) == 1 and sup.parities[0] != "any":
        return top + 2 if top % 2 == (0 if sup.parities[0] == "even" else 1) else top + 1
    return top + 1


@dataclass
class CompareReport:
    rows: list  # (point, series, oracle, abserr)
    first_omitted_order: int

    @property
    def max_abs_error(self) -> float:
        return max((row[3] for row in self.rows), default=0.0)

    def to_csv(self, vars: Sequence[str]) -> str:
        lines = [",".join(list(vars) + ["series", "oracle", "abserr"])]
        for pt, s, o, err in self.rows:
            lines.append(",".join([_num(v) for v in pt] + [_num(s), _num(o), _num(err)]))
        return "\n".join(lines) + "\n"


def _num(v) -> str:
    return repr(float(v))


def compare(r: SolveResult, o: OracleSpec, shape: TruncSeries, grid: EvalGrid,
            workers: int | None = None) -> CompareReport:
    """Pointwise |series - oracle| over the grid."""
    rows = []
    for pt, s in eval_series(r, shape, grid, workers):
        ov = oracle_value(o, pt)
        rows.append((pt, s, ov, abs(float(s) - ov)))
    return CompareReport(rows, first_omitted_order(shape))
