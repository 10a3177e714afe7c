"""Resolved problem descriptions."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ModelError, SeedError
from ..series import Explicit, Parity, SupportPolicy, TotalDegree, alias_namer, ansatz, default_namer
from .ast import Expr, max_derivative_order


@dataclass(frozen=True)
class Unknown:
    name: str
    support: SupportPolicy
    alias: str | None = None

    def namer(self):
        return alias_namer(self.alias) if self.alias else default_namer

    def symbol(self, exponents) -> str:
        return self.namer()(self.name, tuple(exponents))


@dataclass(frozen=True)
class WaveReduction:
    """Traveling-wave substitution z = k*x - lambda*t with c = lambda/k."""

    new_var: str = "z"
    space_var: str = "x"
    time_var: str = "t"
    wavenumber: str = "k"
    speed: str = "lambda"
    phase_speed: str = "c"

    def to_text(self) -> str:
        return (
            f"{self.new_var} = {self.wavenumber}*{self.space_var} - {self.speed}*{self.time_var} "
            f"with {self.phase_speed} = {self.speed}/{self.wavenumber}"
        )


@dataclass(frozen=True)
class ProblemSpec:
    name: str
    vars: tuple
    params: tuple
    unknowns: tuple
    equations: tuple
    seeds: tuple = ()
    match: SupportPolicy | None = None
    # informational only; the equations are already in reduced form
    reduction: WaveReduction | None = field(default=None, compare=False)

    def unknown(self, name: str) -> Unknown:
        for u in self.unknowns:
            if u.name == name:
                return u
        raise KeyError(name)

    def ansatz_series(self) -> dict:
        return {u.name: ansatz(u.name, self.vars, u.support, u.namer()) for u in self.unknowns}

    def seed_symbols(self) -> list:
        return [self.unknown(fn).symbol(e) for fn, e in self.seeds]

    def coefficient_symbols(self) -> list:
        """Every ansatz coefficient as (symbol, function, exponents), in declaration order."""
        out = []
        for u in self.unknowns:
            for e in u.support.monomials(len(self.vars)):
                out.append((u.symbol(e), u.name, e))
        return out

    def max_derivative_order(self) -> int:
        return max((max_derivative_order(eq) for eq in self.equations), default=0)

    def reliable_degree(self) -> int | None:
        """Highest total degree whose coefficients are exact, when it is well defined."""
        degrees = []
        for u in self.unknowns:
            if not isinstance(u.support, (TotalDegree, Parity)):
                return None
            degrees.append(u.support.max_degree(len(self.vars)))
        if not degrees:
            return None
        return min(degrees) - self.max_derivative_order()

    def with_order(self, order: int) -> "ProblemSpec":
        """Same problem with every ansatz truncated at ``order``.

        Only total-degree and parity supports can be re-truncated.  A
        total-degree match set is dropped so the default bound applies.
        """
        if order < 0:
            raise ModelError("order must be nonnegative")
        unknowns = []
        for u in self.unknowns:
            s = u.support
            if isinstance(s, TotalDegree):
                s = TotalDegree(order)
            elif isinstance(s, Parity):
                s = Parity(s.parities, order)
            else:
                raise ModelError(f"the explicit ansatz of {u.name} has no order to change")
            unknowns.append(Unknown(u.name, s, u.alias))
        for fn, e in self.seeds:
            if sum(e) > order:
                raise SeedError(f"seed {fn}{list(e)} lies above order {order}")
        match = self.match if isinstance(self.match, Explicit) else None
        return ProblemSpec(self.name, self.vars, self.params, tuple(unknowns), self.equations,
                           self.seeds, match, self.reduction)

    def with_seeds(self, seeds) -> "ProblemSpec":
        """Same problem with a different set of free (seed) coefficients."""
        checked = []
        for fn, e in seeds:
            try:
                u = self.unknown(fn)
            except KeyError:
                raise SeedError(f"seed refers to unknown function {fn!r}") from None
            e = tuple(e)
            if len(e) != len(self.vars) or not u.support.admits(e):
                raise SeedError(f"seed {fn}{list(e)} is not an ansatz coefficient")
            if (fn, e) not in checked:
                checked.append((fn, e))
        return ProblemSpec(self.name, self.vars, self.params, self.unknowns, self.equations,
                           tuple(checked), self.match, self.reduction)

    def with_match(self, match: SupportPolicy | None) -> "ProblemSpec":
        return ProblemSpec(self.name, self.vars, self.params, self.unknowns, self.equations,
                           self.seeds, match, self.reduction)

    def with_equations(self, equations) -> "ProblemSpec":
        return ProblemSpec(self.name, self.vars, self.params, self.unknowns, tuple(equations),
                           self.seeds, self.match, self.reduction)


__all__ = ["Expr", "ProblemSpec", "Unknown", "WaveReduction"]
