"""Elimination solver for the polynomial systems produced by expansion."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import AssumptionViolated, BranchLimit, Inconsistent, SchemaError
from .exact import (Polynomial, RationalFunction, ordered_symbols,
                    parse_ratfunc, poly_substitute)
from .expand import AlgEquation, AlgSystem


@dataclass(frozen=True)
class SolvePolicy:
    """Knobs for :func:`solve_system`.

    ``generic_seeds`` lets divisors depend on seeds (recorded as
    assumptions).  With it off, only pure-parameter divisors are accepted.
    """

    allow_quadratic: bool = False
    max_branches: int = 4
    root_selection: str = "both"  # or "principal"
    generic_seeds: bool = True

    def __post_init__(self):
        if self.root_selection not in ("both", "principal"):
            raise ValueError("root_selection must be 'both' or 'principal'")
        if self.max_branches < 1:
            raise ValueError("max_branches must be at least 1")


@dataclass
class SolveResult:
    assignments: dict  # unknown -> RationalFunction, insertion order = solve order
    assumptions: list  # Polynomial atoms assumed nonzero
    unresolved: list  # AlgEquation with the current (partially reduced) polynomial
    free: list  # unknowns left without an assignment
    knowns: list = field(default_factory=list)
    bindings: dict = field(default_factory=dict)  # knowns fixed by specialize
    branches: list = field(default_factory=list)  # alternative leaves of quadratic forks

    @property
    def complete(self) -> bool:
        return not self.free and not self.unresolved

    def value(self, name: str) -> RationalFunction:
        if name in self.assignments:
            return self.assignments[name]
        if name in self.bindings:
            return self.bindings[name]
        return RationalFunction.symbol(name)

    def table(self) -> dict:
        out = {k: v.to_text() for k, v in self.bindings.items()}
        out.update({k: v.to_text() for k, v in self.assignments.items()})
        return out

    def to_json_obj(self) -> dict:
        obj = {
            "schema": 1,
            "assignments": [{"symbol": k, "value": v.to_text()} for k, v in self.assignments.items()],
            "table": {k: v.to_text() for k, v in self.assignments.items()},
            "assumptions": [a.to_text() for a in self.assumptions],
            "unresolved": [
                {"equation": e.equation, "monomial": list(e.monomial), "residual": e.poly.to_text()}
                for e in self.unresolved
            ],
            "free": list(self.free),
            "knowns": list(self.knowns),
            "bindings": {k: v.to_text() for k, v in self.bindings.items()},
            "complete": self.complete,
        }
        if self.branches:
            obj["branches"] = [b.to_json_obj() for b in self.branches]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2)

    def to_text(self) -> str:
        lines = [f"{k} = {v}" for k, v in self.table().items()]
        if self.assumptions:
            lines.append("assuming nonzero: " + ", ".join(a.to_text() for a in self.assumptions))
        for e in self.unresolved:
            lines.append(f"unresolved {e.label()}: {e.poly.to_text()} = 0")
        if self.free:
            lines.append("free: " + ", ".join(self.free))
        for i, b in enumerate(self.branches, start=1):
            lines.append(f"--- branch {i + 1}")
            lines.append(b.to_text())
        return "\n".join(lines)


def assumption_atoms(p: Polynomial) -> list:
    """Split a divisor into monomial symbols and a primitive remainder."""
    if p.is_zero():
        raise ValueError("zero divisor")
    atoms = [Polynomial.symbol(name) for name, _ in p.monomial_content()]
    rest = p.div_monomial(p.monomial_content())
    if not rest.is_constant():
        rest = rest.scale(1 / rest.content())
        if rest.leading_coefficient() < 0:
            rest = -rest
        atoms.append(rest)
    return atoms


def _primitive(p: Polynomial) -> Polynomial:
    if p.is_zero() or p.is_constant():
        return p
    c = p.content()
    return p if c == 1 else p.scale(1 / c)


class _State:
    def __init__(self, system: AlgSystem, policy: SolvePolicy):
        self.policy = policy
        self.order = {u: i for i, u in enumerate(system.unknowns)}
        self.knowns = set(system.knowns)
        self.seeds = set(system.seeds)
        self.assignments: dict = {}
        self.assumptions: list = []
        self.pending: list = [(e, _primitive(e.poly)) for e in system.equations]
        self.unresolved: list = []

    def clone(self) -> "_State":
        other = object.__new__(_State)
        other.policy = self.policy
        other.order = self.order
        other.knowns = self.knowns
        other.seeds = self.seeds
        other.assignments = dict(self.assignments)
        other.assumptions = list(self.assumptions)
        other.pending = list(self.pending)
        other.unresolved = list(self.unresolved)
        return other

    def unassigned(self, p: Polynomial) -> list:
        return sorted((s for s in p.symbols() if s in self.order and s not in self.assignments),
                      key=self.order.__getitem__)

    def divisor_ok(self, kappa: Polynomial) -> bool:
        if kappa.is_zero():
            return False
        if any(s not in self.knowns for s in kappa.symbols()):
            return False
        if not self.policy.generic_seeds and kappa.symbols() & self.seeds:
            return False
        return True

    def assume(self, divisor: Polynomial):
        for atom in assumption_atoms(divisor):
            if not any(atom == a for a in self.assumptions):
                self.assumptions.append(atom)

    def assign(self, u: str, value: RationalFunction):
        self.assignments[u] = value
        binding = {u: value}
        for name, v in self.assignments.items():
            if name != u and u in v.symbols():
                self.assignments[name] = v.subs(binding)
        still = []
        for e, p in self.pending:
            if u in p.symbols():
                p = _primitive(poly_substitute(p, binding).num)
            still.append((e, p))
        self.pending = []
        for e, p in still:
            self.file(e, p)

    def file(self, e: AlgEquation, p: Polynomial):
        if p.is_zero():
            return
        if not self.unassigned(p):
            if p.is_constant():
                raise Inconsistent(e.equation, e.monomial)
            self.unresolved.append(replace(e, poly=p))
            return
        self.pending.append((e, p))

    def triangular_pass(self) -> bool:
        progress = False
        i = 0
        while i < len(self.pending):
            e, p = self.pending[i]
            unk = self.unassigned(p)
            if len(unk) == 1:
                u = unk[0]
                coll = p.collect(u)
                if max(coll) == 1 and self.divisor_ok(coll[1]):
                    self._solve_linear(u, coll)
                    progress = True
                    i = 0
                    continue
            i += 1
        return progress

    def _solve_linear(self, u: str, coll: dict):
        kappa = coll[1]
        rest = coll.get(0, Polynomial())
        self.assume(kappa)
        self.assign(u, RationalFunction(-rest, kappa))

    def pivot(self) -> bool:
        """Solve one equation linear in some unknown whose coefficient is known."""
        best = None
        for idx, (e, p) in enumerate(self.pending):
            for u in self.unassigned(p):
                coll = p.collect(u)
                if max(coll) != 1 or not self.divisor_ok(coll[1]):
                    continue
                kappa = coll[1]
                rank = 0 if kappa.is_constant() else 1 if kappa.is_monomial() else 2
                key = (rank, idx, self.order[u])
                if best is None or key < best[0]:
                    best = (key, u, coll)
        if best is None:
            return False
        _, u, coll = best
        self._solve_linear(u, coll)
        return True

    def quadratic_candidate(self):
        for e, p in self.pending:
            unk = self.unassigned(p)
            if len(unk) != 1:
                continue
            u = unk[0]
            coll = p.collect(u)
            if max(coll) != 2 or not self.divisor_ok(coll[2]):
                continue
            a = coll[2]
            b = coll.get(1, Polynomial())
            c = coll.get(0, Polynomial())
            disc = b * b - a * c * 4
            root = disc.sqrt()
            if root is None:
                continue
            two_a = a.scale(2)
            if root.is_zero():
                return u, a, [RationalFunction(-b, two_a)]
            return u, a, [RationalFunction(-b + root, two_a), RationalFunction(-b - root, two_a)]
        return None

    def result(self, system: AlgSystem) -> SolveResult:
        free = [u for u in system.unknowns if u not in self.assignments]
        unresolved = list(self.unresolved) + [replace(e, poly=p) for e, p in self.pending]
        return SolveResult(dict(self.assignments), list(self.assumptions), unresolved, free,
                           list(system.knowns))


def _run(state: _State, system: AlgSystem, budget: list) -> list:
    """Drive elimination to a fixed point; returns the list of leaf results."""
    while True:
        if state.triangular_pass():
            continue
        if state.pivot():
            continue
        if state.policy.allow_quadratic:
            cand = state.quadratic_candidate()
            if cand is not None:
                u, a, roots = cand
                if state.policy.root_selection == "principal":
                    roots = roots[:1]
                if len(roots) > 1:
                    budget[0] += len(roots) - 1
                    if budget[0] > state.policy.max_branches:
                        raise BranchLimit(
                            f"more than {state.policy.max_branches} branches while solving for {u}"
                        )
                leaves = []
                errors = []
                for root in roots:
                    child = state.clone()
                    child.assume(a)
                    try:
                        child.assign(u, root)
                        leaves.extend(_run(child, system, budget))
                    except Inconsistent as exc:
                        errors.append(exc)
                if not leaves:
                    raise errors[0]
                return leaves
        return [state.result(system)]


def solve_system(system: AlgSystem, policy: SolvePolicy | None = None) -> SolveResult:
    """Eliminate unknowns: triangular passes, then linear pivots, then optional quadratics.

    Assignments are kept fully back-substituted, so each value depends only
    on knowns and on unknowns reported as free.  When a quadratic step
    forks, the first root's leaf is returned with the others in ``branches``.
    """
    policy = policy or SolvePolicy()
    state = _State(system, policy)
    pending, state.pending = state.pending, []
    for e, p in pending:
        state.file(e, p)
    leaves = _run(state, system, [1])
    first = leaves[0]
    first.branches = leaves[1:]
    return first


def _coerce_bindings(bindings: Mapping) -> dict:
    out = {}
    for k, v in bindings.items():
        if isinstance(v, str):
            v = parse_ratfunc(v)
        out[k] = RationalFunction.coerce(v)
    return out


def specialize(r: SolveResult, bindings: Mapping) -> SolveResult:
    """Fix seeds (or parameters) to values and simplify the result.

    Raises :class:`AssumptionViolated` if a recorded divisor vanishes.
    """
    vals = _coerce_bindings(bindings)
    unknown = [k for k in vals if k not in r.knowns]
    if unknown:
        raise KeyError(f"{unknown[0]!r} is not a seed or parameter of this result")
    assumptions = []
    for a in r.assumptions:
        v = poly_substitute(a, vals)
        if v.is_zero():
            raise AssumptionViolated(a.to_text())
        if not v.is_constant():
            for atom in assumption_atoms(v.num) + assumption_atoms(v.den):
                if not any(atom == b for b in assumptions):
                    assumptions.append(atom)
    assignments = {k: v.subs(vals) for k, v in r.assignments.items()}
    unresolved = []
    for e in r.unresolved:
        p = poly_substitute(e.poly, vals).num
        if not p.is_zero():
            unresolved.append(replace(e, poly=_primitive(p)))
    merged = dict(r.bindings)
    merged.update(vals)
    knowns = [k for k in r.knowns if k not in vals]
    branches = [specialize(b, {k: v for k, v in vals.items() if k in b.knowns}) for b in r.branches]
    return SolveResult(assignments, assumptions, unresolved, list(r.free), knowns, merged, branches)


@dataclass(frozen=True)
class EquationCheck:
    equation: int
    monomial: tuple
    residual: RationalFunction

    @property
    def ok(self) -> bool:
        return self.residual.is_zero()


@dataclass
class VerificationReport:
    checks: list

    @property
    def all_zero(self) -> bool:
        return all(c.ok for c in self.checks)

    def failing(self) -> list:
        return [c for c in self.checks if not c.ok]

    def to_json_obj(self) -> dict:
        return {
            "schema": 1,
            "all_zero": self.all_zero,
            "equations": [
                {"equation": c.equation, "monomial": list(c.monomial), "residual": c.residual.to_text(),
                 "ok": c.ok}
                for c in self.checks
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"E{c.equation}{list(c.monomial)}: " + ("ok" if c.ok else f"residual {c.residual}")
            for c in self.checks
        ]
        lines.append("all equations vanish" if self.all_zero else f"{len(self.failing())} equation(s) fail")
        return "\n".join(lines)


def verify_assignment(system: AlgSystem, candidate: Mapping) -> VerificationReport:
    """Substitute a candidate table into every equation and report residuals."""
    values = _coerce_bindings(candidate)
    missing = [u for u in system.unknowns if u not in values]
    if missing:
        raise SchemaError(f"candidate does not assign {', '.join(ordered_symbols(missing))}")
    checks = [EquationCheck(e.equation, e.monomial, poly_substitute(e.poly, values))
              for e in system.equations]
    return VerificationReport(checks)


def load_candidate(text: str) -> dict:
    """Read a candidate table from JSON: either a flat map or solver output."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"candidate is not valid JSON: {exc}") from None
    if isinstance(obj, dict) and "schema" in obj:
        if obj["schema"] != 1:
            raise SchemaError(f"unsupported schema version {obj['schema']!r}")
        if "table" in obj:
            obj = obj["table"]
        elif "assignments" in obj:
            obj = {a["symbol"]: a["value"] for a in obj["assignments"]}
    if not isinstance(obj, dict) or not all(isinstance(k, str) for k in obj):
        raise SchemaError("candidate must map symbol names to values")
    out = {}
    for k, v in obj.items():
        if not isinstance(v, (str, int)):
            raise SchemaError(f"value for {k} must be a string or integer")
        out[k] = str(v)
    return out
