"""Built-in problems shipped as DSL files."""
from __future__ import annotations

from importlib import resources

from ..errors import UnknownProblem
from .dsl import parse_problem
from .problem import ProblemSpec

_SUFFIX = ".pde"


def builtin_names() -> list:
    files = resources.files(__package__).joinpath("problems")
    return sorted(f.name[: -len(_SUFFIX)] for f in files.iterdir() if f.name.endswith(_SUFFIX))


def builtin_source(name: str) -> str:
    if name not in builtin_names():
        known = ", ".join(builtin_names())
        raise UnknownProblem(f"unknown problem {name!r}; available: {known}")
    return resources.files(__package__).joinpath("problems", name + _SUFFIX).read_text()


def builtin(name: str) -> ProblemSpec:
    return parse_problem(builtin_source(name))
