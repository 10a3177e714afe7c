"""Problem descriptions: expression trees, the DSL and built-in problems."""
from .ast import (Const, Deriv, Expr, FuncRef, Negate, Param, Power, Product,
                  Sum, canon)
from .dsl import (format_expr, format_problem, parse_expr, parse_problem, parse_seeds,
                  parse_support)
from .library import builtin, builtin_names, builtin_source
from .problem import ProblemSpec, Unknown, WaveReduction
from .wave import reduce_equations, traveling_wave_reduce

__all__ = [
    "Const", "Deriv", "Expr", "FuncRef", "Negate", "Param", "Power", "Product", "Sum",
    "canon", "format_expr", "format_problem", "parse_expr", "parse_problem", "parse_seeds",
    "parse_support",
    "builtin", "builtin_names", "builtin_source",
    "ProblemSpec", "Unknown", "WaveReduction", "reduce_equations", "traveling_wave_reduce",
]
