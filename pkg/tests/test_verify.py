import math
import warnings
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import burgers_tan_coefficients, kdv_sech_coefficients, tan_taylor
from pssm.errors import AssumptionViolated, OutOfDomain, SchemaError
from pssm.exact import ZERO, parse_ratfunc
from pssm.model import builtin
from pssm.solve import SolveResult, specialize
from pssm.verify import (CompareReport, DegenerateTimeFactor, EvalGrid, OracleSpec,
                         burgers_tan, burgers_time_factor, compare, eval_series,
                         first_omitted_order, frozen_x_rates, horner, kdv_sech, residual,
                         time_factor_constant)

AC7 = "AC7 property suites"


def odd_burgers(solved):
    p, _, r = solved("burgers-stationary")
    return p.ansatz_series()["U"], specialize(r, {"a_0": 0})


# ---------------------------------------------------------------- residuals

def test_residual_of_solved_table(solved):
    p, _, r = solved("burgers-stationary")
    report = residual(p, r)
    assert report.all_zero
    assert [m for _, m, _ in report.entries] == [(n,) for n in range(9)]
    assert report.max_degree == 8
    assert report.to_text().endswith("checked through total degree 8: all zero")


@pytest.mark.parametrize("name", ["boundary-layer", "burgers-stationary", "burgers-xt", "coupled-kdv", "kdv"])
def test_zero_solution_has_zero_residual(name):
    p = builtin(name)
    everything = [s for s, _, _ in p.coefficient_symbols()]
    seeds = set(p.seed_symbols())
    r = SolveResult({u: ZERO for u in everything if u not in seeds}, [], [], [],
                    bindings={s: ZERO for s in seeds})
    assert residual(p, r).all_zero


def test_coupled_table_entries_and_a_typo(solved):
    p, _, r = solved("coupled-kdv")
    table = {"b_3": "(3*a_0*b_1 + c*b_1)/(6*k^2)",
             "b_4": "(6*a_0*b_2 + 3*a_1*b_1 + 2*c*b_2)/(24*k^2)"}
    b5 = "(9*a_0*B3 + 6*a_1*b_2 + 3*a_2*b_1 + 3*c*B3)/(60*k^2)".replace("B3", f"({table['b_3']})")
    table["b_5"] = b5
    good = SolveResult({**r.assignments, **{k: parse_ratfunc(v) for k, v in table.items()}},
                       r.assumptions, [], [], r.knowns)
    assert residual(p, good).all_zero
    bad = SolveResult({**good.assignments, "b_4": parse_ratfunc(table["b_4"].replace("2*c", "3*c"))},
                      r.assumptions, [], [], r.knowns)
    report = residual(p, bad)
    named = {(i, m) for i, m, _ in report.nonzero()}
    # b_4 first enters the V equation at z^1; later it also feeds (V*W)'
    assert min(named, key=lambda im: (sum(im[1]), im[0])) == (1, (1,))


# ---------------------------------------------------------------- evaluation

def test_exact_evaluation_of_the_odd_branch(solved):
    shape, r = odd_burgers(solved)
    want = (Fraction(1, 2) + Fraction(1, 6) / 8 + Fraction(1, 30) / 32
            + Fraction(17, 2520) / 128 + Fraction(31, 22680) / 512)
    (pt, value), = eval_series(r, shape, EvalGrid({"a_1": 1, "nu": 1}, {"x": [Fraction(1, 2)]}))
    assert value == want == Fraction(6060739, 11612160)
    (_, at_zero), = eval_series(r, shape, EvalGrid({"a_1": 1, "nu": 1}, {"x": [0]}))
    assert at_zero == 0


def test_workers_give_identical_results(solved):
    p, _, r = solved("burgers-xt")
    shape = p.ansatz_series()["U"]
    binds = {"a_00": 1, "a_01": Fraction(1, 2), "a_10": -1, "a_11": 2, "nu": Fraction(3, 2)}
    grid = {"x": [Fraction(i, 10) for i in range(-5, 6)], "t": [Fraction(i, 4) for i in range(5)]}
    serial = eval_series(r, shape, EvalGrid(binds, grid))
    threaded = eval_series(r, shape, EvalGrid(binds, grid), workers=4)
    assert serial == threaded and len(serial) == 55
    floats = eval_series(r, shape, EvalGrid(binds, grid, "float64"), workers=3)
    assert all(abs(float(a[1]) - b[1]) < 1e-12 for a, b in zip(serial, floats))


def test_float_bindings(solved):
    shape, r = odd_burgers(solved)
    (_, v), = eval_series(r, shape, EvalGrid({"a_1": 0.5, "nu": 2.0}, {"x": [0.25]}, "float64"))
    assert v == pytest.approx(burgers_tan(0.5, 2.0, 0.25), abs=1e-12)


def test_evaluation_errors(solved):
    shape, r = odd_burgers(solved)
    with pytest.raises(AssumptionViolated):
        eval_series(r, shape, EvalGrid({"a_1": 1, "nu": 0}, {"x": [0]}))
    with pytest.raises(SchemaError):
        eval_series(r, shape, EvalGrid({"a_1": 1}, {"x": [0]}))
    with pytest.raises(SchemaError):
        eval_series(r, shape, EvalGrid({"a_1": 1, "nu": 1}, {"t": [0]}))
    with pytest.raises(ValueError):
        EvalGrid({}, {}, "float32")


@pytest.mark.criterion(AC7)
@settings(max_examples=300, deadline=None)
@given(st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.fractions(-9, 9, max_denominator=5),
                       max_size=12),
       st.fractions(-2, 2, max_denominator=7), st.fractions(-2, 2, max_denominator=7))
def test_horner_matches_direct_summation(coeffs, x, y):
    direct = sum((c * x ** i * y ** j for (i, j), c in coeffs.items()), Fraction(0))
    assert horner(coeffs, (x, y)) == direct


# ---------------------------------------------------------------- oracles

def derivative(f, x, n, h=1e-3):
    # central differences of order n
    if n == 1:
        return (f(x + h) - f(x - h)) / (2 * h)
    if n == 2:
        return (f(x + h) - 2 * f(x) + f(x - h)) / h ** 2
    return (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h ** 3)


@pytest.mark.parametrize("a1, nu", [(1, 1), (2, 3), (0.5, 0.25)])
def test_tan_oracle_solves_stationary_burgers(a1, nu):
    def u(x):
        return burgers_tan(a1, nu, x)
    for x in (-0.4, -0.1, 0.2, 0.45):
        lhs = u(x) * derivative(u, x, 1)
        assert lhs == pytest.approx(nu * derivative(u, x, 2), rel=1e-4, abs=1e-6)


def test_tan_oracle_finite_differences_on_the_grid():
    # h=1e-6 loses about six digits to cancellation in a second difference,
    # so U'' takes h=1e-4; U' keeps h=1e-6
    def u(x):
        return burgers_tan(1, 1, x)
    worst = 0.0
    for i in range(21):
        x = -0.5 + 0.05 * i
        u1 = derivative(u, x, 1, h=1e-6)
        u2 = derivative(u, x, 2, h=1e-4)
        worst = max(worst, abs(u(x) * u1 - u2))
    assert worst <= 1e-5


@pytest.mark.parametrize("c, k", [(1, 1), (4, 1), (2, 0.5)])
def test_sech_oracle_solves_reduced_kdv(c, k):
    def phi(z):
        return kdv_sech(c, k, z)
    for z in (-0.7, 0.0, 0.3, 1.1):
        r = -c * derivative(phi, z, 1) + k * k * derivative(phi, z, 3) + 6 * phi(z) * derivative(phi, z, 1)
        assert abs(r) < 1e-4


def test_oracle_taylor_coefficients():
    t = tan_taylor(9)
    assert t[1:10:2] == [1, Fraction(1, 3), Fraction(2, 15), Fraction(17, 315), Fraction(62, 2835)]
    a1, nu = Fraction(5), Fraction(3)
    coeffs = burgers_tan_coefficients(9, a1, nu)
    assert coeffs[1:10:2] == [a1, a1 ** 2 / (6 * nu), a1 ** 3 / (30 * nu ** 2),
                              17 * a1 ** 4 / (2520 * nu ** 3), 31 * a1 ** 5 / (22680 * nu ** 4)]
    c = Fraction(3)
    s = kdv_sech_coefficients(4, c)
    assert (s[0], s[2], s[4]) == (c / 2, -c ** 2 / 8, c ** 3 / 48)
    a0, a2, k = c / 2, -c ** 2 / 8, 1
    assert -(6 * a0 * a2 - c * a2) / (12 * k ** 2) == c ** 3 / 48


def test_oracle_domains():
    with pytest.raises(OutOfDomain):
        burgers_tan(-1, 1, 0.1)
    with pytest.raises(OutOfDomain):
        burgers_tan(1, 1, 2.5)
    with pytest.raises(OutOfDomain):
        kdv_sech(0, 1, 0.0)
    with pytest.raises(OutOfDomain):
        burgers_time_factor(1.0, -1.0, 1.0, 0.0)
    with pytest.raises(OutOfDomain):
        time_factor_constant(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        OracleSpec("airy")


def test_time_factor():
    alpha, beta = 0.7, 1.3
    C = time_factor_constant(alpha, beta, 0.4)
    assert burgers_time_factor(alpha, beta, C, 0.0) == pytest.approx(0.4)
    assert burgers_time_factor(alpha, beta, C, 60.0) == pytest.approx(alpha / beta)
    with pytest.warns(DegenerateTimeFactor):
        burgers_time_factor(0.0, beta, C, 1.0)


def test_frozen_x_rates(solved):
    shape, r = odd_burgers(solved)
    alpha, beta = frozen_x_rates(r, shape, {"a_1": 1, "nu": 1}, 0.3, 1)

    def u(x):
        return burgers_tan(1, 1, x)
    assert beta == pytest.approx(derivative(u, 0.3, 1), rel=1e-5)
    assert alpha == pytest.approx(derivative(u, 0.3, 2) / u(0.3), rel=1e-5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert burgers_time_factor(alpha, beta, 1.0, 0.5) > 0


# ---------------------------------------------------------------- comparison

def test_truncation_error_scales_with_the_first_omitted_power(solved):
    shape, r = odd_burgers(solved)
    o = OracleSpec("burgers_tan", {"a1": 1, "nu": 1})
    report = compare(r, o, shape, EvalGrid({"a_1": 1, "nu": 1}, {"x": [0.2, 0.4]}, "float64"))
    small, large = (row[3] for row in report.rows)
    assert 2 ** 9 <= large / small <= 2 ** 13
    assert report.first_omitted_order == 11


def test_compare_at_origin_and_csv(solved):
    shape, r = odd_burgers(solved)
    report = compare(r, OracleSpec("burgers_tan", {"a1": 1, "nu": 1}), shape,
                     EvalGrid({"a_1": 1, "nu": 1}, {"x": [0]}, "float64"))
    assert report.max_abs_error == 0.0
    assert report.to_csv(["x"]) == "x,series,oracle,abserr\n0.0,0.0,0.0,0.0\n"
    assert CompareReport([], 1).max_abs_error == 0.0


def test_missing_oracle_parameter(solved):
    shape, r = odd_burgers(solved)
    with pytest.raises(SchemaError):
        compare(r, OracleSpec("burgers_tan", {"a1": 1}), shape, EvalGrid({"a_1": 1, "nu": 1}, {"x": [0.1]}))


def test_first_omitted_order_for_parity_shapes():
    assert first_omitted_order(builtin("kdv-even").ansatz_series()["U"]) == 10
    assert first_omitted_order(builtin("kdv").ansatz_series()["U"]) == 9
    assert math.isfinite(first_omitted_order(builtin("burgers-xt").ansatz_series()["U"]))
