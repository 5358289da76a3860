import math
from fractions import Fraction

import mpmath
import pytest
import sympy

from lgexp.algebra import PolyDerivation, RationalPoly, SymbolicDerivation
from lgexp.bounds import BoundUnavailable, make_evaluator
from lgexp.nonhomog import (
    XI,
    NonhomogBoundInputs,
    bound_thm4,
    build_G_sequence,
    build_nonhomog_model,
    eval_G_expansion,
    exact_exp_solution,
    exp_forcing_demo,
    exp_forcing_model,
    mp_evaluate,
    sup_abs,
)
from lgexp.paths import PathSpec

x = RationalPoly.identity("x")
DX = PolyDerivation.standard("x", 0)
WINDOW = PathSpec.polyline([-1, 1], 1, 1)


def test_G_sequences():
    zero = build_G_sequence(RationalPoly([], "x"), RationalPoly([], "x"), DX, 4)
    assert all(g.is_zero() for g in zero)
    c = Fraction(3)
    const = build_G_sequence(RationalPoly([c], "x"), RationalPoly([1], "x"), DX, 4)
    assert [g(0) for g in const] == [-((-c) ** s) for s in range(5)]
    G = exp_forcing_model(Fraction(1, 2), 5).G
    for s, g in enumerate(G):
        assert sympy.simplify(g + sympy.Rational(1, 4) ** s * sympy.exp(XI / 2)) == 0
    with pytest.raises(ValueError):
        build_G_sequence(x, x, DX, -1)


def test_expansion_solves_equation_to_order():
    # W_n'' - (u^2 + psi) W_n - varpi = G_n u^{-2n}
    psi, varpi = x * x, 1 + x
    model = build_nonhomog_model(psi, varpi, DX, 6)
    u = Fraction(5)
    for n in range(0, 6):
        W = RationalPoly([], "x")
        for s in range(n):
            W = W + model.G[s] * (1 / u ** (2 * s + 2))
        resid = DX(DX(W)) - (u * u + psi) * W - varpi
        assert resid == model.G[n] * (1 / u ** (2 * n))
        assert eval_G_expansion(model, u, Fraction(1, 3), n) == W(Fraction(1, 3))
    with pytest.raises(ValueError):
        eval_G_expansion(model, u, 0, 7)


def test_sup_abs():
    sup, exact = sup_abs(x * x - Fraction(1, 2), WINDOW, make_evaluator())
    assert exact and sup == 0.5
    sup, exact = sup_abs(x * (1 - x * x), WINDOW, make_evaluator())
    assert exact and sup == pytest.approx(2 / (3 * math.sqrt(3)))
    sup, exact = sup_abs(sympy.sin(XI), WINDOW, make_evaluator(XI))
    assert not exact and sup == pytest.approx(math.sin(1))


@pytest.mark.parametrize("lam", [Fraction(1, 2), Fraction(1, 5)])
def test_bound_dominates_exponential_forcing(lam):
    model = exp_forcing_model(lam, 8)
    ev = make_evaluator(XI)
    for u in (3, 6, 12):
        for n in (0, 1, 2, 3, 4):
            for xi in (-1.0, 0.0, 0.7):
                with mpmath.workdps(40):
                    exact = exact_exp_solution(lam, u, Fraction(xi)) - eval_G_expansion(model, mpmath.mpf(u), mpmath.mpf(xi), n, mp_evaluate)
                rep = bound_thm4(NonhomogBoundInputs(model, n, u, xi, WINDOW, 0, ev))
                assert rep.bound >= abs(exact)


def test_zero_potential_drops_second_term():
    model = build_nonhomog_model(RationalPoly([], "x"), 1 + x * x, DX, 4)
    rep = bound_thm4(NonhomogBoundInputs(model, 1, 4.0, 0.0, WINDOW))
    assert rep.int_abs_T == 0
    # G_1 = -2, constant: |G_1(0)| / u^4
    assert rep.bound == pytest.approx(2 / 4.0**4)


def test_shifted_form_adds_explicit_terms():
    model = exp_forcing_model(Fraction(1, 2), 8)
    ev = make_evaluator(XI)
    u, xi = 4.0, 0.25
    r0 = bound_thm4(NonhomogBoundInputs(model, 3, u, xi, WINDOW, 0, ev))
    sh = bound_thm4(NonhomogBoundInputs(model, 1, u, xi, WINDOW, 2, ev))
    head = abs(sum(ev(model.G[s], xi) / u ** (2 * s + 2) for s in (1, 2)))
    assert sh.formula_used == "thm4_shifted" and r0.formula_used == "thm4"
    assert sh.extras["head"] == pytest.approx(head, rel=1e-14)
    assert sh.bound == pytest.approx(head + r0.bound, rel=1e-14)


def test_remainder_scaling_in_u():
    model = build_nonhomog_model(x * x / 4, 1 + x, DX, 6)
    for n in (1, 2, 3):
        b1 = bound_thm4(NonhomogBoundInputs(model, n, 20.0, 0.0, WINDOW)).bound
        b2 = bound_thm4(NonhomogBoundInputs(model, n, 40.0, 0.0, WINDOW)).bound
        assert b1 / b2 == pytest.approx(2 ** (2 * n + 2), rel=0.02)


def test_condition_on_psi():
    model = build_nonhomog_model(RationalPoly([3], "x"), RationalPoly([1], "x"), DX, 3)
    with pytest.raises(BoundUnavailable):
        bound_thm4(NonhomogBoundInputs(model, 1, 2.0, 0.0, WINDOW))
    with pytest.raises(ValueError):
        NonhomogBoundInputs(model, 2, 2.0, 0.0, WINDOW, 1)
    with pytest.raises(ValueError):
        NonhomogBoundInputs(model, -1, 2.0, 0.0, WINDOW)


def test_symbolic_model_matches_polynomial_model():
    X = sympy.Symbol("X")
    sym = build_nonhomog_model(X**2, 1 + X, SymbolicDerivation(X), 3)
    poly = build_nonhomog_model(x * x, 1 + x, DX, 3)
    for a, b in zip(sym.G, poly.G):
        assert sympy.expand(a - sum(sympy.Rational(c.numerator, c.denominator) * X**k for k, c in enumerate(b.coeffs))) == 0


def test_demo_rows():
    rows = exp_forcing_demo(us=(5, 10), ns=(1, 2, 3), r=1)
    assert len(rows) == 6
    for row in rows:
        assert row.bound_r0 >= row.exact_error
        assert row.bound_shifted >= row.exact_error
        assert row.bound_r0 / row.exact_error < 2
    with pytest.raises(ValueError):
        exp_forcing_demo(xi=3.0)
