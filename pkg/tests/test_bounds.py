import json
import math
from fractions import Fraction

import pytest
import sympy

from lgexp.algebra import PolyDerivation, RationalPoly, SymbolicDerivation
from lgexp.bessel import bound_I, bound_K, build_bessel_model, p_of_xi, xi_of_z
from lgexp.bounds import (
    BoundInputs,
    BoundReport,
    BoundUnavailable,
    abs_expm1,
    bound_delta_exponent,
    bound_eta_derivative,
    bound_kappa,
    bound_thm1,
    bound_thm2,
    bound_thm3,
    check_order_guard,
    kappa_value,
    phi_constants,
    round_up,
    tail_exponent,
    thm2_value,
)
from lgexp.coefficients import build_coefficients, build_coefficients_general
from lgexp.paths import Arc, PathSpec, UncertifiedPath

x = RationalPoly.identity("x")
DX = PolyDerivation.standard("x", 0)
BUMP = (1 - x * x) * Fraction(3, 2)  # psi on the window [-1, 1]


def window_inputs(psi, n, u, r=0, mode="direct", **kw):
    table = build_coefficients(psi, DX, n + r + 1)
    return BoundInputs(table, n, u, PathSpec.polyline([-1, 1], u, 1), r=r, mode=mode, **kw)


def test_zero_potential_gives_zero():
    inp = window_inputs(RationalPoly([], "x"), 3, 5.0)
    rep = bound_thm1(inp)
    assert rep.bound == 0 and rep.int_abs_chi == 0 and rep.int_abs_T == 0
    assert bound_kappa(inp) == 0


def test_first_order_formula():
    # n = 1: chi_1 = 2 F_1 = psi and T_1 = 0
    u = 7.0
    rep = bound_thm1(window_inputs(BUMP, 1, u))
    assert rep.int_abs_T == 0
    assert rep.int_abs_chi == pytest.approx(2.0, rel=1e-12)
    a = 2.0 / u
    assert rep.bound == pytest.approx(a * math.exp(a), rel=1e-12)
    assert rep.formula_used == "thm1_eps1"
    assert rep.prefactor == pytest.approx(math.exp(u))


def test_kappa_equals_first_bound():
    inp = window_inputs(BUMP, 3, 6.0)
    assert bound_kappa(inp) == bound_thm1(inp).bound


def test_thm2_with_r0_equals_thm1():
    for mode in ("direct", "majorant"):
        inp = window_inputs(BUMP, 3, 6.0, mode=mode)
        assert bound_thm2(inp).bound == bound_thm1(inp).bound


def test_majorant_dominates_direct():
    for n in (1, 2, 3, 4):
        for u in (3.0, 10.0, -8.0 + 1j):
            d = window_inputs(BUMP, n, u, certify=False)
            m = window_inputs(BUMP, n, u, mode="majorant", certify=False)
            assert bound_thm1(m).bound >= bound_thm1(d).bound * (1 - 1e-12)


def test_input_validation():
    with pytest.raises(ValueError):
        window_inputs(BUMP, 0, 2.0)
    table = build_coefficients(BUMP, DX, 3)
    with pytest.raises(ValueError):
        BoundInputs(table, 3, 2.0, PathSpec.polyline([-1, 1], 2, 1), r=1)
    with pytest.raises(ValueError):
        BoundInputs(table, 2, 0, PathSpec.polyline([-1, 1], 2, 1))
    with pytest.raises(ValueError):
        bound_thm1(BoundInputs(table, 1, 2.0, PathSpec.polyline([-1, 1], 2, 1), r=1))
    with pytest.raises(UncertifiedPath):
        bound_thm1(BoundInputs(table, 2, 2.0, PathSpec.polyline([1, -1], 2, 1)))
    with pytest.raises(ValueError):
        bound_thm2(BoundInputs(table, 2, 2.0, PathSpec.polyline([-1, 1], 2, 1), r=1, E_diff=[]))


def test_delta_exponent():
    assert bound_delta_exponent(0.5) == pytest.approx(math.log(2))
    assert bound_delta_exponent(0.0) == 0.0
    with pytest.raises(BoundUnavailable):
        bound_delta_exponent(1.0)
    with pytest.raises(ValueError):
        bound_delta_exponent(-0.1)


def test_eta_derivative():
    assert bound_eta_derivative(0.1, 10.0, 0.0) == pytest.approx(-math.log(0.9))
    assert bound_eta_derivative(0.1, 10.0, 5.0) == pytest.approx(-math.log(1 - 105 / 95 * 0.1))
    # sigma' enters with the branch sign
    a = bound_eta_derivative(0.01, 10.0, 5.0, 1.0, 3.0, j=1)
    b = bound_eta_derivative(0.01, 10.0, 5.0, 1.0, 3.0, j=2)
    assert a == pytest.approx(-math.log(1 - 135 / 65 * 0.01))
    assert b == pytest.approx(-math.log(1 - 125 / 75 * 0.01))
    with pytest.raises(BoundUnavailable):
        bound_eta_derivative(0.1, 1.0, 5.0)
    with pytest.raises(BoundUnavailable):
        bound_eta_derivative(0.95, 10.0, 5.0)
    with pytest.raises(ValueError):
        bound_eta_derivative(0.1, 10.0, 0.0, sigma=0)


def test_scalar_kernels():
    assert kappa_value(2, 10.0, 3.0, 0.0) == pytest.approx(0.03 * math.exp(0.03))
    assert abs_expm1(1e-20) == 1e-20
    assert abs_expm1(1j * math.pi) == pytest.approx(2.0)
    assert abs_expm1(-0.5, series_majorant=True) == pytest.approx(math.expm1(0.5))
    value, head = thm2_value(3, 10.0, 1.0, 0.5, 0.01)
    assert head == pytest.approx(math.expm1(0.01))
    assert value == pytest.approx(head + 1e-3 * math.exp(0.2 + 1e-3 + 0.01))
    assert round_up(Fraction(1, 3)) >= Fraction(1, 3)
    assert round_up(0.5) == 0.5
    assert tail_exponent([2.0, 4.0], 1, 2.0, 2) == pytest.approx(-1 + 1)


def test_report_validation_and_json():
    with pytest.raises(BoundUnavailable):
        BoundReport(math.inf, "kappa")
    with pytest.raises(BoundUnavailable):
        BoundReport(-1.0, "kappa")
    rep = BoundReport(0.5, "thm1_eps1", prefactor=4.0, extras={"n": 2})
    assert rep.absolute == 2.0
    obj = json.loads(rep.dumps())
    assert obj["n"] == 2 and obj["formula_used"] == "thm1_eps1"


def test_order_guard_warns():
    with pytest.warns(RuntimeWarning):
        assert not check_order_guard(5, 3, 6.5)
    assert check_order_guard(2, 3, 6.5)
    assert check_order_guard(5, 3, 2.0, n0=8)


def test_shifted_bound_on_window():
    table = build_coefficients(BUMP, DX, 6)
    path = PathSpec.polyline([-1, 1], 8.0, 1)
    ediff = [table.E[s](Fraction(1)) - table.E[s](Fraction(-1)) for s in (2, 3)]
    rep = bound_thm2(BoundInputs(table, 2, 8.0, path, r=2, E_diff=[float(e) for e in ediff]))
    assert rep.formula_used == "thm2_eps1"
    assert rep.extras["head"] == pytest.approx(abs_expm1(tail_exponent([float(e) for e in ediff], 2, 8.0, 1)))
    assert rep.bound > rep.extras["head"]


# Bessel model through the general path machinery ----------------------------


def _ray(xi, j):
    # (-inf, xi] for the I branch, [xi, +inf) traversed inwards for K
    if j == 1:
        point = lambda s: xi - (1 - s) / s if s > 0 else -math.inf  # noqa: E731
        return Arc(-math.inf, xi, point=point, derivative=lambda s: 1 / (s * s))
    point = lambda s: xi + (1 - s) / s if s > 0 else math.inf  # noqa: E731
    return Arc(math.inf, xi, point=point, derivative=lambda s: -1 / (s * s))


@pytest.mark.parametrize("z,n,j", [(0.5, 2, 1), (2.0, 3, 1), (1.0, 3, 2), (5.0, 2, 2)])
def test_general_path_matches_bessel_route(z, n, j):
    nu = 10
    model = build_bessel_model(nu, n)
    xi = xi_of_z(z)
    path = PathSpec((_ray(xi, j),), nu, j)

    def ev(poly, t):
        return poly(p_of_xi(t.real))

    rep = bound_thm1(BoundInputs(model.table, n, nu, path, evaluate=ev, rel_tol=1e-11))
    ref = (bound_I if j == 1 else bound_K)(model, z, n, mode="direct")
    assert rep.int_abs_chi == pytest.approx(ref.int_abs_chi, rel=1e-6)
    assert rep.int_abs_T == pytest.approx(ref.int_abs_T, rel=1e-6, abs=1e-14)
    assert rep.bound == pytest.approx(ref.bound, rel=1e-6)


# u-dependent leading term ---------------------------------------------------


def test_thm3_reduces_to_thm1_when_phi_vanishes():
    u = 6.0
    path = PathSpec.polyline([-1, 1], u, 1)
    gen = build_coefficients_general(RationalPoly([], "x"), [BUMP], DX, 4, 1)
    plain = build_coefficients(BUMP, DX, 4)
    for n in (1, 2, 3):
        r3 = bound_thm3(gen, n, u, path, lambda t: 0.0, lambda t: 0.0)
        r1 = bound_thm1(BoundInputs(plain, n, u, path))
        assert r3.extras["kappa0"] == 1.0 and r3.extras["kappa2"] == 0.0
        assert r3.bound == pytest.approx(r1.bound, rel=1e-12)


def test_phi_constants_for_constant_phi():
    path = PathSpec.polyline([-1, 1], 10, 1)
    k0, k2 = phi_constants(path, lambda t: 2.0, 10)
    assert k0 == pytest.approx(1 / 1.1) and k2 == 2.0
    with pytest.raises(BoundUnavailable):
        phi_constants(path, lambda t: -20.0, 10)


def test_thm3_constant_phi():
    xi = sympy.Symbol("xi")
    psi0 = sympy.Rational(3, 2) * (1 - xi**2)
    u = 10.0
    gen = build_coefficients_general(sympy.Integer(2), [psi0], SymbolicDerivation(xi), 4, 1)
    path = PathSpec.polyline([-1, 1], u, 1)
    rep = bound_thm3(gen, 2, u, path, lambda t: 2.0, lambda t: 0.0, evaluate=None)
    assert rep.extras["kappa0"] == pytest.approx(1 / 1.1)
    assert rep.extras["int_abs_phi_prime"] == 0
    a = rep.extras["kappa0"] * rep.int_abs_chi / u**2
    k0 = rep.extras["kappa0"]
    expected = a * math.exp((2 + 2 * k0 + k0 * 2 / u) * rep.int_abs_T / u + a)
    assert rep.bound == pytest.approx(expected, rel=1e-12)


def test_thm3_checks():
    gen = build_coefficients_general(RationalPoly([], "x"), [BUMP], DX, 3, -1)
    with pytest.raises(ValueError):
        bound_thm3(gen, 2, 5.0, PathSpec.polyline([-1, 1], 5, 1), lambda t: 0.0, lambda t: 0.0)
    with pytest.raises(ValueError):
        bound_thm3(build_coefficients(BUMP, DX, 3), 2, 5.0, PathSpec.polyline([-1, 1], 5, 1), lambda t: 0.0, lambda t: 0.0)
    up = build_coefficients_general(RationalPoly([], "x"), [BUMP], DX, 3, 1)
    with pytest.raises(UncertifiedPath):
        bound_thm3(up, 2, 5.0, PathSpec.polyline([-1, 1], 5, 1), lambda t: 0.0, lambda t: 0.0, E0=lambda t: -20 * t)
