"""Modified Bessel functions I_nu(nu z), K_nu(nu z) of large order.

With ``p = (1 + z^2)^(-1/2)`` and ``xi = (1+z^2)^(1/2) + ln{z / (1 + (1+z^2)^(1/2))}``
the normal-form potential is ``psi = p^2 (1 - p^2)(5p^2 - 1) / 4`` and
``d/dxi = -p^2 (1 - p^2) d/dp``.  Every coefficient ``F_s`` is a polynomial
in ``p`` divisible by ``p^2 (1 - p^2)``, so all bound integrals reduce to
integrals of ``|polynomial|`` in ``q`` and are evaluated exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mp

from . import oracle
from .algebra import PolyDerivation, RationalPoly, exact_div
from .bounds import BoundReport, check_order_guard, kappa_value, round_up, thm2_value_mp
from .coefficients import CoefficientTable, build_coefficients, chi_decomposition
from .paths import unit_integrator

P = RationalPoly.identity("p")
WEIGHT = P * P * (1 - P * P)  # p^2 (1 - p^2)


class OraclePrecisionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class BesselModel:
    """Exact coefficient data for the Bessel model.

    ``Ftilde[s]``, ``Etilde[s]``, ``k[s]`` and ``W[s] = Ftilde[s] / (p^2 (1-p^2))``
    are indexed by ``s = 1..N``; index 0 holds zero.
    """

    nu: float
    N: int
    table: CoefficientTable
    Ftilde: tuple
    Etilde: tuple
    k: tuple
    W: tuple

    def with_nu(self, nu) -> BesselModel:
        return BesselModel(nu, self.N, self.table, self.Ftilde, self.Etilde, self.k, self.W)

    def G_weighted(self, m: int, s: int) -> RationalPoly:
        """``G_{m,s} / (p^2 (1-p^2))``."""
        return _G_weighted(self.N, m, s)


def bessel_psi() -> RationalPoly:
    return Fraction(1, 4) * P * P * (1 - P * P) * (5 * P * P - 1)


def bessel_derivation() -> PolyDerivation:
    # d/dxi = -p^2(1-p^2) d/dp; E_s anchored at p = 0 (z = infinity)
    return PolyDerivation(-WEIGHT, Fraction(0))


@lru_cache(maxsize=16)
def _exact_part(N: int):
    table = build_coefficients(bessel_psi(), bessel_derivation(), N, model_tag="bessel")
    F = table.F
    E = table.E
    k = tuple(e(Fraction(1)) for e in E)
    W = (RationalPoly([0], "p"),) + tuple(exact_div(F[s], WEIGHT) for s in range(1, N + 1))
    return table, F, E, k, W


@lru_cache(maxsize=512)
def _G_weighted(N: int, m: int, s: int) -> RationalPoly:
    table = _exact_part(N)[0]
    return exact_div(chi_decomposition(table, m).G(s), WEIGHT)


def build_bessel_model(nu, N: int) -> BesselModel:
    if N < 1:
        raise ValueError(f"N >= 1 required (got {N})")
    if not nu > 0:
        raise ValueError(f"nu must be real and positive (got {nu})")
    table, F, E, k, W = _exact_part(N)
    return BesselModel(nu, N, table, F, E, k, W)


# the z <-> p <-> xi maps --------------------------------------------------


def _check_z(z):
    if not z > 0:
        raise ValueError(f"z must be positive (got {z})")


def xi_of_z(z: float) -> float:
    """``xi(z)`` written as ``s - log1p((1 + 1/(s+z))/z)``, ``s = sqrt(1+z^2)``, stable at both ends."""
    _check_z(z)
    s = math.hypot(1.0, z)
    return s - math.log1p((1.0 + 1.0 / (s + z)) / z)


def to_mp(x):
    """Exact mp value of a decimal-looking input (``0.1`` means one tenth)."""
    if isinstance(x, mpmath.mpf):
        return x
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(repr(x) if isinstance(x, float) else str(x))


def xi_of_z_mp(z):
    z = to_mp(z)
    _check_z(z)
    s = mpmath.sqrt(1 + z * z)
    return s - mpmath.log1p((1 + 1 / (s + z)) / z)


def p_of_z(z: float) -> float:
    _check_z(z)
    return 1.0 / math.hypot(1.0, z)


def p_of_z_mp(z):
    z = to_mp(z)
    _check_z(z)
    return 1 / mpmath.sqrt(1 + z * z)


def z_of_xi(xi: float) -> float:
    """Inverse of ``xi_of_z`` by Newton's method in ``ln z`` (``dxi/dz = sqrt(1+z^2)/z``)."""
    lz = xi - 1.0 + math.log(2.0) if xi < 1.0 else math.log(max(xi, 1e-300))
    if lz < -700.0:
        # xi = ln(z/2) + 1 + O(z^2): the start value is already exact
        return math.exp(lz)
    for _ in range(100):
        z = math.exp(lz)
        step = (xi_of_z(z) - xi) / math.hypot(1.0, z)
        lz -= step
        if abs(step) < 1e-15:
            break
    return math.exp(lz)


def p_of_xi(xi: float) -> float:
    z = z_of_xi(xi)
    return 1.0 if z == 0.0 else p_of_z(z)


def _mp_to_fraction(x) -> Fraction:
    man, exp = x.man, x.exp
    sign = -1 if x < 0 else 1
    man = abs(int(man))
    return sign * (Fraction(man) * (Fraction(2) ** exp))


def p_fraction(z, digits: int = 40) -> Fraction:
    """Rational approximation of ``p(z)`` with relative error below ``10^-digits``."""
    with mp.workdps(digits + 5):
        return _mp_to_fraction(p_of_z_mp(z))


@dataclass(frozen=True)
class BesselPoint:
    z: float
    p: float
    xi: float

    @classmethod
    def at(cls, z: float) -> BesselPoint:
        return cls(z, p_of_z(z), xi_of_z(z))


# the expansions -------------------------------------------------------------


def _nu_mp(model: BesselModel):
    return to_mp(model.nu)


def _eval_E(model: BesselModel, s: int, p):
    return model.Etilde[s].eval_mp(p)


def _k_mp(model: BesselModel, s: int):
    k = model.k[s]
    return mpmath.mpf(k.numerator) / k.denominator


def _check_order(model: BesselModel, n: int):
    if not 1 <= n <= model.N:
        raise ValueError(f"order n must satisfy 1 <= n <= N={model.N} (got {n})")


def log_I_expansion(model: BesselModel, z, n: int):
    """``ln`` of the I-approximant, accumulated before any exponentiation."""
    _check_order(model, n)
    nu = _nu_mp(model)
    zz = to_mp(z)
    p = p_of_z_mp(zz)
    acc = nu * mpmath.log(nu) - nu - oracle.ln_gamma(nu + 1, mp.dps) - mpmath.log1p(zz * zz) / 4
    acc += nu * xi_of_z_mp(zz)
    for s in range(1, n):
        acc += (_eval_E(model, s, p) - _k_mp(model, s)) / nu**s
    return acc


def log_K_expansion(model: BesselModel, z, n: int):
    _check_order(model, n)
    nu = _nu_mp(model)
    zz = to_mp(z)
    p = p_of_z_mp(zz)
    acc = mpmath.log(mpmath.pi / (2 * nu)) / 2 - mpmath.log1p(zz * zz) / 4 - nu * xi_of_z_mp(zz)
    for s in range(1, n):
        acc += (-1) ** s * _eval_E(model, s, p) / nu**s
    return acc


def eval_I_expansion(model: BesselModel, z, n: int, digits: int | None = None):
    digits = oracle.default_digits() if digits is None else digits
    with mp.workdps(digits + oracle.GUARD_DIGITS):
        return mpmath.exp(log_I_expansion(model, z, n))


def eval_K_expansion(model: BesselModel, z, n: int, digits: int | None = None):
    digits = oracle.default_digits() if digits is None else digits
    with mp.workdps(digits + oracle.GUARD_DIGITS):
        return mpmath.exp(log_K_expansion(model, z, n))


def _which(which: str) -> str:
    w = which.upper()
    if w not in ("I", "K"):
        raise ValueError(f"which must be 'I' or 'K' (got {which!r})")
    return w


def eta_exact(model: BesselModel, z, n: int, which: str = "I", digits: int | None = None) -> float:
    """``oracle / approximant - 1`` (signed), with a check that it is resolved to 8 digits."""
    w = _which(which)
    digits = oracle.default_digits() if digits is None else digits
    if digits < 20:
        raise OraclePrecisionError(f"oracle precision insufficient: need at least 20 digits (got {digits})")
    with mp.workdps(digits + oracle.GUARD_DIGITS):
        nu = _nu_mp(model)
        x = nu * to_mp(z)
        if w == "I":
            exact = oracle.bessel_I(nu, x, digits)
            log_approx = log_I_expansion(model, z, n)
        else:
            exact = oracle.bessel_K(nu, x, digits)
            log_approx = log_K_expansion(model, z, n)
        log_exact = mpmath.log(exact)
        eta = mpmath.expm1(log_exact - log_approx)
        # the logs carry ~digits significant digits; their difference is only
        # good to about 10^-digits * max|log|
        resolution = mpmath.mpf(10) ** (-digits) * max(1, abs(log_exact))
        if eta != 0 and abs(eta) < resolution * 10**8:
            raise OraclePrecisionError(
                f"oracle precision insufficient: |eta| = {mpmath.nstr(abs(eta), 3)} is not resolved to "
                f"8 digits with {digits} working digits"
            )
        return float(eta)


# bounds ---------------------------------------------------------------------


def _interval(which: str, p: Fraction) -> tuple[Fraction, Fraction]:
    return (p, Fraction(1)) if which == "I" else (Fraction(0), p)


def _int_abs(poly: RationalPoly, a: Fraction, b: Fraction) -> float:
    return float(unit_integrator(poly)(a, b))


def bessel_integrals(model: BesselModel, p: Fraction, m: int, which: str, mode: str = "majorant") -> tuple[float, float]:
    """``(int |chi_m dxi|, int |T_m dxi|)`` over the branch's q-interval.

    ``majorant`` gives ``omega`` and ``varpi / 4``; ``direct`` integrates
    ``|chi_m|`` and ``|T_m|`` themselves (exact for rational ``nu``).
    """
    w = _which(which)
    a, b = _interval(w, p)
    nu = Fraction(model.nu)
    if mode == "majorant":
        omega = 2 * _int_abs(model.W[m], a, b)
        for s in range(1, m):
            omega += _int_abs(model.G_weighted(m, s), a, b) / float(nu) ** s
        T = sum(_int_abs(model.W[s + 1], a, b) / float(nu) ** s for s in range(0, m - 1))
        return omega, T
    if mode != "direct":
        raise ValueError("mode must be 'majorant' or 'direct'")
    ue = nu if w == "I" else -nu
    chi = 2 * model.W[m]
    for s in range(1, m):
        chi = chi - model.G_weighted(m, s) * (1 / ue**s)
    T = RationalPoly([0], "p")
    for s in range(0, m - 1):
        T = T + model.W[s + 1] * (1 / ue**s)
    return _int_abs(chi, a, b), (_int_abs(T, a, b) if m >= 2 else 0.0)


def tail_sum(model: BesselModel, z, n: int, r: int, which: str):
    """``sum_{s=n}^{n+r-1}`` of ``(E_s(p) - k_s)/nu^s`` (I) or ``(-1)^s E_s(p)/nu^s`` (K), as mpf."""
    w = _which(which)
    with mp.workdps(40):
        nu = _nu_mp(model)
        p = p_of_z_mp(z)
        acc = mpmath.mpf(0)
        for s in range(n, n + r):
            if w == "I":
                acc += (_eval_E(model, s, p) - _k_mp(model, s)) / nu**s
            else:
                acc += (-1) ** s * _eval_E(model, s, p) / nu**s
        return acc


def _bound(model: BesselModel, z, n: int, r: int, which: str, mode: str, series_majorant: bool) -> BoundReport:
    w = _which(which)
    _check_z(z)
    if n < 1 or r < 0:
        raise ValueError(f"n >= 1 and r >= 0 required (got n={n}, r={r})")
    if n + r > model.N:
        raise ValueError(f"order n+r={n + r} exceeds the model size N={model.N}")
    m = n + r
    p = p_fraction(z)
    int_chi, int_T = bessel_integrals(model, p, m, w, mode)
    nu = float(model.nu)
    j = 1 if w == "I" else 2
    if r == 0:
        value = round_up(kappa_value(m, nu, int_chi, int_T))
        head, tail = 0.0, 0.0
        formula = f"thm1_eps{j}"
    else:
        check_order_guard(n, r, nu)
        tail_mp = tail_sum(model, z, n, r, w)
        value, head = thm2_value_mp(m, nu, int_chi, int_T, tail_mp, series_majorant)
        tail = float(tail_mp)
        formula = f"thm2_eps{j}"
    return BoundReport(
        bound=value,
        formula_used=formula,
        int_abs_chi=int_chi,
        int_abs_T=int_T,
        tail_sum=tail,
        extras={"n": n, "r": r, "z": z, "nu": model.nu, "branch": w, "head": head, "mode": mode},
    )


def bound_I(model: BesselModel, z, n: int, r: int = 0, mode: str = "majorant", series_majorant: bool = False) -> BoundReport:
    """Relative-error bound for the I-expansion; integrals over ``q in [p, 1]``."""
    return _bound(model, z, n, r, "I", mode, series_majorant)


def bound_K(model: BesselModel, z, n: int, r: int = 0, mode: str = "majorant", series_majorant: bool = False) -> BoundReport:
    """Relative-error bound for the K-expansion; integrals over ``q in [0, p]``."""
    return _bound(model, z, n, r, "K", mode, series_majorant)


# diagnostics ----------------------------------------------------------------


def _p_arg(p):
    if isinstance(p, (int, Fraction)):
        p = Fraction(p)
    else:
        p = Fraction(float(p))
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1] (got {p})")
    return p


def phi_diag(model: BesselModel, nu, n: int, p) -> float:
    """``|E_n(p) - k_n| / nu^n``."""
    _check_order(model, n)
    p = _p_arg(p)
    return float(abs(model.Etilde[n](p) - model.k[n])) / float(nu) ** n


def omega_diag(model: BesselModel, nu, n: int, p) -> float:
    """``(2 / nu^n) int_p^1 |W_n(q)| dq``."""
    _check_order(model, n)
    p = _p_arg(p)
    return 2 * float(unit_integrator(model.W[n])(p, 1)) / float(nu) ** n


DIAGNOSTICS = ("phi", "omega", "ratio")


def sample_grid(samples: int) -> list[Fraction]:
    """``samples`` equally spaced interior points of (0, 1)."""
    if samples < 1:
        raise ValueError(f"samples >= 1 required (got {samples})")
    return [Fraction(i, samples + 1) for i in range(1, samples + 1)]


def figure_samples(model: BesselModel, nu, n: int, diag: str, samples: int = 512) -> list[tuple[float, float]]:
    if diag not in DIAGNOSTICS:
        raise ValueError(f"diag must be one of {', '.join(DIAGNOSTICS)} (got {diag!r})")
    out = []
    for p in sample_grid(samples):
        if diag == "phi":
            v = phi_diag(model, nu, n, p)
        elif diag == "omega":
            v = omega_diag(model, nu, n, p)
        else:
            om = omega_diag(model, nu, n, p)
            v = phi_diag(model, nu, n, p) / om if om else 0.0
        out.append((float(p), v))
    return out


# tables ---------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    z: float
    eta_abs: float
    bound: float
    formula: str


def reproduce_table(nu, n: int, r: int, z_list, which: str = "I", digits: int | None = None, mode: str = "majorant") -> list[TableRow]:
    model = build_bessel_model(nu, max(n + r, n))
    rows = []
    for z in z_list:
        eta = eta_exact(model, z, n, which, digits)
        rep = _bound(model, z, n, r, _which(which), mode, False)
        rows.append(TableRow(z, abs(eta), rep.bound, rep.formula_used))
    return rows


def check_convergence_conditions(m, p_exp, g0, at: str) -> bool:
    """Integrability of the error-control function at an endpoint.

    ``f ~ z^m`` and ``g ~ g0 z^p_exp`` near infinity (``at="infinity"``) or
    near a pole at the origin (``at="pole"``, with ``f ~ z^-m``, ``g ~ g0 z^-p_exp``).
    """
    if at == "infinity":
        return (m > -2 and p_exp < m / 2 - 1) or (m == -2 and p_exp == -2 and g0 == Fraction(-1, 4))
    if at == "pole":
        return (m > 2 and 0 <= p_exp < m / 2 + 1) or (m == 2 and p_exp == 2 and g0 == Fraction(-1, 4))
    raise ValueError(f"at must be 'infinity' or 'pole' (got {at!r})")
