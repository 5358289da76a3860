"""Computable error bounds for the exponential-form LG expansion.

Branch ``j = 1`` is the solution ``exp{u xi + ...}`` recessive at ``alpha_1``
(``Re(u alpha_1) = -inf``); ``j = 2`` is ``exp{-u xi + ...}``.  Bounds are
reported in relative form: ``|eps| <= |e^{±u xi}| * bound``, with the
prefactor kept in ``BoundReport.prefactor`` when ``xi`` is known.
"""
from __future__ import annotations

import cmath
import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Sequence

from .coefficients import CoefficientTable, chi_decomposition, chi_series_general
from .paths import PathSpec, certify_progressive, integrate_abs, require_certified, UncertifiedPath

FORMULAS = ("thm1_eps1", "thm1_eps2", "thm2_eps1", "thm2_eps2", "thm3", "kappa", "eta_deriv", "delta_exp")


class BoundUnavailable(ArithmeticError):
    """The bound cannot be formed (|u| too small for the stated condition)."""


@dataclass(frozen=True)
class BoundReport:
    bound: float
    formula_used: str
    int_abs_chi: float = 0.0
    int_abs_T: float = 0.0
    tail_sum: float = 0.0
    prefactor: float | None = None
    extras: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.bound >= 0 and math.isfinite(self.bound)):
            raise BoundUnavailable(f"bound must be finite and nonnegative (got {self.bound})")

    @property
    def absolute(self) -> float | None:
        return None if self.prefactor is None else self.prefactor * self.bound

    def to_json(self) -> dict:
        out = {
            "bound": self.bound,
            "formula_used": self.formula_used,
            "int_abs_chi": self.int_abs_chi,
            "int_abs_T": self.int_abs_T,
            "tail_sum": self.tail_sum,
            "prefactor": self.prefactor,
        }
        out.update(self.extras)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


# scalar kernels -------------------------------------------------------------


def kappa_value(n: int, abs_u: float, int_chi: float, int_T: float) -> float:
    """``|u|^-n I_chi exp{4 I_T/|u| + |u|^-n I_chi}``."""
    a = int_chi / abs_u**n
    return a * math.exp(4.0 * int_T / abs_u + a)


def abs_expm1(z: complex, series_majorant: bool = False) -> float:
    """``|e^z - 1|``, or its majorant ``e^{|z|} - 1`` (the full power series in ``|z|``)."""
    if series_majorant:
        return math.expm1(abs(z))
    z = complex(z)
    if z.imag == 0:
        return abs(math.expm1(z.real))
    # e^z - 1 = expm1(x) cos y - 2 sin^2(y/2) + i e^x sin y
    x, y = z.real, z.imag
    re = math.expm1(x) * math.cos(y) - 2.0 * math.sin(y / 2) ** 2
    im = math.exp(x) * math.sin(y)
    return math.hypot(re, im)


def thm2_value(
    m: int, abs_u: float, int_chi: float, int_T: float, tail: complex, series_majorant: bool = False
) -> tuple[float, float]:
    """Shifted-order bound with ``m = n + r``; returns ``(bound, head)``.

    ``head = |exp(tail) - 1|`` and the remainder part is
    ``|u|^-m I_chi exp{4 I_T/|u| + |u|^-m I_chi + Re tail}``.
    """
    head = abs_expm1(tail, series_majorant)
    a = int_chi / abs_u**m
    rest = a * math.exp(4.0 * int_T / abs_u + a + complex(tail).real)
    return head + rest, head


def round_up(x) -> float:
    """Smallest float not below ``x`` (``x`` may be an mpf or Fraction)."""
    f = float(x)
    if f < x:
        f = math.nextafter(f, math.inf)
    return f


def thm2_value_mp(m: int, abs_u: float, int_chi: float, int_T: float, tail, series_majorant: bool = False):
    """As ``thm2_value`` with an mpf ``tail``; the head is formed in mp and the sum rounded up."""
    import mpmath

    with mpmath.mp.workdps(max(mpmath.mp.dps, 30)):
        tail = mpmath.mpf(tail)
        head = mpmath.expm1(abs(tail)) if series_majorant else abs(mpmath.expm1(tail))
        a = mpmath.mpf(int_chi) / mpmath.mpf(abs_u) ** m
        rest = a * mpmath.exp(4 * mpmath.mpf(int_T) / abs_u + a + tail)
        return round_up(head + rest), float(head)


def bound_delta_exponent(kappa: float) -> float:
    """Error bound in the exponent: ``-ln(1 - kappa)``."""
    if kappa < 0:
        raise ValueError(f"kappa must be nonnegative (got {kappa})")
    if kappa >= 1:
        raise BoundUnavailable(f"kappa < 1 required for the exponent-form bound (kappa = {kappa:.6g}); |u| is too small")
    return -math.log1p(-kappa)


def bound_eta_derivative(
    kappa: float,
    u: complex,
    T_at_xi: complex,
    sigma: complex = 1.0,
    sigma_prime: complex = 0.0,
    j: int = 1,
) -> float:
    """``-ln[1 - (A + B) kappa / (A - B)]`` with ``A = |u^2 sigma|``, ``B = |±u sigma' + sigma T|``."""
    if sigma == 0:
        raise ValueError("sigma must be non-vanishing")
    sgn = 1 if j == 1 else -1
    A = abs(u * u * sigma)
    B = abs(sgn * u * sigma_prime + sigma * T_at_xi)
    if not A > B:
        raise BoundUnavailable(
            f"|u^2 sigma| > |±u sigma' + sigma T_n| required for the derivative bound (got {A:.6g} <= {B:.6g})"
        )
    x = (A + B) * kappa / (A - B)
    if x >= 1:
        raise BoundUnavailable(f"argument of the logarithm must be positive (1 - {x:.6g} <= 0)")
    return -math.log1p(-x)


# ring-element evaluation on paths --------------------------------------------


@lru_cache(maxsize=1024)
def _lambdify(expr, symbol):
    import sympy

    return sympy.lambdify(symbol, expr, modules=["numpy"])


def make_evaluator(symbol=None) -> Callable[[Any, complex], complex]:
    """Evaluator ``(element, t) -> value`` for polynomials, sympy expressions or callables."""

    def evaluate(elem, t):
        if hasattr(elem, "free_symbols"):
            if symbol is None:
                free = elem.free_symbols
                if not free:
                    return complex(elem)
                if len(free) > 1:
                    raise ValueError("symbolic element has several free symbols; pass the path variable")
                sym = next(iter(free))
            else:
                sym = symbol
            return complex(_lambdify(elem, sym)(t))
        if callable(elem):
            return elem(t)
        return elem

    return evaluate


@dataclass(frozen=True)
class BoundInputs:
    """Everything a bound needs.

    ``path`` runs from ``alpha_j`` to ``xi``.  ``E_diff`` holds
    ``E_s(xi) - E_s(alpha_j)`` for ``s = n .. n+r-1``.  ``evaluate`` maps a
    ring element and a path point to a number (default: polynomials and
    sympy expressions in the path variable).  ``mode`` is ``"direct"`` (the
    exact ``|chi_n|`` and ``|T_n|``) or ``"majorant"`` (term-by-term
    triangle inequality, which needs only integrals of the coefficients).
    """

    table: CoefficientTable
    n: int
    u: complex
    path: PathSpec
    r: int = 0
    E_diff: Sequence | None = None
    evaluate: Callable | None = None
    mode: str = "direct"
    series_majorant: bool = False
    rel_tol: float = 1e-12
    certify: bool = True
    n0: int | None = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n >= 1 required (got {self.n})")
        if self.r < 0:
            raise ValueError(f"r >= 0 required (got {self.r})")
        if self.mode not in ("direct", "majorant"):
            raise ValueError("mode must be 'direct' or 'majorant'")
        if self.n + self.r > self.table.N:
            raise ValueError(f"order n+r={self.n + self.r} exceeds the table size N={self.table.N}")
        if complex(self.u) == 0:
            raise ValueError("u must be nonzero")

    @property
    def j(self) -> int:
        return self.path.j

    @property
    def sign(self) -> int:
        return 1 if self.path.j == 1 else -1


def _evaluator(inputs: BoundInputs):
    return inputs.evaluate or make_evaluator()


def _integral(inputs: BoundInputs, f: Callable) -> float:
    res = integrate_abs(inputs.path, f, rel_tol=inputs.rel_tol, certify=False)
    return res.value


def _path_integrals(inputs: BoundInputs, m: int) -> tuple[float, float]:
    """``(int |chi_m|, int |T_m|)`` along the path for the branch of ``inputs``."""
    if inputs.certify:
        require_certified(inputs.path)
    ev = _evaluator(inputs)
    F = inputs.table.F
    dec = chi_decomposition(inputs.table, m)
    u = complex(inputs.u)
    ue = inputs.sign * u  # u -> -u in the lower branch
    au = abs(u)
    if inputs.mode == "direct":

        def chi(t):
            v = ev(dec.leading, t)
            for s, g in enumerate(dec.corrections, start=1):
                v -= ev(g, t) / ue**s
            return v

        def T(t):
            v = 0
            for s in range(0, m - 1):
                v += ev(F[s + 1], t) / ue**s
            return v

        int_chi = _integral(inputs, chi)
        int_T = _integral(inputs, T) if m >= 2 else 0.0
    else:
        int_chi = _integral(inputs, lambda t: ev(dec.leading, t))
        for s, g in enumerate(dec.corrections, start=1):
            int_chi += _integral(inputs, lambda t, g=g: ev(g, t)) / au**s
        int_T = 0.0
        for s in range(0, m - 1):
            int_T += _integral(inputs, lambda t, s=s: ev(F[s + 1], t)) / au**s
    return int_chi, int_T


def _prefactor(inputs: BoundInputs) -> float | None:
    xi = inputs.path.end
    if cmath.isinf(xi):
        return None
    try:
        return math.exp((inputs.sign * complex(inputs.u) * xi).real)
    except OverflowError:
        return math.inf


def bound_kappa(inputs: BoundInputs) -> float:
    int_chi, int_T = _path_integrals(inputs, inputs.n)
    return kappa_value(inputs.n, abs(complex(inputs.u)), int_chi, int_T)


def bound_thm1(inputs: BoundInputs) -> BoundReport:
    if inputs.r != 0:
        raise ValueError("bound_thm1 takes r = 0; use bound_thm2 for r >= 1")
    int_chi, int_T = _path_integrals(inputs, inputs.n)
    k = kappa_value(inputs.n, abs(complex(inputs.u)), int_chi, int_T)
    return BoundReport(
        bound=k,
        formula_used=f"thm1_eps{inputs.j}",
        int_abs_chi=int_chi,
        int_abs_T=int_T,
        prefactor=_prefactor(inputs),
        extras={"n": inputs.n, "r": 0, "mode": inputs.mode},
    )


def check_order_guard(n: int, r: int, abs_u: float, n0: int | None = None) -> bool:
    """Warn when ``n + r`` exceeds the useful number of terms (default ``floor|u|``)."""
    limit = math.floor(abs_u) if n0 is None else n0
    if n + r > limit:
        warnings.warn(f"n + r = {n + r} exceeds n0 = {limit}; the shifted bound may be poor", RuntimeWarning, stacklevel=3)
        return False
    return True


def tail_exponent(E_diff: Sequence, n: int, u: complex, j: int) -> complex:
    """``sum_{s=n}^{n+r-1} (±1)^s E_diff[s-n] / u^s``."""
    sgn = 1 if j == 1 else -1
    return sum((sgn**s) * complex(e) / complex(u) ** s for s, e in enumerate(E_diff, start=n))


def bound_thm2(inputs: BoundInputs) -> BoundReport:
    n, r = inputs.n, inputs.r
    au = abs(complex(inputs.u))
    if r >= 1:
        if inputs.E_diff is None or len(inputs.E_diff) != r:
            raise ValueError(f"E_diff must hold E_s(xi) - E_s(alpha) for s = {n}..{n + r - 1}")
        check_order_guard(n, r, au, inputs.n0)
        tail = tail_exponent(inputs.E_diff, n, inputs.u, inputs.j)
    else:
        tail = 0j
    int_chi, int_T = _path_integrals(inputs, n + r)
    value, head = thm2_value(n + r, au, int_chi, int_T, tail, inputs.series_majorant)
    return BoundReport(
        bound=value,
        formula_used=f"thm2_eps{inputs.j}" if r else f"thm1_eps{inputs.j}",
        int_abs_chi=int_chi,
        int_abs_T=int_T,
        tail_sum=complex(tail).real,
        prefactor=_prefactor(inputs),
        extras={"n": n, "r": r, "head": head, "tail_abs": abs(tail), "mode": inputs.mode},
    )


# u-dependent leading term --------------------------------------------------


def phi_constants(path: PathSpec, phi: Callable, u: complex, samples: int = 4096) -> tuple[float, float]:
    """Sampled ``(kappa_0, kappa_2) = (sup 1/|1 + phi/(2u)|, sup |phi|)`` along the path."""
    k0, k2 = 0.0, 0.0
    u = complex(u)
    for arc in path.arcs:
        for i in range(samples):
            t = arc.at(i / (samples - 1))
            if cmath.isinf(t) or cmath.isnan(t):
                continue
            f = complex(phi(t))
            d = abs(1 + f / (2 * u))
            if d == 0:
                raise BoundUnavailable(f"phi(t) = -2u at t = {t}: kappa_0 is infinite")
            k0 = max(k0, 1 / d)
            k2 = max(k2, abs(f))
    return k0, k2


def bound_thm3(
    table: CoefficientTable,
    n: int,
    u: complex,
    path: PathSpec,
    phi: Callable[[complex], complex],
    phi_prime: Callable[[complex], complex],
    kappa0: float | None = None,
    kappa2: float | None = None,
    evaluate: Callable | None = None,
    E0: Callable[[complex], complex] | None = None,
    residual: Callable[[complex, complex], complex] | None = None,
    rel_tol: float = 1e-12,
    certify: bool = True,
) -> BoundReport:
    """Bound for ``W'' = (u^2 + u phi + psi) W`` with a table from the general routine.

    The table's sign must match the path's branch (``+1`` for ``j = 1``).
    ``residual(t, u)``, when given, is added to ``chi`` (e.g. higher ``psi_s``
    terms of a u-series truncated by the caller).
    """
    if table.sign is None:
        raise ValueError("bound_thm3 needs a table from build_coefficients_general")
    if table.sign != (1 if path.j == 1 else -1):
        raise ValueError(f"table sign {table.sign} does not match branch j={path.j}")
    if certify:
        cert = certify_progressive(path, E0=E0)
        if not cert:
            raise UncertifiedPath(f"path fails the monotonicity condition with E_0 at {cert.violation}")
    ev = evaluate or make_evaluator()
    u = complex(u)
    au = abs(u)
    if kappa0 is None or kappa2 is None:
        k0, k2 = phi_constants(path, phi, u)
        kappa0 = k0 if kappa0 is None else kappa0
        kappa2 = k2 if kappa2 is None else kappa2
    if not math.isfinite(kappa0):
        raise BoundUnavailable("kappa_0 is infinite")
    coeffs, clean = chi_series_general(table, n)
    if not clean:
        raise ValueError("chi has uncancelled negative powers; table and psi series are inconsistent")
    sg = table.sign

    def chi(t):
        v = sum(ev(c, t) / u**k for k, c in enumerate(coeffs))
        if residual is not None:
            v += residual(t, u)
        return v

    def T(t):
        return sum(ev(table.F[s + 1], t) * sg**s / u**s for s in range(0, n - 1))

    def q(f):
        return integrate_abs(path, f, rel_tol=rel_tol, certify=False).value

    int_chi = q(chi)
    int_T = q(T) if n >= 2 else 0.0
    int_dphi = q(phi_prime)
    a = kappa0 * int_chi / au**n
    expo = (2 + 2 * kappa0 + kappa0 * kappa2 / au) * int_T / au + kappa0 * int_dphi / au + a
    return BoundReport(
        bound=a * math.exp(expo),
        formula_used="thm3",
        int_abs_chi=int_chi,
        int_abs_T=int_T,
        extras={"n": n, "kappa0": kappa0, "kappa2": kappa2, "int_abs_phi_prime": int_dphi},
    )


def csv_row(z, n: int, r: int, exact_error, report: BoundReport) -> list:
    return [z, n, r, exact_error, report.bound, report.formula_used]
