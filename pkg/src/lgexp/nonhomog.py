"""Particular solutions of ``W'' - (u^2 + psi) W = varpi`` as series in ``u^-2``.

Substituting ``W = sum_s G_s u^{-2s-2}`` gives ``G_0 = -varpi`` and
``G_{s+1} = G_s'' - psi G_s``.  The remainder after ``n`` terms is bounded by

    |u|^{-2n-2} {|G_n(xi)| + (1/2) int |G_n'|}
        + L_n / (2 |u|^{2n+3}) * int |psi| / (1 - int |psi| / (2|u|)),

    L_n = sup |G_n| + (1/2) int |G_n'|,

with integrals and sup over the whole path.  The shifted form adds the
explicit terms ``s = n .. n+r-1`` and applies the same bound at order ``n+r``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Any, Callable, Sequence

import mpmath
import sympy

from .algebra import RationalPoly, SymbolicDerivation
from .bounds import BoundReport, BoundUnavailable, make_evaluator, round_up
from .paths import PathSpec, integrate_abs
from .roots import real_roots_in

SUP_SAMPLES = 4096


@dataclass(frozen=True)
class NonhomogModel:
    psi: Any
    varpi: Any
    D: Any = field(repr=False, compare=False)
    G: tuple = ()

    @property
    def N(self) -> int:
        return len(self.G) - 1


def build_G_sequence(psi, varpi, D: Callable, N: int) -> list:
    if N < 0:
        raise ValueError(f"N >= 0 required (got {N})")
    G = [-varpi]
    for _ in range(N):
        g = G[-1]
        G.append(D(D(g)) - psi * g)
    return G


def build_nonhomog_model(psi, varpi, D: Callable, N: int) -> NonhomogModel:
    return NonhomogModel(psi, varpi, D, tuple(build_G_sequence(psi, varpi, D, N)))


def eval_G_expansion(model: NonhomogModel, u, xi, n: int, evaluate: Callable | None = None):
    """``u^-2 sum_{s<n} G_s(xi) u^{-2s}``."""
    if not 0 <= n <= model.N:
        raise ValueError(f"order n must satisfy 0 <= n <= N={model.N} (got {n})")
    ev = evaluate or make_evaluator()
    u2 = u * u
    acc = 0
    for s in range(n - 1, -1, -1):
        acc = acc / u2 + ev(model.G[s], xi)
    return acc / u2


@dataclass(frozen=True)
class NonhomogBoundInputs:
    """``path`` runs from ``alpha_1`` to ``alpha_2`` through ``xi``.

    ``sup_G`` may be supplied; otherwise it is exact for polynomial ``G_n`` on
    a real path and sampled (``SUP_SAMPLES`` per arc) in other cases.
    """

    model: NonhomogModel
    n: int
    u: complex
    xi: complex
    path: PathSpec
    r: int = 0
    evaluate: Callable | None = None
    sup_G: float | None = None
    rel_tol: float = 1e-12

    def __post_init__(self):
        if self.n < 0 or self.r < 0:
            raise ValueError(f"n >= 0 and r >= 0 required (got n={self.n}, r={self.r})")
        if self.n + self.r + 1 > self.model.N:
            raise ValueError(f"need G_0..G_{self.n + self.r + 1}; the model stops at N={self.model.N}")


def _real_interval(path: PathSpec) -> tuple[float, float] | None:
    pts = [path.start] + [a.end for a in path.arcs]
    if all(a.is_segment for a in path.arcs) and all(complex(p).imag == 0 for p in pts):
        xs = [complex(p).real for p in pts]
        if all(b >= a for a, b in zip(xs, xs[1:])) or all(b <= a for a, b in zip(xs, xs[1:])):
            return min(xs), max(xs)
    return None


def sup_abs(elem, path: PathSpec, evaluate: Callable, samples: int = SUP_SAMPLES) -> tuple[float, bool]:
    """``(sup |elem|, exact)`` along the path."""
    iv = _real_interval(path)
    if isinstance(elem, RationalPoly) and iv is not None:
        a, b = Fraction(iv[0]), Fraction(iv[1])
        cands = [a, b]
        d = elem.derivative()
        if not d.is_zero():
            cands += real_roots_in(d, a, b)
        return max(abs(float(elem(c))) for c in cands), True
    best = 0.0
    for arc in path.arcs:
        for i in range(samples):
            t = arc.at(i / (samples - 1))
            if cmath.isinf(t) or cmath.isnan(t):
                continue
            best = max(best, abs(evaluate(elem, t)))
    return best, False


def _derivative(model: NonhomogModel, s: int):
    return model.D(model.G[s])


def _remainder_bound(inp: NonhomogBoundInputs, m: int, ev: Callable, int_psi: float) -> tuple[float, dict]:
    au = abs(complex(inp.u))
    Gm = inp.model.G[m]
    dGm = _derivative(inp.model, m)
    int_dG = integrate_abs(inp.path, lambda t: ev(dGm, t), rel_tol=inp.rel_tol, certify=False).value
    if inp.sup_G is not None and m == inp.n + inp.r:
        sup, exact = inp.sup_G, True
    else:
        sup, exact = sup_abs(Gm, inp.path, ev)
    L = sup + int_dG / 2
    first = (abs(ev(Gm, inp.xi)) + int_dG / 2) / au ** (2 * m + 2)
    second = L / (2 * au ** (2 * m + 3)) * int_psi / (1 - int_psi / (2 * au))
    return first + second, {"int_abs_dG": int_dG, "sup_G": sup, "sup_exact": exact, "L": L}


def bound_thm4(inp: NonhomogBoundInputs) -> BoundReport:
    """Bound on ``|W - u^-2 sum_{s<n} G_s u^{-2s}|`` at ``xi`` (shifted form when ``r >= 1``)."""
    ev = inp.evaluate or make_evaluator()
    au = abs(complex(inp.u))
    int_psi = integrate_abs(inp.path, lambda t: ev(inp.model.psi, t), rel_tol=inp.rel_tol, certify=False).value
    if not int_psi < 2 * au:
        raise BoundUnavailable(f"int |psi| < 2|u| required (int |psi| = {int_psi:.6g}, 2|u| = {2 * au:.6g})")
    m = inp.n + inp.r
    rem, info = _remainder_bound(inp, m, ev, int_psi)
    head = 0.0
    if inp.r:
        u = complex(inp.u)
        head = abs(sum(ev(inp.model.G[s], inp.xi) / u ** (2 * s + 2) for s in range(inp.n, m)))
    info.update({"n": inp.n, "r": inp.r, "head": head, "remainder_part": rem})
    return BoundReport(
        bound=round_up(head + rem) if inp.r else round_up(rem),
        formula_used="thm4_shifted" if inp.r else "thm4",
        int_abs_chi=0.0,
        int_abs_T=int_psi,
        extras=info,
    )


# exponential forcing demo ---------------------------------------------------

XI = sympy.Symbol("xi", real=True)


@lru_cache(maxsize=8)
def exp_forcing_model(lam=Fraction(1, 2), N: int = 8) -> NonhomogModel:
    """``psi = 0``, ``varpi = e^{lam xi}``: ``G_s = -lam^{2s} e^{lam xi}``."""
    lam_s = sympy.Rational(lam.numerator, lam.denominator) if isinstance(lam, Fraction) else sympy.nsimplify(lam)
    return build_nonhomog_model(sympy.Integer(0), sympy.exp(lam_s * XI), SymbolicDerivation(XI), N)


@lru_cache(maxsize=256)
def _mp_fn(expr):
    return sympy.lambdify(XI, expr, modules="mpmath")


def mp_evaluate(elem, t):
    """Evaluate a sympy element at ``t`` in the current mpmath precision."""
    if hasattr(elem, "free_symbols") and elem.free_symbols:
        return _mp_fn(elem)(mpmath.mpmathify(t))
    return mpmath.mpmathify(complex(elem)) if hasattr(elem, "free_symbols") else elem


def exact_exp_solution(lam, u, xi):
    lam, u, xi = (mpmath.mpf(Fraction(v).numerator) / Fraction(v).denominator for v in (lam, u, xi))
    return -mpmath.exp(lam * xi) / (u * u - lam * lam)


@dataclass(frozen=True)
class DemoRow:
    u: float
    n: int
    r: int
    xi: float
    exact_error: float
    bound_r0: float
    bound_shifted: float


def exp_forcing_demo(
    us: Sequence = (5, 10, 20),
    ns: Sequence = (1, 2, 3, 4, 5),
    r: int = 1,
    xi: float = 0.0,
    window: tuple = (-1.0, 1.0),
    lam=Fraction(1, 2),
    digits: int = 50,
) -> list[DemoRow]:
    """Remainders of the exponential-forcing model against both bound forms.

    The path is the finite real window; ``xi`` must lie inside it.
    """
    a, b = window
    if not a <= xi <= b:
        raise ValueError(f"xi must lie in the window [{a}, {b}] (got {xi})")
    model = exp_forcing_model(Fraction(lam), max(ns) + r + 2)
    path = PathSpec.polyline([a, b], 1, 1)
    fl = make_evaluator(XI)
    rows = []
    for u in us:
        for n in ns:
            with mpmath.workdps(digits):
                eps = exact_exp_solution(lam, u, Fraction(xi)) - eval_G_expansion(model, mpmath.mpf(u), mpmath.mpf(xi), n, mp_evaluate)
            b82 = bound_thm4(NonhomogBoundInputs(model, n, u, xi, path, 0, fl)).bound
            b88 = bound_thm4(NonhomogBoundInputs(model, n, u, xi, path, r, fl)).bound if r else b82
            rows.append(DemoRow(float(u), n, r, float(xi), float(abs(eps)), b82, b88))
    return rows
