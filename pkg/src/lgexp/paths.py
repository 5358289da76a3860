"""Progressive integration paths and integrals of ``|w(t) dt|``.

A path is a chain of arcs, each parameterized over ``s in [0, 1]``.  The
progressive-path certificate is sampled (plus a derivative-sign check where
the arc supplies a derivative): it is a guard against obviously wrong paths,
not a proof.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from scipy import integrate, optimize

from .algebra import RationalPoly, as_rational
from .roots import real_roots_in

DEFAULT_REL_TOL = 1e-10
DEFAULT_SAMPLES = 1024
KINK_SAMPLES = 256


class QuadratureError(RuntimeError):
    def __init__(self, message: str, partial: float):
        super().__init__(message)
        self.partial = partial


class UncertifiedPath(ValueError):
    pass


@dataclass(frozen=True)
class Arc:
    """Smooth arc ``t(s)``, ``0 <= s <= 1``, from ``start`` to ``end``.

    Without ``point`` the arc is the straight segment.  Endpoints may be
    infinite when ``point`` is given (samples there are skipped).
    """

    start: complex
    end: complex
    point: Callable[[float], complex] | None = field(default=None, compare=False)
    derivative: Callable[[float], complex] | None = field(default=None, compare=False)

    def at(self, s: float) -> complex:
        if self.point is not None:
            return self.point(s)
        return self.start + (self.end - self.start) * s

    def d(self, s: float) -> complex | None:
        if self.point is None:
            return self.end - self.start
        return None if self.derivative is None else self.derivative(s)

    @property
    def is_segment(self) -> bool:
        return self.point is None


def _same_point(a: complex, b: complex) -> bool:
    if cmath.isinf(a) or cmath.isinf(b):
        return cmath.isinf(a) and cmath.isinf(b)
    return abs(a - b) <= 1e-12 * (1 + abs(a))


@dataclass(frozen=True)
class PathSpec:
    arcs: tuple
    u: complex
    j: int

    def __post_init__(self):
        if self.j not in (1, 2):
            raise ValueError(f"branch index j must be 1 or 2 (got {self.j})")
        if not self.arcs:
            raise ValueError("path needs at least one arc")
        object.__setattr__(self, "arcs", tuple(self.arcs))
        for a, b in zip(self.arcs, self.arcs[1:]):
            if not _same_point(a.end, b.start):
                raise ValueError(f"arcs not connected: {a.end} -> {b.start}")

    @classmethod
    def polyline(cls, points: Sequence, u, j: int) -> PathSpec:
        pts = [complex(p) for p in points]
        return cls(tuple(Arc(a, b) for a, b in zip(pts, pts[1:])), complex(u), j)

    @property
    def start(self) -> complex:
        return self.arcs[0].start

    @property
    def end(self) -> complex:
        return self.arcs[-1].end

    def extended(self, arc: Arc) -> PathSpec:
        return PathSpec(self.arcs + (arc,), self.u, self.j)

    def to_json(self) -> dict:
        if not all(a.is_segment for a in self.arcs):
            raise ValueError("only straight-segment paths serialize")
        c = lambda z: [z.real, z.imag]  # noqa: E731
        return {
            "u": c(complex(self.u)),
            "j": self.j,
            "arcs": [{"from": c(complex(a.start)), "to": c(complex(a.end))} for a in self.arcs],
        }

    @classmethod
    def from_json(cls, obj: dict) -> PathSpec:
        def z(v):
            return complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)

        return cls(tuple(Arc(z(a["from"]), z(a["to"])) for a in obj["arcs"]), z(obj["u"]), int(obj["j"]))


@dataclass(frozen=True)
class Certificate:
    ok: bool
    violation: dict | None = None

    def __bool__(self):
        return self.ok


def certify_progressive(
    path: PathSpec,
    samples: int = DEFAULT_SAMPLES,
    E0: Callable[[complex], complex] | None = None,
    tol: float = 1e-12,
) -> Certificate:
    """Check that ``Re((-1)^j u t) [- Re E0(t)]`` never increases along the path."""
    sgn = -1 if path.j == 1 else 1
    u = complex(path.u)

    def height(t):
        h = (sgn * u * t).real
        if E0 is not None:
            h -= complex(E0(t)).real
        return h

    prev = None
    for ai, arc in enumerate(path.arcs):
        for k in range(samples):
            s = k / (samples - 1)
            t = arc.at(s)
            if cmath.isinf(t) or cmath.isnan(t):
                continue
            h = height(t)
            if not math.isfinite(h):
                continue
            if prev is not None and h > prev + tol * (1 + abs(prev)):
                return Certificate(False, {"arc": ai, "s": s, "point": t, "reason": "height increases"})
            prev = h
            if E0 is None:
                dt = arc.d(s)
                if dt is not None and (sgn * u * dt).real > tol * (1 + abs(u * dt)):
                    return Certificate(False, {"arc": ai, "s": s, "point": t, "reason": "derivative sign"})
    return Certificate(True)


def require_certified(path: PathSpec, **kw) -> None:
    cert = certify_progressive(path, **kw)
    if not cert:
        v = cert.violation
        raise UncertifiedPath(
            f"path is not progressive: Re((-1)^j u t) increases on arc {v['arc']} at s={v['s']:.4g} ({v['reason']})"
        )


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int


def _kinks(f: Callable[[float], float], samples: int = KINK_SAMPLES) -> list[float]:
    # |w| has a corner wherever w vanishes; Gauss-Kronrod error estimates are
    # unreliable across corners, so sampled local minima are refined and
    # handed to quad as breakpoints
    h = 1.0 / samples
    vals = []
    for k in range(samples + 1):
        try:
            v = f(k * h) if 0 < k < samples else math.inf
        except (ZeroDivisionError, OverflowError, ValueError):
            v = math.inf
        vals.append(v if math.isfinite(v) else math.inf)
    out = []
    for k in range(1, samples):
        if vals[k] <= vals[k - 1] and vals[k] <= vals[k + 1] and vals[k] < math.inf:
            res = optimize.minimize_scalar(f, bounds=((k - 1) * h, (k + 1) * h), method="bounded", options={"xatol": 1e-15})
            s = float(res.x) if res.success and res.fun <= vals[k] else k * h
            if 0 < s < 1 and (not out or s - out[-1] > 1e-14):
                out.append(s)
    return out[:100]


def integrate_abs(
    path: PathSpec,
    integrand: Callable[[complex], complex],
    rel_tol: float = DEFAULT_REL_TOL,
    max_subdivisions: int = 500,
    certify: bool = True,
) -> QuadratureResult:
    """``sum over arcs of  int_0^1 |integrand(t(s))| |t'(s)| ds`` by adaptive Gauss-Kronrod."""
    if certify:
        require_certified(path)
    total, err, subdiv = 0.0, 0.0, 0
    for arc in path.arcs:
        if arc.point is not None and arc.derivative is None:
            raise ValueError("integrate_abs needs the arc derivative")

        def f(s, arc=arc):
            return abs(integrand(arc.at(s))) * abs(arc.d(s))

        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            pts = _kinks(f)
            out = integrate.quad(
                f, 0.0, 1.0, epsrel=rel_tol, epsabs=0.0, limit=max_subdivisions, full_output=1, points=pts or None
            )
        value, abserr, info = out[0], out[1], out[2]
        total += value
        err += abserr
        subdiv += int(info["last"])
        if len(out) > 3 and abserr > rel_tol * max(abs(total), 1e-300) * 10:
            raise QuadratureError(f"adaptive quadrature did not converge: {out[3]}", partial=total)
    return QuadratureResult(total, err, subdiv)


# exact integrals of |polynomial| -------------------------------------------


def _int_coeffs(p: RationalPoly) -> tuple[list[int], int]:
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return [int(c * den) for c in p.coeffs], den


def _eval_scaled(ints: list[int], den: int, x: Fraction) -> Fraction:
    m, b = x.numerator, x.denominator
    d = len(ints) - 1
    if d < 0:
        return Fraction(0)
    acc = ints[d]
    bpow = 1
    for i in range(d - 1, -1, -1):
        bpow *= b
        acc = acc * m + ints[i] * bpow
    return Fraction(acc, den * bpow)


class AbsPolyIntegrator:
    """Exact ``int_a^b |poly(q)| dq`` for many intervals inside ``[lo, hi]``.

    Real roots in ``[lo, hi]`` are isolated once; each integral then sums
    ``|A(x_{i+1}) - A(x_i)|`` over the pieces between roots, ``A`` the exact
    antiderivative.  Roots are refined to ``2^-bits``; since ``A' = poly``
    vanishes there the error is of order ``4^-bits``.
    """

    def __init__(self, poly: RationalPoly, lo=0, hi=1, bits: int = 96):
        self.poly = poly
        self.lo, self.hi = as_rational(lo), as_rational(hi)
        self.roots = [] if poly.is_zero() else real_roots_in(poly, self.lo, self.hi, bits)
        self._A, self._den = _int_coeffs(poly.antiderivative())

    def antiderivative_at(self, x: Fraction) -> Fraction:
        return _eval_scaled(self._A, self._den, x)

    def __call__(self, a, b) -> Fraction:
        a, b = as_rational(a), as_rational(b)
        if a > b:
            a, b = b, a
        if a < self.lo or b > self.hi:
            raise ValueError(f"[{a}, {b}] outside the prepared range [{self.lo}, {self.hi}]")
        if self.poly.is_zero() or a == b:
            return Fraction(0)
        pts = [a] + [r for r in self.roots if a < r < b] + [b]
        vals = [self.antiderivative_at(x) for x in pts]
        return sum((abs(v1 - v0) for v0, v1 in zip(vals, vals[1:])), Fraction(0))


@lru_cache(maxsize=4096)
def _integrator(poly: RationalPoly, lo: Fraction, hi: Fraction) -> AbsPolyIntegrator:
    return AbsPolyIntegrator(poly, lo, hi)


def integrate_abs_poly_exact(poly: RationalPoly, a, b) -> Fraction:
    a, b = as_rational(a), as_rational(b)
    lo, hi = min(a, b), max(a, b)
    return _integrator(poly, lo, hi)(lo, hi)


def unit_integrator(poly: RationalPoly) -> AbsPolyIntegrator:
    """Cached integrator prepared on ``[0, 1]``."""
    return _integrator(poly, Fraction(0), Fraction(1))
