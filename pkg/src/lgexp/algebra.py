"""Exact rational arithmetic, univariate polynomials and differential rings.

Coefficients are :class:`fractions.Fraction` throughout, so every operation is
exact and canonical (reduced, positive denominator, zero is ``0/1``).

Three differential rings are offered, all sharing the same duck-typed surface
(``+``, ``-``, ``*``, scalar ``*`` and a derivation object):

* :class:`RationalPoly` with :class:`PolyDerivation` ``D = m(x) d/dx``;
* :class:`Jet`, a truncated Taylor expansion at a point, with
  :class:`JetDerivation`;
* sympy expressions with :class:`SymbolicDerivation`.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

BigRational = Fraction

NEG_INF = -math.inf


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions, floats (exactly) and ``"n/d"`` strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, float)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {type(x).__name__} to a rational")


class VariableMismatch(ValueError):
    pass


class RationalPoly:
    """Immutable polynomial with exact rational coefficients, ascending order."""

    __slots__ = ("coeffs", "var", "_float", "_hash")

    def __init__(self, coeffs: Iterable = (), var: str = "x"):
        cs = [as_rational(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)
        self.var = var
        self._float = None
        self._hash = None

    # construction helpers
    @classmethod
    def constant(cls, c, var: str = "x") -> RationalPoly:
        return cls([c], var)

    @classmethod
    def monomial(cls, degree: int, c=1, var: str = "x") -> RationalPoly:
        return cls([0] * degree + [c], var)

    @classmethod
    def identity(cls, var: str = "x") -> RationalPoly:
        return cls([0, 1], var)

    @property
    def degree(self) -> float | int:
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def _coerce(self, other) -> RationalPoly:
        if isinstance(other, RationalPoly):
            if other.var != self.var and self.degree > 0 and other.degree > 0:
                raise VariableMismatch(f"{self.var!r} vs {other.var!r}")
            return other
        return RationalPoly([as_rational(other)], self.var)

    def __add__(self, other):
        if not isinstance(other, (RationalPoly, int, Fraction)):
            return NotImplemented
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out, _var_of(self, other))

    __radd__ = __add__

    def __neg__(self):
        return RationalPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        if not isinstance(other, (RationalPoly, int, Fraction)):
            return NotImplemented
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return RationalPoly([c * other for c in self.coeffs], self.var)
        if not isinstance(other, RationalPoly):
            return NotImplemented
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return RationalPoly([], _var_of(self, other))
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return RationalPoly(out, _var_of(self, other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = RationalPoly([1], self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __divmod__(self, other: RationalPoly):
        return poly_divmod(self, other)

    def __eq__(self, other):
        if isinstance(other, RationalPoly):
            if self.coeffs != other.coeffs:
                return False
            return self.var == other.var or len(self.coeffs) <= 1
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.coeffs, self.var if len(self.coeffs) > 1 else ""))
        return self._hash

    def __call__(self, x):
        """Horner evaluation; exact for rationals, floating otherwise."""
        if isinstance(x, (int, Fraction)):
            return poly_eval(self, x)
        if self._float is None:
            self._float = [float(c) for c in self.coeffs]
        acc = 0.0 * x
        for c in reversed(self._float):
            acc = acc * x + c
        return acc

    def eval_mp(self, x):
        """Evaluate at an mpmath number, coefficient by coefficient in mp."""
        import mpmath as mp

        acc = mp.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * x + mp.mpf(c.numerator) / c.denominator
        return acc

    def derivative(self) -> RationalPoly:
        return poly_derivative(self)

    def antiderivative(self) -> RationalPoly:
        return poly_antiderivative(self)

    def __repr__(self):
        return f"RationalPoly({[str(c) for c in self.coeffs]}, var={self.var!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else (self.var if k == 1 else f"{self.var}^{k}")
            if mono and c == 1:
                terms.append(mono)
            elif mono and c == -1:
                terms.append(f"-{mono}")
            elif mono:
                terms.append(f"({c})*{mono}")
            else:
                terms.append(f"{c}")
        return " + ".join(terms).replace("+ -", "- ")

    # serialization
    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj: dict) -> RationalPoly:
        return cls([Fraction(s) for s in obj["coeffs"]], obj.get("var", "x"))


def _var_of(a: RationalPoly, b: RationalPoly) -> str:
    return b.var if a.degree <= 0 < b.degree else a.var


def _check_vars(a: RationalPoly, b: RationalPoly):
    if a.var != b.var:
        raise VariableMismatch(f"polynomials in {a.var!r} and {b.var!r}")


def poly_add(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    _check_vars(a, b)
    return a + b


def poly_mul(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    _check_vars(a, b)
    return a * b


def poly_derivative(a: RationalPoly) -> RationalPoly:
    return RationalPoly([k * c for k, c in enumerate(a.coeffs)][1:], a.var)


def poly_antiderivative(a: RationalPoly) -> RationalPoly:
    """Antiderivative with zero constant term."""
    return RationalPoly([Fraction(0)] + [c / (k + 1) for k, c in enumerate(a.coeffs)], a.var)


def poly_eval(a: RationalPoly, x) -> Fraction:
    x = as_rational(x)
    acc = Fraction(0)
    for c in reversed(a.coeffs):
        acc = acc * x + c
    return acc


def poly_divmod(a: RationalPoly, b: RationalPoly) -> tuple[RationalPoly, RationalPoly]:
    if b.is_zero():
        raise ZeroDivisionError("polynomial division by zero")
    rem = list(a.coeffs)
    db = len(b.coeffs) - 1
    lb = b.coeffs[-1]
    if len(rem) - 1 < db:
        return RationalPoly([], a.var), a
    quot = [Fraction(0)] * (len(rem) - db)
    for k in range(len(rem) - 1, db - 1, -1):
        q = rem[k] / lb
        quot[k - db] = q
        if q:
            for i, c in enumerate(b.coeffs):
                rem[k - db + i] -= q * c
    return RationalPoly(quot, a.var), RationalPoly(rem[:db], a.var)


def exact_div(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Quotient ``a/b``; raises if the division leaves a remainder."""
    q, r = poly_divmod(a, b)
    if not r.is_zero():
        raise ArithmeticError(f"{b} does not divide {a}")
    return q


def poly_gcd(a: RationalPoly, b: RationalPoly) -> RationalPoly:
    """Monic gcd over Q (Euclid)."""
    while not b.is_zero():
        a, b = b, poly_divmod(a, b)[1]
    if a.is_zero():
        return a
    return a * (1 / a.leading())


def random_poly(rng: random.Random, degree: int, var: str = "x", height: int = 9) -> RationalPoly:
    return RationalPoly(
        [Fraction(rng.randint(-height, height), rng.randint(1, height)) for _ in range(degree + 1)], var
    )


# Derivations ---------------------------------------------------------------


@dataclass(frozen=True)
class PolyDerivation:
    """``D = multiplier(x) * d/dx`` on ``Q[x]``.

    ``antiderivative`` inverts ``D``: it returns ``E`` with ``D E = F`` and
    ``E(reference) = 0``.  It needs ``multiplier`` to divide ``F`` exactly.
    """

    multiplier: RationalPoly
    reference: Fraction = Fraction(0)

    @classmethod
    def standard(cls, var: str = "x", reference=0) -> PolyDerivation:
        return cls(RationalPoly([1], var), as_rational(reference))

    def __call__(self, a: RationalPoly) -> RationalPoly:
        return self.multiplier * a.derivative()

    def antiderivative(self, a: RationalPoly) -> RationalPoly:
        prim = exact_div(a, self.multiplier).antiderivative()
        return prim - poly_eval(prim, self.reference)

    def at_reference(self, a: RationalPoly) -> Fraction:
        return poly_eval(a, self.reference)


class Jet:
    """Truncated Taylor expansion ``sum c_k (x - center)^k``, ``k < len``.

    Products and sums truncate to the shorter operand; differentiation drops
    one term, so a length-L jet supports ``L - 1`` derivatives.
    """

    __slots__ = ("coeffs", "center")

    def __init__(self, coeffs: Sequence, center=0):
        self.coeffs = tuple(coeffs)
        self.center = center

    @classmethod
    def variable(cls, center, length: int) -> Jet:
        return cls([center, 1] + [0] * (length - 2), center)

    @classmethod
    def from_derivatives(cls, derivs: Sequence, center=0) -> Jet:
        return cls([d / math.factorial(k) for k, d in enumerate(derivs)], center)

    def __len__(self):
        return len(self.coeffs)

    def derivatives(self) -> list:
        return [c * math.factorial(k) for k, c in enumerate(self.coeffs)]

    def value(self):
        return self.coeffs[0]

    def _lift(self, other) -> Jet:
        if isinstance(other, Jet):
            return other
        return Jet([other] + [0] * (len(self) - 1), self.center)

    def __add__(self, other):
        other = self._lift(other)
        n = min(len(self), len(other))
        return Jet([self.coeffs[i] + other.coeffs[i] for i in range(n)], self.center)

    __radd__ = __add__

    def __neg__(self):
        return Jet([-c for c in self.coeffs], self.center)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([c * other for c in self.coeffs], self.center)
        n = min(len(self), len(other))
        a, b = self.coeffs, other.coeffs
        return Jet([sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)], self.center)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        n = min(len(self), len(other))
        return self.coeffs[:n] == other.coeffs[:n]

    __hash__ = None

    def isclose(self, other: Jet, rel: float = 1e-12, abs_: float = 1e-14) -> bool:
        n = min(len(self), len(other))
        return all(
            abs(self.coeffs[i] - other.coeffs[i]) <= abs_ + rel * max(abs(self.coeffs[i]), abs(other.coeffs[i]))
            for i in range(n)
        )

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r}, center={self.center!r})"

    def to_json(self) -> dict:
        return {"center": str(self.center), "coeffs": [str(c) for c in self.coeffs]}


class JetDerivation:
    """``d/dx`` on jets; the antiderivative is anchored at the jet centre."""

    def __call__(self, a: Jet) -> Jet:
        return Jet([(k + 1) * c for k, c in enumerate(a.coeffs[1:])], a.center)

    def antiderivative(self, a: Jet) -> Jet:
        zero = a.coeffs[0] * 0 if a.coeffs else 0
        return Jet([zero] + [c / (k + 1) for k, c in enumerate(a.coeffs)], a.center)

    def at_reference(self, a: Jet):
        return a.coeffs[0]


class SymbolicDerivation:
    """``d/dsymbol`` acting on sympy expressions."""

    def __init__(self, symbol, reference=None):
        self.symbol = symbol
        self.reference = reference

    def __call__(self, expr):
        import sympy

        return sympy.expand(sympy.diff(expr, self.symbol))

    def at_reference(self, expr):
        if self.reference is None:
            raise ValueError("no reference point set")
        return expr.subs(self.symbol, self.reference)
