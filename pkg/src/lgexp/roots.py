"""Real root isolation for rational polynomials.

Roots are isolated with the Descartes rule of signs plus bisection on integer
coefficient lists, then refined by exact bisection at dyadic points.  All
arithmetic is on Python ints.
"""
from __future__ import annotations

import math
from fractions import Fraction

from .algebra import RationalPoly

_PRIMES = (2305843009213693951, 4611686018427387847)


def integer_coeffs(p: RationalPoly) -> list[int]:
    """Primitive integer multiple of ``p`` (ascending), positive leading term."""
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // math.gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    g = 0
    for c in ints:
        g = math.gcd(g, c)
    if g > 1:
        ints = [c // g for c in ints]
    if ints and ints[-1] < 0:
        ints = [-c for c in ints]
    return ints


def _gcd_degree_mod(a: list[int], b: list[int], prime: int) -> int:
    def trim(v):
        while v and v[-1] % prime == 0:
            v.pop()
        return [c % prime for c in v]

    a, b = trim(list(a)), trim(list(b))
    while b:
        inv = pow(b[-1], prime - 2, prime)
        r = list(a)
        db = len(b) - 1
        for k in range(len(r) - 1, db - 1, -1):
            q = r[k] * inv % prime
            if q:
                for i, c in enumerate(b):
                    r[k - db + i] = (r[k - db + i] - q * c) % prime
        a, b = b, trim(r[:db])
    return len(a) - 1


def _primitive(v: list[int]) -> list[int]:
    g = 0
    for c in v:
        g = math.gcd(g, c)
    if g > 1:
        v = [c // g for c in v]
    if v and v[-1] < 0:
        v = [-c for c in v]
    return v


def _int_gcd(a: list[int], b: list[int]) -> list[int]:
    """Primitive gcd over Z by the primitive pseudo-remainder sequence."""
    a, b = _primitive(list(a)), _primitive(list(b))
    if len(a) < len(b):
        a, b = b, a
    while b:
        r = list(a)
        db, lb = len(b) - 1, b[-1]
        while len(r) - 1 >= db and r:
            q = r[-1]
            shift = len(r) - 1 - db
            r = [c * lb for c in r]
            for i, c in enumerate(b):
                r[shift + i] -= q * c
            while r and r[-1] == 0:
                r.pop()
        a, b = b, _primitive(r)
    return a


def _int_exact_div(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    db, lb = len(b) - 1, b[-1]
    out = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        q, rem = divmod(a[k], lb)
        if rem:
            raise ArithmeticError("inexact integer polynomial division")
        out[k - db] = q
        for i, c in enumerate(b):
            a[k - db + i] -= q * c
    return out


def squarefree_part(p: RationalPoly) -> RationalPoly:
    """``p`` divided by ``gcd(p, p')`` (the same real roots, all simple)."""
    ints = integer_coeffs(p)
    zeros = 0
    while zeros < len(ints) - 1 and ints[zeros] == 0:
        zeros += 1
    core = ints[zeros:]
    dcore = [i * c for i, c in enumerate(core)][1:]
    simple = len(core) <= 1
    if not simple:
        for prime in _PRIMES:
            if core[-1] % prime and _gcd_degree_mod(core, dcore, prime) == 0:
                simple = True
                break
    if not simple:
        g = _int_gcd(core, dcore)
        if len(g) > 1:
            core = _primitive(_int_exact_div(core, g))
    if zeros:
        core = [0] + core
    return RationalPoly(core, p.var)


def _taylor_shift1(c: list[int]) -> list[int]:
    c = list(c)
    n = len(c)
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            c[k] += c[k + 1]
    return c


def _sign_variations(c: list[int]) -> int:
    v, last = 0, 0
    for x in c:
        if x:
            if last and (x > 0) != (last > 0):
                v += 1
            last = x
    return v


def _descartes_bound01(c: list[int]) -> int:
    # roots of c in (0,1) <-> positive roots of (x+1)^d c(1/(x+1))
    return _sign_variations(_taylor_shift1(c[::-1]))


def _isolate01(c: list[int]):
    """Yield exact dyadic roots ``(num, k)`` and isolating intervals ``(num, k, None)``.

    A pair ``(m, k)`` denotes the point m/2^k; an interval ``(m, k, None)``
    denotes the open interval (m/2^k, (m+1)/2^k) containing exactly one root.
    Roots at 1 are not reported.
    """
    exact, intervals = [], []
    stack = [(c, 0, 0)]
    while stack:
        q, m, k = stack.pop()
        while q and q[0] == 0:
            exact.append((m, k))
            q = q[1:]
        if len(q) <= 1:
            continue
        v = _descartes_bound01(q)
        if v == 0:
            continue
        if v == 1:
            intervals.append((m, k))
            continue
        d = len(q) - 1
        half = [coef << (d - i) for i, coef in enumerate(q)]  # 2^d q(x/2)
        stack.append((_taylor_shift1(half), 2 * m + 1, k + 1))
        stack.append((half, 2 * m, k + 1))
    return exact, intervals


def _sign_at(c: list[int], m: int, k: int) -> int:
    # sign of c(m / 2^k) via homogeneous Horner
    d = len(c) - 1
    acc = c[d]
    for i in range(d - 1, -1, -1):
        acc = acc * m + (c[i] << (k * (d - i)))
    return (acc > 0) - (acc < 0)


def real_roots_unit(p: RationalPoly, bits: int = 96) -> list[Fraction]:
    """Sorted roots of ``p`` in [0, 1), each exact or within 2^-bits.

    Multiple roots are reported once.
    """
    if p.degree <= 0:
        if p.is_zero():
            raise ValueError("zero polynomial has no isolated roots")
        return []
    c = integer_coeffs(squarefree_part(p))
    exact, intervals = _isolate01(c)
    out = [Fraction(m, 1 << k) for m, k in exact]
    for m, k in intervals:
        lo_sign = _sign_at(c, m, k)
        if lo_sign == 0:
            # left endpoint is itself a (simple) root; use the side just right of it
            lo_sign = _sign_at([i * x for i, x in enumerate(c)][1:], m, k)
        lo, kk = m, k
        # invariant: root in (lo/2^kk, (lo+1)/2^kk), sign at left endpoint = lo_sign
        while kk < bits:
            lo, kk = 2 * lo, kk + 1
            s = _sign_at(c, lo + 1, kk)
            if s == 0:
                lo, kk = lo + 1, kk
                break
            if s == lo_sign:
                lo += 1
        else:
            out.append(Fraction(2 * lo + 1, 1 << (kk + 1)))
            continue
        out.append(Fraction(lo, 1 << kk))
    return sorted(set(out))


def real_roots_in(p: RationalPoly, a, b, bits: int = 96) -> list[Fraction]:
    """Roots of ``p`` in the closed interval [a, b] (approximated as above)."""
    a, b = Fraction(a), Fraction(b)
    if a > b:
        a, b = b, a
    if a == b:
        return [a] if p(a) == 0 else []
    w = b - a
    # q(x) = p(a + w x), roots in [0, 1)
    q = RationalPoly([0])
    lin = RationalPoly([a, w], p.var)
    for c in reversed(p.coeffs):
        q = q * lin + c
    extra_bits = max(0, -math.floor(math.log2(w))) if w < 1 else 0
    roots = [a + w * r for r in real_roots_unit(q, bits + extra_bits)]
    if p(b) == 0:
        roots.append(b)
    return roots
