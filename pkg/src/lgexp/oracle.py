"""Arbitrary-precision reference values for I_nu(x), K_nu(x) and ln Gamma.

Every call runs at ``digits + GUARD_DIGITS`` working decimal digits and returns
an ``mpmath.mpf`` at that precision; the caller decides how much to keep.
"""
from __future__ import annotations

import os
from functools import lru_cache

import mpmath
from mpmath import mp

GUARD_DIGITS = 15
DEFAULT_DIGITS = 50
ENV_DIGITS = "LG_PRECISION_DIGITS"


def default_digits() -> int:
    raw = os.environ.get(ENV_DIGITS)
    if raw is None or raw.strip() == "":
        return DEFAULT_DIGITS
    try:
        d = int(raw)
    except ValueError:
        raise ValueError(f"{ENV_DIGITS} must be a positive integer (got {raw!r})") from None
    if d <= 0:
        raise ValueError(f"{ENV_DIGITS} must be a positive integer (got {raw!r})")
    return d


def _check(nu, x, digits):
    if digits < 1:
        raise ValueError(f"digits must be positive (got {digits})")
    if not x > 0:
        raise ValueError(f"x must be positive (got {x})")
    if nu < 0:
        raise ValueError(f"nu must be non-negative (got {nu})")


def _key(v) -> str:
    # exact, hashable, precision independent
    if isinstance(v, mpmath.mpf):
        return mpmath.nstr(v, mp.dps + 5, strip_zeros=False)
    return repr(v)


def _mpf(s: str):
    return mpmath.mpf(s)


def bessel_I(nu, x, digits: int | None = None):
    """``sum_k (x/2)^(nu+2k) / (k! Gamma(nu+k+1))``, summed until the tail is negligible.

    The result keeps its working precision; round it under ``mp.workdps``.
    """
    digits = default_digits() if digits is None else digits
    _check(nu, x, digits)
    return _bessel_I(_key(nu), _key(x), digits)


@lru_cache(maxsize=2048)
def _bessel_I(nu_s: str, x_s: str, digits: int):
    with mp.workdps(digits + GUARD_DIGITS):
        nu, x = _mpf(nu_s), _mpf(x_s)
        h = x / 2
        h2 = h * h
        term = mpmath.exp(nu * mpmath.log(h) - mpmath.loggamma(nu + 1))
        total = term
        eps = mpmath.mpf(10) ** (-(digits + 10))
        k = 0
        while True:
            k += 1
            term = term * h2 / (k * (nu + k))
            total += term
            # terms decrease once k(nu+k) > h^2; stop after that point
            if k * (nu + k) > h2 and term < eps * total:
                break
        return total


def _k_log_integrand(nu, x, t):
    # log of e^{-x(cosh t - 1)} cosh(nu t), without overflow
    return -x * (mpmath.cosh(t) - 1) + nu * t + mpmath.log1p(mpmath.exp(-2 * nu * t)) - mpmath.log(2)


def bessel_K(nu, x, digits: int | None = None):
    """``int_0^inf e^{-x cosh t} cosh(nu t) dt`` by tanh-sinh quadrature.

    The integral is taken with ``e^{-x}`` factored out, split at the peak
    ``sinh t = nu/x`` and truncated where the integrand falls below
    ``10^-(digits+15)`` of the peak.
    """
    digits = default_digits() if digits is None else digits
    _check(nu, x, digits)
    return _bessel_K(_key(nu), _key(x), digits)


@lru_cache(maxsize=2048)
def _bessel_K(nu_s: str, x_s: str, digits: int):
    with mp.workdps(digits + GUARD_DIGITS):
        nu, x = _mpf(nu_s), _mpf(x_s)
        tpk = mpmath.asinh(nu / x)
        peak = _k_log_integrand(nu, x, tpk)
        drop = (digits + 15) * mpmath.log(10)

        def below(t):
            return _k_log_integrand(nu, x, t) < peak - drop

        hi = tpk + 1
        while not below(hi):
            hi = 2 * hi
        lo = tpk
        for _ in range(60):
            mid = (lo + hi) / 2
            if below(mid):
                hi = mid
            else:
                lo = mid
        T = hi
        width = 1 / mpmath.sqrt(x * mpmath.cosh(tpk))  # Gaussian width near the peak
        pts = [mpmath.mpf(0)]
        for c in (tpk - 4 * width, tpk, tpk + 4 * width):
            if pts[-1] < c < T:
                pts.append(c)
        pts.append(T)

        def f(t):
            return mpmath.exp(-x * (mpmath.cosh(t) - 1)) * mpmath.cosh(nu * t)

        val = mpmath.quad(f, pts, method="tanh-sinh")
        return val * mpmath.exp(-x)


def ln_gamma(x, digits: int | None = None):
    digits = default_digits() if digits is None else digits
    if not x > 0:
        raise ValueError(f"x must be positive (got {x})")
    with mp.workdps(digits + GUARD_DIGITS):
        return mpmath.loggamma(_mpf(_key(x)))


def bessel_I_derivative(nu, x, digits: int | None = None):
    digits = default_digits() if digits is None else digits
    with mp.workdps(digits + GUARD_DIGITS):
        return (bessel_I(nu - 1, x, digits) + bessel_I(nu + 1, x, digits)) / 2 if nu >= 1 else (
            bessel_I(nu + 1, x, digits) + nu / _mpf(_key(x)) * bessel_I(nu, x, digits)
        )


def bessel_K_derivative(nu, x, digits: int | None = None):
    digits = default_digits() if digits is None else digits
    with mp.workdps(digits + GUARD_DIGITS):
        return -bessel_K(nu + 1, x, digits) + nu / _mpf(_key(x)) * bessel_K(nu, x, digits)


def to_decimal(v, digits: int) -> str:
    with mp.workdps(digits + GUARD_DIGITS):
        return mpmath.nstr(v, digits, min_fixed=1, max_fixed=0)
