"""Coefficients of the exponential-form Liouville-Green expansion.

For ``W'' = (u^2 + psi) W`` the formal solution
``exp{±u xi + sum (±1)^s E_s / u^s}`` has ``E_s' = F_s`` with

    F_1 = psi/2,  F_2 = -psi'/4,
    F_{s+1} = -F_s'/2 - (1/2) sum_{j=1}^{s-1} F_j F_{s-j}.

Everything here is generic over a differential ring: elements support
``+ - *`` and multiplication by ``Fraction``, and ``D`` is a callable
derivation, optionally carrying ``antiderivative`` and ``at_reference``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .algebra import Jet, RationalPoly

HALF = Fraction(1, 2)


def _zero_like(x):
    return x * 0


def ring_equal(a, b) -> bool:
    """Equality in whichever ring ``a`` and ``b`` live in."""
    if isinstance(b, Jet) and not isinstance(a, Jet):
        a, b = b, a
    if isinstance(a, Jet):
        return a == (b if isinstance(b, Jet) else a * 0 + b)
    if isinstance(a, RationalPoly) or isinstance(b, RationalPoly):
        return a == b
    try:
        import sympy

        if isinstance(a, sympy.Basic) or isinstance(b, sympy.Basic):
            return sympy.simplify(sympy.expand(a - b)) == 0
    except ImportError:  # pragma: no cover
        pass
    return a == b


def _is_zero(x) -> bool:
    return ring_equal(x, _zero_like(x))


@dataclass(frozen=True)
class ChiDecomposition:
    """``chi_n(u) = leading - sum_s corrections[s-1] / u^s``."""

    n: int
    leading: Any
    corrections: tuple

    def G(self, s: int):
        return self.corrections[s - 1]


@dataclass(frozen=True)
class CoefficientTable:
    """``F[s]`` is ``F_s`` (``F[0]`` is ``F_0``: zero unless built by the general routine).

    ``E`` is ``None`` when the ring offers no antiderivative.  ``sign`` is
    ``None`` for the plain recurrence and ``+1``/``-1`` for the ``F^±`` family.
    """

    F: tuple
    E: tuple | None
    N: int
    psi: Any
    derivation: Any = field(repr=False, compare=False)
    model_tag: str = ""
    reference_point: Any = None
    sign: int | None = None
    phi: Any = None
    psi_series: tuple = ()

    @property
    def has_E(self) -> bool:
        return self.E is not None

    def to_json(self) -> dict:
        def ser(x):
            return x.to_json() if hasattr(x, "to_json") else str(x)

        out = {
            "model": self.model_tag,
            "N": self.N,
            "reference_point": None if self.reference_point is None else str(self.reference_point),
            "F": [ser(f) for f in self.F[1:]],
            "E": None if self.E is None else [ser(e) for e in self.E[1:]],
        }
        if self.sign is not None:
            out["sign"] = self.sign
            out["F0"] = ser(self.F[0])
            out["E0"] = None if self.E is None else ser(self.E[0])
        return out


def _antiderivatives(D, F: Sequence):
    anti = getattr(D, "antiderivative", None)
    if anti is None:
        return None
    return tuple(anti(f) for f in F)


def build_coefficients(psi, D: Callable, N: int, model_tag: str = "") -> CoefficientTable:
    if N < 1:
        raise ValueError(f"N >= 1 required (got {N})")
    zero = _zero_like(psi)
    F = [zero, psi * HALF]
    if N >= 2:
        F.append(D(psi) * Fraction(-1, 4))
    for s in range(2, N):
        acc = D(F[s]) * (-HALF)
        conv = zero
        for j in range(1, s):
            conv = conv + F[j] * F[s - j]
        F.append(acc - conv * HALF)
    E = _antiderivatives(D, F[1:])
    return CoefficientTable(
        F=tuple(F),
        E=None if E is None else (zero,) + E,
        N=N,
        psi=psi,
        derivation=D,
        model_tag=model_tag,
        reference_point=getattr(D, "reference", None),
    )


def even_E_via_abel(F_odd: Sequence, J: int, anchor: Callable | None = None) -> list:
    """``[E_2, E_4, ..., E_2J]`` from ``[F_1, F_3, ..., F_{2J-1}]`` without integrating.

    Writing ``w = u^-2``, requiring every ``w^m`` coefficient of
    ``(1 + sum F_{2j+1} w^{j+1}) exp(2 sum E_2j w^j)`` to be constant is the
    same as ``E_2j = -(1/2) [w^j] log(1 + sum F_{2j+1} w^{j+1})`` up to
    constants.  ``anchor(E)`` returns the value to subtract so that the
    result vanishes at the model's reference point.
    """
    if J < 1:
        raise ValueError("J >= 1 required")
    if len(F_odd) < J:
        raise ValueError(f"need F_1..F_{2 * J - 1}: {J} odd coefficients, got {len(F_odd)}")
    zero = _zero_like(F_odd[0])
    # X as a w-series: X[m] is the w^m coefficient, m = 0..J
    X = [zero] + [F_odd[m - 1] for m in range(1, J + 1)]
    log_series = [zero] * (J + 1)
    power = list(X)
    for k in range(1, J + 1):
        c = Fraction((-1) ** (k + 1), k)
        for m in range(k, J + 1):
            log_series[m] = log_series[m] + power[m] * c
        if k < J:
            nxt = [zero] * (J + 1)
            for i in range(1, J + 1):
                for m in range(1, J + 1 - i):
                    nxt[i + m] = nxt[i + m] + power[i] * X[m]
            power = nxt
    out = []
    for j in range(1, J + 1):
        e = log_series[j] * (-HALF)
        if anchor is not None:
            e = e - anchor(e)
        out.append(e)
    return out


def chi_decomposition(table: CoefficientTable, n: int) -> ChiDecomposition:
    if not 1 <= n <= table.N:
        raise ValueError(f"order n={n} outside 1..{table.N}")
    F = table.F
    zero = _zero_like(F[1])
    corrections = []
    for s in range(1, n):
        g = zero
        for k in range(s, n):
            g = g + F[k] * F[s + n - k - 1]
        corrections.append(g)
    return ChiDecomposition(n=n, leading=F[n] * 2, corrections=tuple(corrections))


def _series_mul(a: list, b: list, zero) -> list:
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _pad(a: list, n: int, zero) -> list:
    return a + [zero] * (n - len(a))


def verify_chi_identity(table: CoefficientTable, n: int) -> bool:
    """Check ``u^{n-1}{psi - 2T - T'/u - T^2/u^2} = 2F_n - sum G_{n,s} u^-s`` exactly.

    Both sides are expanded as polynomials in ``v = 1/u`` with ring
    coefficients; the left side is built from ``psi`` and ``T`` only.
    """
    if not 1 <= n <= table.N:
        raise ValueError(f"order n={n} outside 1..{table.N}")
    D = table.derivation
    zero = _zero_like(table.psi)
    T = [table.F[s + 1] for s in range(0, n - 1)] or [zero]
    size = 2 * n + 1
    B = _pad([table.psi], size, zero)
    for s, t in enumerate(T):
        B[s] = B[s] - t * 2
        B[s + 1] = B[s + 1] - D(t)
    for m, c in enumerate(_series_mul(T, T, zero)):
        B[m + 2] = B[m + 2] - c
    chi = chi_decomposition(table, n)
    rhs = [chi.leading] + [-g for g in chi.corrections]
    for m in range(size):
        expected = rhs[m - (n - 1)] if 0 <= m - (n - 1) < len(rhs) else zero
        if not ring_equal(B[m], expected):
            return False
    return True


# u-dependent leading term ---------------------------------------------------


def build_coefficients_general(
    phi, psi_series: Sequence, D: Callable, N: int, sign: int, model_tag: str = ""
) -> CoefficientTable:
    """Coefficients ``F_0^±..F_N^±`` for ``W'' = (u^2 + u phi + sum psi_s u^-s) W``.

    ``F_0 = ±phi/2``, ``F_1 = psi_0/2 - phi^2/8 ∓ phi'/4`` and for s >= 1

        F_{s+1} = (±1)^s psi_s/2 - F_s'/2 - (1/2) sum_{j=0}^{s} F_j F_{s-j}.

    The ``(±1)^s`` on ``psi_s`` follows from ``u -> -u`` in the lower
    branch; without it the ``-`` family leaves unbounded terms in ``chi``
    whenever an odd-index ``psi_s`` is nonzero.
    """
    if N < 1:
        raise ValueError(f"N >= 1 required (got {N})")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    psi_series = tuple(psi_series)
    if not psi_series:
        raise ValueError("psi_series needs at least psi_0")
    zero = _zero_like(psi_series[0])

    def psi_s(s):
        return psi_series[s] if s < len(psi_series) else zero

    F = [phi * (HALF * sign)]
    F.append(psi_s(0) * HALF - phi * phi * Fraction(1, 8) - D(phi) * Fraction(sign, 4))
    for s in range(1, N):
        conv = zero
        for j in range(0, s + 1):
            conv = conv + F[j] * F[s - j]
        F.append(psi_s(s) * (HALF * sign**s) - D(F[s]) * HALF - conv * HALF)
    E = _antiderivatives(D, F)
    return CoefficientTable(
        F=tuple(F),
        E=E,
        N=N,
        psi=psi_s(0),
        derivation=D,
        model_tag=model_tag,
        reference_point=getattr(D, "reference", None),
        sign=sign,
        phi=phi,
        psi_series=psi_series,
    )


def chi_series_general(table: CoefficientTable, n: int) -> tuple[list, bool]:
    """Coefficients ``c_k`` with ``chi_n^± = sum_k c_k u^-k`` for a general table.

    The bracket ``psi ∓ phi'/2 - phi^2/4 - 2T - phi T/u ∓ T'/u - T^2/u^2``
    (``psi`` the full u-series) is expanded in ``1/u`` and multiplied by
    ``(±u)^{n-1}``.  The flag reports whether every negative power cancelled.
    """
    if table.sign is None:
        raise ValueError("table was not built by build_coefficients_general")
    if not 1 <= n <= table.N:
        raise ValueError(f"order n={n} outside 1..{table.N}")
    sg, D, phi = table.sign, table.derivation, table.phi
    zero = _zero_like(table.psi)
    T = [table.F[s + 1] * (sg**s) for s in range(0, n - 1)] or [zero]
    size = 2 * n + 1
    B = _pad([zero], size, zero)
    # psi_s with s >= n belong to the remainder term, not to chi_n
    for s, ps in enumerate(table.psi_series[:n]):
        B[s] = B[s] + ps
    B[0] = B[0] - D(phi) * (HALF * sg) - phi * phi * Fraction(1, 4)
    for s, t in enumerate(T):
        B[s] = B[s] - t * 2
        B[s + 1] = B[s + 1] - phi * t - D(t) * sg
    for m, c in enumerate(_series_mul(T, T, zero)):
        B[m + 2] = B[m + 2] - c
    clean = all(_is_zero(B[m]) for m in range(n - 1))
    coeffs = [B[m] * (sg ** (n - 1)) for m in range(n - 1, 2 * n - 1)]
    return coeffs, clean


def exponent_sum_terms(table: CoefficientTable, n: int, indexing: str = "standard") -> list:
    """Terms ``(s, c, E)`` of ``S_n = sum_{s=1}^{n-1} c E / u^s``.

    ``indexing="standard"`` pairs ``u^-s`` with ``E_s``.  ``"shifted"``
    pairs it with ``E_{s+1}``, the form sometimes printed for the ``F^±``
    family; the two disagree and the standard one is the one consistent with
    the recurrence.  ``c`` is ``(±1)^s`` for a general table and 1 otherwise.
    """
    if table.E is None:
        raise ValueError("coefficient table has no E_s (ring without antiderivative)")
    if indexing not in ("standard", "shifted"):
        raise ValueError("indexing must be 'standard' or 'shifted'")
    off = 1 if indexing == "shifted" else 0
    sg = table.sign or 1
    if n - 1 + off > table.N:
        raise ValueError(f"need E_{n - 1 + off} but table stops at N={table.N}")
    return [(s, sg**s, table.E[s + off]) for s in range(1, n)]
