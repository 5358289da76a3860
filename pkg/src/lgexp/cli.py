"""Command-line entry point.

Exit status: 0 success, 2 invalid input, 3 numeric failure (bound or oracle
unavailable at the requested parameters).
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import bessel, oracle
from .algebra import Jet, JetDerivation, PolyDerivation, RationalPoly
from .bounds import BoundInputs, BoundUnavailable, bound_delta_exponent, bound_thm1
from .coefficients import build_coefficients
from .paths import PathSpec, QuadratureError, UncertifiedPath

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def fmt(v, sig: int = 7) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, int) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.{sig - 1}e}"


def _csv(header: list[str], rows, sig: int, meta: str | None = None) -> str:
    lines = []
    if meta:
        lines.append("# " + meta)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(v, sig) for v in row))
    return "\n".join(lines) + "\n"


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, output: str | None):
    if output:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _floats(s: str) -> list[float]:
    try:
        out = [float(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers (got {s!r})") from None
    if not out:
        raise argparse.ArgumentTypeError("expected at least one number")
    return out


def _positive(kind):
    def conv(s):
        v = kind(s)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive (got {s})")
        return v

    return conv


def _digits(args) -> int:
    return args.digits if getattr(args, "digits", None) is not None else oracle.default_digits()


def parse_poly(expr: str, var: str = "x") -> RationalPoly:
    """Polynomial with rational coefficients from an expression such as ``x**2/4 - 1``."""
    import sympy

    sym = sympy.Symbol(var)
    try:
        e = sympy.sympify(expr, locals={var: sym}, rational=True)
        poly = sympy.Poly(e, sym)
    except (sympy.SympifyError, sympy.PolynomialError, TypeError) as exc:
        raise ValueError(f"psi must be a polynomial in {var} with rational coefficients ({exc})") from None
    if poly.free_symbols - {sym}:
        raise ValueError(f"psi must be a polynomial in {var} alone")
    coeffs = [Fraction(str(c)) for c in reversed(poly.all_coeffs())]
    return RationalPoly(coeffs, var)


# commands -------------------------------------------------------------------


def cmd_coeffs(args) -> str:
    if args.model == "bessel":
        table = bessel.build_bessel_model(1, args.N).table
    elif args.model == "poly":
        psi = parse_poly(args.psi, args.var)
        table = build_coefficients(psi, PolyDerivation.standard(args.var, Fraction(args.reference)), args.N, "poly")
    else:
        vals = [Fraction(v) for v in args.psi.split(",")]
        if len(vals) < args.N:
            raise ValueError(f"a jet of length >= N={args.N} is needed (got {len(vals)} Taylor coefficients)")
        table = build_coefficients(Jet(vals, Fraction(args.reference)), JetDerivation(), args.N, "jet")
    return _json(table.to_json())


def cmd_bound(args) -> str:
    if args.model == "bessel":
        if args.z is None:
            raise ValueError("--z is required for the bessel model")
        model = bessel.build_bessel_model(args.nu, args.n + args.r)
        fn = bessel.bound_I if args.branch == "I" else bessel.bound_K
        rep = fn(model, args.z, args.n, args.r, mode=args.mode, series_majorant=args.series_majorant)
        exact = abs(bessel.eta_exact(model, args.z, args.n, args.branch, _digits(args))) if args.exact else None
        zval = args.z
    else:
        if args.path is None or args.psi is None or args.u is None:
            raise ValueError("--psi, --u and --path are required for the poly model")
        if args.r != 0:
            raise ValueError("the poly model supports r = 0 only (the shifted form needs limits of E_s at an infinite endpoint)")
        with open(args.path, encoding="utf-8") as fh:
            path = PathSpec.from_json(json.load(fh))
        psi = parse_poly(args.psi, args.var)
        table = build_coefficients(psi, PolyDerivation.standard(args.var, 0), args.n, "poly")
        rep = bound_thm1(BoundInputs(table, args.n, args.u, path, mode=args.mode))
        exact, zval = None, path.end.real if path.end.imag == 0 else ""
    out = rep.to_json()
    if args.r == 0:
        out["delta_exp"] = bound_delta_exponent(rep.bound)
    if args.out == "json":
        if exact is not None:
            out["exact_error"] = exact
        return _json(out)
    return _csv(["z", "n", "r", "exact_error", "bound", "formula_used"], [[zval, args.n, args.r, exact, rep.bound, rep.formula_used]], args.sig)


def cmd_bessel_table(args) -> str:
    digits = _digits(args)
    rows = bessel.reproduce_table(args.nu, args.n, args.r, args.z, args.branch, digits, args.mode)
    meta = (
        f"nu={fmt(args.nu, args.sig)} n={args.n} r={args.r} branch={args.branch} mode={args.mode} "
        f"digits={digits} nu^-n={fmt(float(args.nu) ** -args.n, args.sig)}"
    )
    if args.plot:
        from .plotting import plot_table

        plot_table(rows, args.plot, f"nu={args.nu:g}, n={args.n}, r={args.r}, branch {args.branch}")
    body = [[r.z, r.eta_abs, r.bound, r.formula] for r in rows]
    if args.out == "json":
        return _json({"meta": meta, "rows": [dict(zip(("z", "eta_abs", "bound", "formula"), b)) for b in body]})
    return _csv(["z", "eta_abs", "bound", "formula"], body, args.sig, meta)


def cmd_bessel_figure(args) -> str:
    model = bessel.build_bessel_model(args.nu, args.n)
    samples = bessel.figure_samples(model, args.nu, args.n, args.diag, args.samples)
    if args.plot:
        from .plotting import plot_diagnostic

        plot_diagnostic(samples, args.diag, args.nu, args.n, args.plot)
    meta = f"diag={args.diag} nu={fmt(args.nu, args.sig)} n={args.n} samples={args.samples}"
    if args.out == "json":
        return _json({"meta": meta, "p": [p for p, _ in samples], "value": [v for _, v in samples]})
    return _csv(["p", args.diag], samples, args.sig, meta)


def cmd_bessel_coeffs(args) -> str:
    model = bessel.build_bessel_model(1, args.N)
    out = model.table.to_json()
    out["k"] = [f"{k.numerator}/{k.denominator}" for k in model.k[1:]]
    out["Etilde_text"] = [str(e) for e in model.Etilde[1:]]
    if args.out == "json":
        return _json(out)
    rows = [[s, str(model.Ftilde[s]), str(model.Etilde[s]), str(model.k[s])] for s in range(1, args.N + 1)]
    return _csv(["s", "Ftilde", "Etilde", "k"], rows, args.sig)


def cmd_nonhomog_demo(args) -> str:
    from .nonhomog import exp_forcing_demo

    rows = exp_forcing_demo(args.u, list(range(1, args.n + 1)), args.r, args.xi, tuple(args.window), Fraction(args.lam))
    if args.plot:
        from .plotting import plot_nonhomog

        plot_nonhomog(rows, args.plot)
    meta = f"psi=0 varpi=exp(lam*xi) lam={args.lam} xi={fmt(args.xi, args.sig)} window={fmt(args.window[0], args.sig)}:{fmt(args.window[1], args.sig)}"
    body = [[r.u, r.n, r.r, r.exact_error, r.bound_r0, r.bound_shifted] for r in rows]
    return _csv(["u", "n", "r", "exact_error", "bound_82", "bound_88"], body, args.sig, meta)


def cmd_oracle(args) -> str:
    digits = _digits(args)
    fn = oracle.bessel_I if args.function == "besseli" else oracle.bessel_K
    return oracle.to_decimal(fn(args.nu, args.x, digits), digits) + "\n"


# parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lgexp", description="Exponential-form Liouville-Green expansions with computable error bounds.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, out=("csv", "json"), default="csv"):
        p.add_argument("--out", choices=out, default=default, help="output format")
        p.add_argument("--output", "-o", help="write to this file instead of stdout")
        p.add_argument("--sig", type=int, default=7, help="significant digits in CSV (default 7)")

    c = sub.add_parser("coeffs", help="coefficient table for bessel, a polynomial psi, or a jet")
    c.add_argument("--model", choices=("bessel", "poly", "jet"), default="poly")
    c.add_argument("--psi", default="0", help="polynomial in --var, or comma-separated Taylor coefficients for jet")
    c.add_argument("--var", default="x")
    c.add_argument("--reference", default="0", help="anchor of E_s (poly) or jet centre")
    c.add_argument("--N", type=_positive(int), default=6)
    common(c, ("json",), "json")
    c.set_defaults(func=cmd_coeffs)

    b = sub.add_parser("bound", help="evaluate an error bound")
    b.add_argument("--model", choices=("bessel", "poly"), default="bessel")
    b.add_argument("--nu", type=_positive(float), default=20.0)
    b.add_argument("--z", type=_positive(float))
    b.add_argument("--branch", choices=("I", "K"), default="I")
    b.add_argument("--n", type=_positive(int), default=5)
    b.add_argument("--r", type=int, default=0)
    b.add_argument("--mode", choices=("majorant", "direct"), default=None)
    b.add_argument("--series-majorant", action="store_true")
    b.add_argument("--exact", action="store_true", help="also compute the oracle relative error")
    b.add_argument("--digits", type=_positive(int))
    b.add_argument("--psi", help="polynomial potential in --var (poly model)")
    b.add_argument("--var", default="x")
    b.add_argument("--u", type=complex)
    b.add_argument("--path", help="PathSpec JSON file (poly model)")
    common(b, ("json", "csv"), "json")
    b.set_defaults(func=cmd_bound)

    bs = sub.add_parser("bessel", help="modified Bessel function application")
    bsub = bs.add_subparsers(dest="bessel_command", required=True, parser_class=_Parser)
    t = bsub.add_parser("table", help="relative errors and bounds on a z grid")
    t.add_argument("--nu", type=_positive(float), default=20.0)
    t.add_argument("--n", type=_positive(int), default=5)
    t.add_argument("--r", type=int, default=5)
    t.add_argument("--z", type=_floats, default=[0.01, 0.1, 1.0, 10.0, 100.0])
    t.add_argument("--branch", choices=("I", "K"), default="I")
    t.add_argument("--mode", choices=("majorant", "direct"), default="majorant")
    t.add_argument("--digits", type=_positive(int))
    t.add_argument("--plot", help="also render a PNG to this path")
    common(t)
    t.set_defaults(func=cmd_bessel_table)

    f = bsub.add_parser("figure", help="diagnostic curves on a p grid")
    f.add_argument("--diag", choices=bessel.DIAGNOSTICS, default="phi")
    f.add_argument("--nu", type=_positive(float), default=20.0)
    f.add_argument("--n", type=_positive(int), default=5)
    f.add_argument("--samples", type=_positive(int), default=512)
    f.add_argument("--plot", help="also render a PNG to this path")
    common(f)
    f.set_defaults(func=cmd_bessel_figure)

    k = bsub.add_parser("coeffs", help="exact coefficient polynomials")
    k.add_argument("--N", type=_positive(int), default=8)
    common(k, ("json", "csv"), "json")
    k.set_defaults(func=cmd_bessel_coeffs)

    nh = sub.add_parser("nonhomog", help="inhomogeneous equation")
    nsub = nh.add_subparsers(dest="nonhomog_command", required=True, parser_class=_Parser)
    d = nsub.add_parser("demo", help="exponential forcing with psi = 0")
    d.add_argument("--u", type=_floats, default=[5.0, 10.0, 20.0])
    d.add_argument("--n", type=_positive(int), default=5, help="orders 1..n")
    d.add_argument("--r", type=int, default=1)
    d.add_argument("--xi", type=float, default=0.0)
    d.add_argument("--window", type=float, nargs=2, default=[-1.0, 1.0])
    d.add_argument("--lam", default="1/2")
    d.add_argument("--plot", help="also render a PNG to this path")
    common(d, ("csv",))
    d.set_defaults(func=cmd_nonhomog_demo)

    o = sub.add_parser("oracle", help="high-precision reference values")
    o.add_argument("function", choices=("besseli", "besselk"))
    o.add_argument("--nu", type=float, required=True)
    o.add_argument("--x", type=_positive(float), required=True)
    o.add_argument("--digits", type=_positive(int))
    o.add_argument("--output", "-o")
    o.set_defaults(func=cmd_oracle)
    return ap


def _validate(args):
    if getattr(args, "r", 0) is not None and getattr(args, "r", 0) < 0:
        raise ValueError(f"r >= 0 required (got {args.r})")
    if args.command == "bound" and args.mode is None:
        args.mode = "majorant" if args.model == "bessel" else "direct"
    if args.command == "nonhomog" and any(u <= 0 for u in args.u):
        raise ValueError("u must be positive")
    if args.command == "oracle" and args.nu < 0:
        raise ValueError(f"nu >= 0 required (got {args.nu})")
    if getattr(args, "sig", 7) < 1:
        raise ValueError("--sig must be at least 1")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        text = args.func(args)
        _emit(text, getattr(args, "output", None))
    except (BoundUnavailable, bessel.OraclePrecisionError, QuadratureError, OverflowError, ZeroDivisionError) as exc:
        print(f"lgexp: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, UncertifiedPath, OSError) as exc:
        print(f"lgexp: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
