"""unifex command line: eval, coeffs, sweep, rates, figures.

Exit status 0 on success, 1 on bad input or violated preconditions, 2 on
numerical failure, 64 on usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import errormodel
from .besselexp import Method, bessel_expansion, elementary_bessel_expansion
from .errors import NumericalError, PreconditionError
from .kummerexp import elementary_kummer_expansion, kummer_expansion
from .norlund import norlund_coeffs, pole_analysis
from .refseries import hyp_series

EXIT_OK = 0
EXIT_PRECONDITION = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64

BESSEL_NOTE = "# bessel-type methods evaluate p-1Fp(a; b; -z^2/4) at the given z"
KUMMER_NOTE = "# kummer-type methods evaluate pFp(a; b; -z) at the given z"

# (name, method, a, b, panels); a panel is (re_min, re_max, n_points, N values)
FIGURES = (
    ("fig1", "bessel-elem", (3.0,), (3.5, 5.0), ((0.0, 10.0, 101, (2,)), (10.0, 60.0, 101, (2,)))),
    ("fig2", "bessel", (3.0,), (3.5, 5.0), ((0.0, 10.0, 101, (1, 3, 5)),
                                             (10.0, 60.0, 101, (1, 10, 20)))),
    ("fig3", "bessel-elem", (3.0,), (3.5, 5.0), ((0.0, 10.0, 101, (1, 3, 5)),
                                                  (10.0, 60.0, 101, (1, 10, 20)))),
    ("fig4", "kummer", (1.0, 1.5), (2.0, 3.0), ((0.0, 50.0, 101, (10, 20, 30)),
                                                 (0.0, 50.0, 101, (50, 100, 200)))),
    ("fig5", "kummer-elem", (1.0, 1.5), (2.0, 3.0), ((0.0, 10.0, 101, (20, 40, 80)),
                                                      (10.0, 50.0, 101, (20, 40, 80)))),
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_vector(text: str) -> tuple[complex, ...]:
    """Comma-separated numbers; complex entries as RE+IMj."""
    text = text.strip()
    if not text:
        return ()
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        try:
            out.append(complex(tok))
        except ValueError:
            raise ValueError(f"cannot parse parameter {tok!r}") from None
    return tuple(out)


def parse_z(text: str) -> complex:
    """RE or RE,IM."""
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"cannot parse z {text!r}; use RE or RE,IM")


def parse_ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t.strip()]


def parse_grid(text: str) -> tuple[int, int]:
    try:
        n_re, n_im = text.lower().split("x")
        return int(n_re), int(n_im)
    except ValueError:
        raise ValueError(f"cannot parse grid {text!r}; use NxM") from None


def fmt_complex(z: complex, digits: int = 17) -> str:
    f = f"%.{digits}g"
    if z.imag == 0:
        return f % z.real
    return f"{f % z.real}{'+' if z.imag >= 0 else '-'}{f % abs(z.imag)}j"


def _note(method: str) -> str:
    return BESSEL_NOTE if method.startswith("bessel") else KUMMER_NOTE


def _series_arg(a, b, z):
    if len(a) == len(b) - 1:
        return -(z * z) / 4.0, BESSEL_NOTE
    if len(a) == len(b):
        return -z, KUMMER_NOTE
    return z, "# series evaluates qFp(a; b; z) at the given z"


def cmd_eval(args, out):
    a, b, z = parse_vector(args.a), parse_vector(args.b), parse_z(args.z)
    if args.method == "series":
        arg, note = _series_arg(a, b, z)
        res = hyp_series(a, b, arg)
        if not res.converged:
            raise NumericalError(f"series did not converge in {res.terms_used} terms")
        print(note, file=out)
        print("val_re,val_im,terms_used,precision_bits", file=out)
        print(f"{errormodel.fmt(res.value.real)},{errormodel.fmt(res.value.imag)},"
              f"{res.terms_used},{res.precision_bits}", file=out)
        return EXIT_OK
    N = args.terms
    if args.method == "bessel":
        res = bessel_expansion(a, b, z, N)
    elif args.method == "bessel-elem":
        res = elementary_bessel_expansion(a, b, z, N, m_override=args.m_override)
    elif args.method == "kummer":
        res = kummer_expansion(a, b, z, N)
    else:
        res = elementary_kummer_expansion(a, b, z, N, m_override=args.m_override)
    print(_note(args.method), file=out)
    print("val_re,val_im,n_terms,m,bound_estimate,path", file=out)
    print(f"{errormodel.fmt(res.value.real)},{errormodel.fmt(res.value.imag)},{res.n_terms},"
          f"{res.m},{errormodel.fmt(res.bound_estimate)},{res.path}", file=out)
    return EXIT_OK


def cmd_coeffs(args, out):
    a, b = parse_vector(args.a), parse_vector(args.b)
    table = norlund_coeffs(a, b, args.n, pole_scan=args.pole_scan)
    print("n,g", file=out)
    # the recurrence is good to a few ulps, so 15 digits are all meaningful
    for n, g in enumerate(table.coeffs):
        print(f"{n},{fmt_complex(g, 15)}", file=out)
    try:
        rep = pole_analysis(a, b, scan=args.pole_scan)
        print(f"# rightmost pole real part {errormodel.fmt(rep.rightmost_real)}, "
              f"multiplicity {rep.multiplicity}", file=out)
    except NumericalError:
        print("# no surviving poles: coefficients terminate", file=out)
    return EXIT_OK


def _region(args) -> errormodel.RegionSpec:
    n_re, n_im = parse_grid(args.grid)
    if args.region == "strip":
        return errormodel.RegionSpec.strip(args.lam, args.re_min, args.re_max, n_re, n_im)
    return errormodel.RegionSpec.halfplane(args.lam, args.re_max, args.im_min, args.im_max,
                                           n_re, n_im, re_min=args.re_min)


def cmd_sweep(args, out):
    a, b = parse_vector(args.a), parse_vector(args.b)
    region = _region(args)
    records = errormodel.sweep(args.method, a, b, region.points(), parse_ints(args.terms))
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(_note(args.method) + "\n")
            errormodel.write_records(records, fh)
    else:
        out.write(_note(args.method) + "\n")
        errormodel.write_records(records, out)
    return EXIT_OK


def cmd_rates(args, out):
    a, b = parse_vector(args.a), parse_vector(args.b)
    fit = errormodel.fit_rate(args.method, a, b, _region(args), parse_ints(args.n_list))
    print(_note(args.method), file=out)
    print("n,sup_error", file=out)
    for n, e in zip(fit.n_values, fit.sup_errors):
        print(f"{n},{errormodel.fmt(e)}", file=out)
    print(f"# slope {fit.slope:.4f} expected {fit.expected_slope:.4f} "
          f"r2 {fit.r_squared:.5f} within_tol {fit.within()}", file=out)
    return EXIT_OK


def write_figure(name, method, a, b, panels, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(_note(method) + "\n")
        first = True
        for re_min, re_max, count, ns in panels:
            region = errormodel.RegionSpec("halfplane" if method.startswith("kummer") else "strip",
                                           0.0 if method.startswith("kummer") else 1.0,
                                           (re_min, re_max), grid=(count, 1))
            records = errormodel.sweep(method, a, b, region.points(), ns)
            errormodel.write_records(records, fh, header=first)
            first = False


def cmd_figures(args, out):
    os.makedirs(args.out_dir, exist_ok=True)
    for name, method, a, b, panels in FIGURES:
        path = os.path.join(args.out_dir, f"{name}.csv")
        write_figure(name, method, a, b, panels, path)
        print(path, file=out)
    return EXIT_OK


def _add_params(p):
    p.add_argument("--a", required=True, help="upper parameters, comma-separated")
    p.add_argument("--b", required=True, help="lower parameters, comma-separated")


def _add_region(p):
    p.add_argument("--region", choices=("strip", "halfplane"), default="strip")
    p.add_argument("--lambda", dest="lam", type=float, default=2.0)
    p.add_argument("--re-min", type=float, default=-40.0)
    p.add_argument("--re-max", type=float, default=40.0)
    p.add_argument("--im-min", type=float, default=0.0)
    p.add_argument("--im-max", type=float, default=0.0)
    p.add_argument("--grid", default="41x9", help="NxM grid counts")


def build_parser() -> argparse.ArgumentParser:
    methods = [m.value for m in Method]
    parser = _Parser(prog="unifex", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", help="evaluate one expansion")
    p.add_argument("--method", choices=["series"] + methods, required=True)
    _add_params(p)
    p.add_argument("--z", required=True, help="RE or RE,IM")
    p.add_argument("--terms", type=int, default=10)
    p.add_argument("--m-override", type=int, default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("coeffs", help="Norlund coefficients g_0..g_{n-1}")
    _add_params(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--pole-scan", type=int, default=8)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("sweep", help="errors against the series over a grid")
    p.add_argument("--method", choices=methods, default="bessel")
    _add_params(p)
    _add_region(p)
    p.add_argument("--terms", default="2,4,8,16,32", help="comma-separated N list")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rates", help="fit the decay rate of the sup error")
    p.add_argument("--method", choices=methods, default="bessel")
    _add_params(p)
    _add_region(p)
    p.add_argument("--n-list", default="8,16,32,64,128")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("figures", help="write fig1..fig5 CSV files")
    p.add_argument("--out-dir", default="figures")
    p.set_defaults(func=cmd_figures)
    return parser


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except NumericalError as exc:
        print(f"unifex: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (PreconditionError, ValueError) as exc:
        print(f"unifex: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


def main(argv=None) -> int:
    try:
        code = run(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
