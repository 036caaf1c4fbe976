"""Command-line interface.

Subcommands:

* ``grid``     evaluate fields on a lattice and export CSV/JSON/SVG
* ``validate`` run the residual checks; nonzero exit on tolerance breach
* ``peaks``    report strict local maxima of |A|
* ``coeffs``   dump eigenfunction jet coefficients at a point

Defaults reproduce the first-order fundamental picture: a = 0.1, order 1,
a 201x201 lattice on [-5, 5]^2 (odd counts put the analytic peak exactly on
a node).  Exit codes: 0 success, 1 validation failure or runtime error,
2 usage error.
"""

from __future__ import annotations

import argparse
import sys

from ._version import VERSION
from .errors import ABRogueError, UsageError
from .gridio import (GridSpec, RunConfig, grid_evaluate, write_csv,
                     write_json, write_svg_heatmap)
from .seed import SeedConfig, eigenfunction_jet
from .validate import normalization_residual, pde_residual, peak_analysis, \
    zero_curvature_residual

# acceptance thresholds for the `validate` subcommand
_EQ_RESIDUAL_MAX = 2e-2
_ORDER_BAND = (1.8, 2.2)
_NORMALIZATION_MAX = 1e-8
_ZERO_CURVATURE_MAX = 2e-2


def _common_options(parser):
    parser.add_argument("--a", type=float, default=0.1,
                        help="background parameter (default 0.1)")
    parser.add_argument("--order", type=int, default=1,
                        help="solution order N (default 1)")
    parser.add_argument("--m1", type=float, default=0.0,
                        help="real part of the first structural parameter")
    parser.add_argument("--n1", type=float, default=0.0,
                        help="imaginary part of the first structural parameter")
    parser.add_argument("--s", action="append", nargs=3, default=[],
                        metavar=("K", "RE", "IM"),
                        help="structural parameter k (overrides --m1/--n1)")
    parser.add_argument("--xrange", type=float, nargs=2, default=(-5.0, 5.0),
                        metavar=("XMIN", "XMAX"))
    parser.add_argument("--trange", type=float, nargs=2, default=(-5.0, 5.0),
                        metavar=("TMIN", "TMAX"))
    parser.add_argument("--nx", type=int, default=201)
    parser.add_argument("--nt", type=int, default=201)
    parser.add_argument("--method", choices=("closed", "engine", "auto"),
                        default="auto",
                        help="closed forms (orders 1-2) or the iterated engine")


def _seed_config(args):
    n_params = max(args.order - 1, 0)
    s = [0j] * n_params
    if n_params >= 1:
        s[0] = complex(args.m1, args.n1)
    for k_str, re_str, im_str in args.s:
        k = int(k_str)
        if not 1 <= k <= n_params:
            raise UsageError(
                f"--s index {k} outside 1..{n_params} for order {args.order}")
        s[k - 1] = complex(float(re_str), float(im_str))
    return SeedConfig(a=args.a, order=args.order, s=tuple(s))


def _run_config(args, fmt="csv", out=None):
    method = args.method
    if method == "auto":
        method = "closed" if args.order <= 2 else "engine"
    grid = GridSpec(x_min=args.xrange[0], x_max=args.xrange[1],
                    t_min=args.trange[0], t_max=args.trange[1],
                    nx=args.nx, nt=args.nt)
    return RunConfig(seed=_seed_config(args), grid=grid, method=method,
                     fmt=fmt, out=out)


def _cmd_grid(args):
    cfg = _run_config(args, fmt=args.format, out=args.out)
    grid = grid_evaluate(cfg)
    out = cfg.out or f"ab_grid.{cfg.fmt}"
    if cfg.fmt == "csv":
        write_csv(grid, out)
    elif cfg.fmt == "json":
        write_json(grid, out)
    else:
        write_svg_heatmap(grid, args.field, out)
    print(f"wrote {out} ({cfg.grid.nx}x{cfg.grid.nt} lattice, "
          f"method={cfg.method}, level={grid.meta.level})")
    return 0


def _cmd_validate(args):
    cfg = _run_config(args)
    grid = grid_evaluate(cfg)
    report = pde_residual(grid)
    failures = []
    if report.residual_eq1 > _EQ_RESIDUAL_MAX:
        failures.append("residual_eq1")
    if report.residual_eq2 > _EQ_RESIDUAL_MAX:
        failures.append("residual_eq2")
    for name, order in (("convergence_order_eq1", report.convergence_order_eq1),
                        ("convergence_order_eq2", report.convergence_order_eq2)):
        if order is not None and not _ORDER_BAND[0] <= order <= _ORDER_BAND[1]:
            failures.append(name)
    if report.normalization_dev > _NORMALIZATION_MAX:
        failures.append("normalization_dev")
    lam = complex(-0.5 * args.a, 0.5)
    zc = zero_curvature_residual(grid, lam)
    if zc > _ZERO_CURVATURE_MAX:
        failures.append("zero_curvature")
    print(report.to_text())
    print(f"zero_curvature_residual: {zc}")
    if failures:
        print("FAIL: " + ", ".join(failures))
        return 1
    print("OK: all residuals within tolerance")
    return 0


def _cmd_peaks(args):
    cfg = _run_config(args)
    grid = grid_evaluate(cfg)
    report = peak_analysis(grid)
    print(report.to_text())
    return 0


def _cmd_coeffs(args):
    cfg = _seed_config(args)
    psi, phi = eigenfunction_jet(cfg, args.x, args.t)
    print(f"# eigenfunction jet coefficients at x={args.x} t={args.t} "
          f"(a={args.a}, order={args.order})")
    for k in range(cfg.order + 1):
        p = psi.taylor(k)
        q = phi.taylor(k)
        print(f"psi[f^{2 * k}] = {p.val}  d/dt {p.dt}")
        print(f"phi[f^{2 * k}] = {q.val}  d/dt {q.dt}")
    return 0


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ab-rogue",
        description="Rogue-wave solutions of the AB system")
    parser.add_argument("--version", action="version", version=VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    p_grid = sub.add_parser("grid", help="evaluate fields and export")
    _common_options(p_grid)
    p_grid.add_argument("--format", choices=("csv", "json", "svg"),
                        default="csv")
    p_grid.add_argument("--field", choices=("abs_A", "B"), default="abs_A",
                        help="field rendered by --format svg")
    p_grid.add_argument("--out", default=None)
    p_grid.set_defaults(func=_cmd_grid)

    p_val = sub.add_parser("validate", help="run residual checks")
    _common_options(p_val)
    p_val.set_defaults(func=_cmd_validate)

    p_peaks = sub.add_parser("peaks", help="report local maxima of |A|")
    _common_options(p_peaks)
    p_peaks.set_defaults(func=_cmd_peaks)

    p_coeffs = sub.add_parser("coeffs", help="dump jet coefficients")
    _common_options(p_coeffs)
    p_coeffs.add_argument("--x", type=float, default=0.0)
    p_coeffs.add_argument("--t", type=float, default=0.0)
    p_coeffs.set_defaults(func=_cmd_coeffs)
    return parser


def cli_main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except ABRogueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(cli_main())
