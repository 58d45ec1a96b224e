"""Command-line front end: ``borelinv {lambert,kernel,moments,extend,verify}``.

Every report is JSON with a ``config`` header holding the parsed arguments
and the package version; CSV companions start with the same header as a
``#`` comment line. Nothing time- or host-dependent is written, so equal
arguments give byte-identical files.

Exit codes: 0 success, 1 a certificate failed, 2 usage or domain error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import BorelInvError, DomainError, ParamError
from .extension import ExtensionConfig, FormalSeries, borel_roundtrip, prepare, remainder_scan
from .kernel import (
    KernelParams,
    flatness_fit,
    g_real_derivative,
    kernel_e,
    sandwich_fit,
    sector_bound_fit,
)
from .lambert_w import reconstruct_from_w, w_derivative, w_principal
from .moments import MomentTable, moment_bound_fit, moment_crosscheck, monotone_tail
from .quadrature import QuadratureConfig
from .sectors import SectorSpec

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# -- output helpers ---------------------------------------------------------

def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _config_header(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out")}
    cfg["version"] = __version__
    return cfg


def _csv_text(header: dict, columns, rows) -> str:
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_clean(header), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _emit(args, report: dict, csv_text: str | None = None) -> None:
    text = _dumps({"config": _config_header(args), **report})
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(text.encode("utf-8"))
    if csv_text is not None:
        out.with_suffix(".csv").write_bytes(csv_text.encode("utf-8"))


def _parse_grid(spec: str) -> tuple[int, int]:
    try:
        n_r, n_a = (int(v) for v in spec.lower().split("x"))
    except ValueError:
        raise UsageError(f"--grid expects RADIIxANGLES such as 200x65, got {spec!r}") from None
    if n_r < 2 or n_a < 1:
        raise UsageError("--grid needs at least 2 radii and 1 angle")
    return n_r, n_a


def _sector(args) -> SectorSpec:
    return SectorSpec(args.delta, args.rmin, args.rmax)


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"cannot read {text!r} as a complex number") from None


# -- subcommands ------------------------------------------------------------

def cmd_lambert(args) -> int:
    """W, W' and the defining-identity residual at given points or on a sector grid."""
    if args.points:
        z = np.array([_parse_complex(s) for s in args.points])
    else:
        z = _sector(args).grid(*_parse_grid(args.grid)).ravel()
    w = np.atleast_1d(w_principal(z))
    dw = np.atleast_1d(w_derivative(z))
    resid = np.abs(w * np.exp(w) - z) / (1.0 + np.abs(z))
    rows = [(float(a.real), float(a.imag), float(b.real), float(b.imag), float(c.real),
             float(c.imag), float(r)) for a, b, c, r in zip(z, w, dw, resid)]
    cols = ["re_z", "im_z", "re_w", "im_w", "re_dw", "im_dw", "residual"]
    report = {"n_points": len(rows), "max_residual": float(resid.max()),
              "points": [dict(zip(cols, r)) for r in rows]}
    _emit(args, report, _csv_text(_config_header(args), cols, rows))
    return EXIT_OK


def cmd_kernel(args) -> int:
    """Kernel values on a sector grid plus the sector, sandwich and flatness fits."""
    params = KernelParams(args.tau, args.sigma)
    sector = _sector(args)
    n_r, n_a = _parse_grid(args.grid)
    z = sector.grid(n_r, n_a).ravel()
    e = kernel_e(params, z)
    fits = {"sector": sector_bound_fit(params, sector, n_r, n_a).__dict__}
    if params.certified:
        fits["sandwich"] = sandwich_fit(params).__dict__
        fits["flatness"] = flatness_fit(params, sector, n_r, n_a).__dict__
    report = {"a": params.a, "b": params.b, "fits": fits}
    cols = ["re_z", "im_z", "re_e", "im_e", "abs_e"]
    rows = [(float(a.real), float(a.imag), float(b.real), float(b.imag), float(abs(b)))
            for a, b in zip(z, e)]
    _emit(args, report, _csv_text(_config_header(args), cols, rows))
    return EXIT_OK


def cmd_moments(args) -> int:
    """Moment table up to ``--pmax`` and, for 1 < sigma < 2, the two-sided bound fit."""
    params = KernelParams(args.tau, args.sigma)
    if args.fit and not params.certified:
        raise ParamError(
            f"moment bound fit requested with sigma={args.sigma}: the two-sided bound "
            "B1^p M_p <= m(p) <= B2^p M_p is only claimed for 1 < sigma < 2; the sigma >= 2 "
            "variant with p^sigma-power constants is out of scope (use --no-fit to tabulate)"
        )
    table = MomentTable.build(params, args.pmax, QuadratureConfig(rel_tol=args.tol))
    report = {"table": table.to_dict()}
    status = EXIT_OK
    if args.fit:
        fit = moment_bound_fit(table)
        report["bound_fit"] = fit.to_dict()
        report["bound_fit"]["monotone_tail"] = monotone_tail(fit.profile)
    header = _config_header(args)
    csv_text = "# config: " + json.dumps(_clean(header), sort_keys=True) + "\n" + table.to_csv()
    _emit(args, report, csv_text)
    return status


def _load_series(args) -> FormalSeries:
    if args.input is None:
        raise UsageError("extend needs --input SERIES.json")
    try:
        data = json.loads(Path(args.input).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.input} is not valid JSON: {exc}") from None
    return FormalSeries.from_dict(data)


def cmd_extend(args) -> int:
    """Remainder scan (and optionally the round trip) for a series read from ``--input``."""
    series = _load_series(args)
    config = ExtensionConfig(quadrature=QuadratureConfig(rel_tol=args.tol, max_subdivisions=4000))
    ext = prepare(series, config)
    sector = _sector(args)
    n_r, n_a = _parse_grid(args.grid)
    N_max = min(args.nmax, len(series))
    rep = remainder_scan(series, config, sector, N_max, sector.grid(n_r, n_a), extension=ext)
    report = {"remainder": rep.to_dict()}
    if args.roundtrip is not None:
        p_max = min(args.roundtrip, len(series) - 1)
        report["roundtrip"] = borel_roundtrip(series, config, p_max, extension=ext).to_dict()
    header = _config_header(args)
    csv_text = "# config: " + json.dumps(_clean(header), sort_keys=True) + "\n" + rep.to_csv()
    _emit(args, report, csv_text)
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def _check(name: str, passed: bool, **detail) -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _halton_points(n: int, seed: int) -> np.ndarray:
    from scipy.stats import qmc

    u = qmc.Halton(d=2, scramble=True, seed=seed).random(n)
    r = 10.0 ** (-6.0 + 12.0 * u[:, 0])
    theta = (2.0 * u[:, 1] - 1.0) * (math.pi - 1e-9)
    return r * np.exp(1j * theta)


def verify_suite(tau: float, sigma: float, delta: float, seed: int, tol: float,
                 with_roundtrip: bool = False) -> list[dict]:
    """The invariant suite behind ``borelinv verify``; one dict per check."""
    params = KernelParams(tau, sigma)
    if not params.certified:
        raise ParamError("verify covers the certified range 1 < sigma < 2")
    checks = []

    z = _halton_points(10_000, seed)
    w = w_principal(z)
    resid = float(np.max(np.abs(w * np.exp(w) - z) / (1.0 + np.abs(z))))
    checks.append(_check("lambert_identity", resid <= 1e-12, max_residual=resid))
    rec = reconstruct_from_w(w)
    rel = float(np.max(np.abs(rec - z) / np.abs(z)))
    checks.append(_check("lambert_reconstruction", rel <= 1e-10, max_rel_error=rel))

    x = np.geomspace(1e-3, 1e3, 1000)
    pos = bool(np.all(kernel_e(params, x).real > 0))
    zs = 1e-6 * np.exp(1j * np.linspace(-0.9 * math.pi, 0.9 * math.pi, 181))
    near0 = float(np.max(np.abs(kernel_e(params, zs) / zs - 1.0)))
    gp = g_real_derivative(params, np.geomspace(1.0 + 1e-9, 1e12, 1000)[1:])
    checks.append(_check("kernel_basics", pos and near0 <= 1e-3 and float(gp.min()) > 0,
                         positive=pos, max_e_over_z_minus_1=near0, min_g_prime=float(gp.min())))

    sector = SectorSpec(delta, 1e-3, 1e3)
    fit = sector_bound_fit(params, sector)
    fine = sector_bound_fit(params, sector, 400, 129)
    drift = max(abs(fine.constants[k] / fit.constants[k] - 1.0) for k in ("C1", "C2"))
    checks.append(_check("sector_bounds", drift < 0.05, constants=fit.constants, refine_drift=drift))

    sw = sandwich_fit(params)
    sw_long = sandwich_fit(params, np.geomspace(1.0, 1e12, 1001)[1:])
    checks.append(_check("sandwich_interval_fixed",
                         abs(sw_long.constants["log_A"] - sw.constants["log_A"]) < math.log(1.05),
                         log_A=sw.constants["log_A"], log_A_tilde=sw.constants["log_A_tilde"],
                         log_A_to_1e12=sw_long.constants["log_A"],
                         argmin_x=sw.constants["argmin_x"]))
    fl = flatness_fit(params, sector)
    checks.append(_check("flatness_fit", all(0 < v < math.inf for v in fl.constants.values()),
                         constants=fl.constants))

    table = MomentTable.build(params, 60, QuadratureConfig(rel_tol=tol))
    diffs = [abs(table.log_m[p] - moment_crosscheck(params, p)) for p in range(0, 61, 5)]
    checks.append(_check("moments_two_routes", max(diffs) <= 1e-8, max_abs_log_diff=max(diffs)))
    checks.append(_check("moments_log_convex", table.is_log_convex()))
    mfit = moment_bound_fit(table)
    trend = monotone_tail(mfit.profile)
    checks.append(_check("moment_bounds", mfit.spread() <= 2 * math.log(10) and trend == 0,
                         log_B1=mfit.log_B1, log_B2=mfit.log_B2, spread=mfit.spread(),
                         monotone_tail=trend))

    config = ExtensionConfig()
    S1 = SectorSpec(1.0, 1e-3, 1.0)
    zero = FormalSeries(tau, sigma, np.zeros(13))
    zrep = remainder_scan(zero, config, S1, 12, table=table)
    zmax = max(r["remainder"] for r in zrep.rows)
    checks.append(_check("extension_zero_series", zmax <= 1e-12, max_abs_f=zmax))
    moment_series = FormalSeries.moment_series(table, 40)
    mrep = remainder_scan(moment_series, config, S1, 12, table=table)
    var = mrep.root_variation(range(6, 13))
    checks.append(_check("extension_remainder_roots", var < 0.2, c=mrep.c, d=mrep.d,
                         root_variation=var))
    if with_roundtrip:
        rt = borel_roundtrip(moment_series, config, 5, table=table)
        checks.append(_check("borel_roundtrip", rt.max_rel_error() <= 1e-4,
                             max_rel_error=rt.max_rel_error()))
    return checks


def cmd_verify(args) -> int:
    """Run the invariant suite; exit 1 if any certificate fails."""
    checks = verify_suite(args.tau, args.sigma, args.delta, args.seed, args.tol,
                          with_roundtrip=args.roundtrip)
    ok = all(c["passed"] for c in checks)
    _emit(args, {"passed": ok, "checks": checks})
    for c in checks:
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}", file=sys.stderr)
    return EXIT_OK if ok else EXIT_FAILED


# -- argument parsing -------------------------------------------------------

def _common(p: argparse.ArgumentParser, *, delta=1.0, rmin=1e-3, rmax=1e3, grid="200x65"):
    p.add_argument("--tau", type=float, default=1.0, help="weight-sequence scale (default 1)")
    p.add_argument("--sigma", type=float, default=1.5, help="growth exponent (default 1.5)")
    p.add_argument("--delta", type=float, default=delta, help="sector opening in (0, 2)")
    p.add_argument("--rmin", type=float, default=rmin, help="smallest grid radius")
    p.add_argument("--rmax", type=float, default=rmax, help="largest grid radius")
    p.add_argument("--grid", default=grid, help="RADIIxANGLES of the sector grid")
    p.add_argument("--tol", type=float, default=1e-10, help="quadrature relative tolerance")
    p.add_argument("--out", default=None, help="write the JSON report here (CSV alongside)")
    p.add_argument("--seed", type=int, default=0, help="seed for quasi-random samples")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="borelinv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lambert", help="evaluate the principal Lambert W")
    _common(p, grid="20x9")
    p.add_argument("points", nargs="*", help="complex inputs such as 1, -0.2, 3+4j")
    p.set_defaults(func=cmd_lambert)

    p = sub.add_parser("kernel", help="kernel values and bound fits")
    _common(p)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("moments", help="moment table and bound fit")
    _common(p)
    p.add_argument("--pmax", type=int, default=60, help="largest moment index")
    p.add_argument("--no-fit", dest="fit", action="store_false", help="tabulate only")
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("extend", help="extension operator on a series from --input")
    _common(p, rmax=1.0, grid="8x5")
    p.add_argument("--input", default=None, help='series JSON {"tau","sigma","coefficients"}')
    p.add_argument("--nmax", type=int, default=12, help="largest remainder order N")
    p.add_argument("--roundtrip", type=int, default=None, metavar="PMAX",
                   help="also recover c_0..c_PMAX from f by Cauchy integrals")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("verify", help="run the invariant suite end to end")
    _common(p)
    p.add_argument("--roundtrip", action="store_true", help="include the multiprecision round trip")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParamError, DomainError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BorelInvError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
