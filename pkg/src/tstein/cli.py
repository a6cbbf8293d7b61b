"""Command-line entry point: ``tstein <subcommand> ...``.

Exit status is 0 on success, 1 on invalid input and 2 when a numerical
routine (quadrature, Fourier inversion, rejection sampling) fails.  The seed
defaults to 0xC0FFEE; TSTEIN_SEED overrides it and --seed overrides both.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import os
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import applications as app
from . import __version__
from .density import density_grid
from .errors import NumericalError, ParameterError
from .levy_cf import cf, cf_t
from .params import load_params
from .sampling import ChaosSpec, YSpec, sample_tsd
from .semigroup import check_bounds, solve_stein
from .stein_op import SteinOperatorSpec, identity_residual
from .testfunctions import builtin
from .distances import smooth_discrepancy, wasserstein1

DEFAULT_SEED = 0xC0FFEE
SCHEMA_VERSION = 1

log = logging.getLogger("tstein")


# ---------------------------------------------------------------------------
# I/O helpers


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path: Optional[str], columns: Sequence[str], rows, header: Optional[str] = None) -> None:
    buf = io.StringIO()
    if header:
        buf.write(f"# {header}\n")
    buf.write(",".join(columns) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    _emit(path, buf.getvalue())


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path: Optional[str], payload: dict) -> None:
    doc = {"schema_version": SCHEMA_VERSION, **payload}
    _emit(path, json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n")


def _emit(path: Optional[str], text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def read_column(path: str) -> np.ndarray:
    """First numeric column of a CSV, skipping '#' comments and a header line."""
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        field = line.split(",")[0]
        try:
            vals.append(float(field))
        except ValueError:
            if vals:
                raise ValueError(f"{path}: non-numeric value {field!r}") from None
    if not vals:
        raise ValueError(f"{path}: no values")
    return np.asarray(vals)


def read_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: invalid JSON ({exc})") from None


def resolve_seed(flag: Optional[str]) -> int:
    raw = flag if flag is not None else os.environ.get("TSTEIN_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        seed = int(str(raw), 0)
    except ValueError:
        raise ValueError(f"seed must be an integer, got {raw!r}") from None
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    return seed


def _builtin(name: str):
    if name.startswith("builtin:"):
        name = name[len("builtin:"):]
    return builtin(name)


# ---------------------------------------------------------------------------
# Subcommands


def cmd_cf(a) -> int:
    p = load_params(a.params)
    z = np.linspace(a.zmin, a.zmax, a.n)
    v = cf(p, z) if a.t is None else cf_t(p, z, a.t)
    write_csv(a.out, ["z", "re", "im"], zip(z, v.real, v.imag), p.label())
    return 0


def cmd_density(a) -> int:
    p = load_params(a.params)
    g = density_grid(p, a.center, a.halfwidth, a.n)
    header = f"{p.label()} atom={_fmt(g.atom)} n={g.meta['n']}"
    write_csv(a.out, ["x", "pdf"], zip(g.x, g.values), header)
    return 0


def cmd_sample(a) -> int:
    p = load_params(a.params)
    seed = resolve_seed(a.seed)
    s = sample_tsd(p, a.n, seed, a.threads)
    write_csv(a.out, ["value"], ((v,) for v in s.values), f"spec={s.spec} seed={seed}")
    return 0


def cmd_stein_residual(a) -> int:
    p = load_params(a.params)
    x = read_column(a.samples)
    f = _builtin(a.f)
    r = identity_residual(SteinOperatorSpec(p, a.nodes), x, f)
    write_json(a.out, {"params": p.to_dict(), "f": f.name, "estimate": r.estimate,
                       "stderr": r.stderr, "n": r.n, "operator": "-x f(x) + int f(x+u) u nu(du)"})
    return 0


def cmd_solve_stein(a) -> int:
    p = load_params(a.params)
    h = _builtin(a.h)
    sol = solve_stein(p, h, a.xmin, a.xmax, a.n, threads=a.threads)
    x = sol.f.x
    res = sol.residual(x, on_error="nan")
    write_csv(a.out, ["x", "f", "f1", "f2", "f3", "residual"],
              zip(x, sol.grid(0), sol.grid(1), sol.grid(2), sol.grid(3), res),
              f"{p.label()} h={h.name} Eh={_fmt(sol.eh)}")
    if a.report:
        checks = [{"name": c.name, "measured": c.measured, "bound": c.bound, "slack": c.slack}
                  for c in check_bounds(sol)]
        inner = (x >= -4) & (x <= 4)
        write_json(a.report, {"params": p.to_dict(), "h": h.name, "Eh": sol.eh,
                              "sup_residual_[-4,4]": float(np.nanmax(np.abs(res[inner]))) if inner.any() else None,
                              "residual_unconverged_points": int(np.isnan(res).sum()),
                              "bounds": checks})
    return 0


def cmd_distance(a) -> int:
    xs, ys = read_column(a.xs), read_column(a.ys)
    d = smooth_discrepancy(xs, ys, a.r)
    write_json(a.out, {"w1": wasserstein1(xs, ys), "smooth_lower_bound": d.value,
                       "stderr": d.stderr, "r": a.r,
                       "entries": [{"name": e.name, "diff": e.diff, "stderr": e.stderr} for e in d.entries]})
    return 0


def cmd_compare_bound(a) -> int:
    c = {"alpha1": 1.0, "lam1": 2.0, "alpha2": 1.2, "lam2": 2.5, "n": 100000, **read_config(a.config)}
    seed = resolve_seed(a.seed if a.seed is not None else c.get("seed"))
    r = app.compare_experiment(c["alpha1"], c["lam1"], c["alpha2"], c["lam2"], int(c["n"]), seed, a.threads)
    payload = {"config": c, "seed": seed, "bound": r.bound, "discrepancy": r.discrepancy,
               "stderr": r.stderr, "within_bound": r.within_bound}
    write_json(a.out, payload)
    if a.table:
        write_csv(a.table, ["alpha1", "lam1", "alpha2", "lam2", "bound", "discrepancy", "stderr"],
                  [(r.alpha1, r.lam1, r.alpha2, r.lam2, r.bound, r.discrepancy, r.stderr)])
    return 0


def cmd_geo_rate(a) -> int:
    c = {"lam": 2.0, "y": "two_point", "p": [0.2, 0.1, 0.05, 0.02, 0.01], "n": 1000000,
         **read_config(a.config)}
    seed = resolve_seed(a.seed if a.seed is not None else c.get("seed"))
    y = YSpec.matched(c["y"], c["lam"]) if "a" not in c else YSpec(c["y"], c["a"])
    rep = app.rate_experiment(c["lam"], y, c["p"], int(c["n"]), seed, a.threads)
    rows = [{"p": q.p, "discrepancy": q.discrepancy, "stderr": q.stderr, "bound": q.bound,
             "coupling": q.coupling, "coupling_stderr": q.coupling_stderr,
             "coupling_exact": q.coupling_exact} for q in rep.points]
    write_json(a.out, {"config": c, "seed": seed, "y": {"kind": y.kind, "a": y.a, "rho": y.rho},
                       "points": rows, "slope": rep.slope, "slope_ci": list(rep.slope_ci)})
    if a.table:
        write_csv(a.table, ["p", "discrepancy", "stderr", "bound", "coupling", "coupling_stderr"],
                  [(q.p, q.discrepancy, q.stderr, q.bound, q.coupling, q.coupling_stderr) for q in rep.points])
    return 0


def cmd_chaos_vg(a) -> int:
    c = {"alpha": 1.0, "lam": 2.0, "n": 100000, **read_config(a.config)}
    seed = resolve_seed(a.seed if a.seed is not None else c.get("seed"))
    chaos = ChaosSpec(tuple(c["eigenvalues"])) if "eigenvalues" in c else app.exact_chaos(c["alpha"], c["lam"])
    r = app.vg_chaos_experiment(chaos, c["alpha"], c["lam"], int(c["n"]), seed, a.threads)
    write_json(a.out, {"config": c, "seed": seed, "eigenvalues": list(r.eigenvalues),
                       "cumulants": r.cumulants, "radicand": r.radicand, "bound": r.bound,
                       "discrepancy": r.discrepancy, "stderr": r.stderr, "w1": r.w1,
                       "within_bound": r.within_bound})
    if a.table:
        write_csv(a.table, ["m", "kappa"], sorted(r.cumulants.items()))
    return 0


def cmd_selfcheck(a) -> int:
    from .selfcheck import run_all

    results = run_all()
    width = max(len(name) for name, _, _ in results)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'}  {name:<{width}}  {detail}")
    if a.out:
        write_json(a.out, {"suites": [{"name": n, "pass": ok, "detail": d} for n, ok, d in results]})
    return 0 if all(ok for _, ok, _ in results) else 2


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tstein", description="Stein's method toolkit for tempered stable laws.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, desc=None):
        p = sub.add_parser(name, help=help_, description=desc or help_)
        p.set_defaults(func=fn)
        return p

    p = add("cf", cmd_cf, "characteristic function on a z grid (columns z, re, im)")
    p.add_argument("--params", required=True)
    p.add_argument("--zmin", type=float, default=-10.0)
    p.add_argument("--zmax", type=float, default=10.0)
    p.add_argument("--n", type=int, default=201)
    p.add_argument("--t", type=float, default=None, help="cf of X_(t) instead of X")
    p.add_argument("--out")

    p = add("density", cmd_density, "density by Fourier inversion (columns x, pdf)")
    p.add_argument("--params", required=True)
    p.add_argument("--center", type=float)
    p.add_argument("--halfwidth", type=float)
    p.add_argument("--n", type=int, default=4096)
    p.add_argument("--out")

    p = add("sample", cmd_sample, "draw samples (one value per line after a provenance header)")
    p.add_argument("--params", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out")

    p = add("stein-residual", cmd_stein_residual, "Monte Carlo mean of the Stein operator over samples",
            "Monte Carlo mean of A f(x) = -x f(x) + int f(x+u) u nu(du) over the samples. "
            "The jump integral carries the weight u; written without it the identity "
            "fails for the gamma and VG special cases.")
    p.add_argument("--params", required=True)
    p.add_argument("--samples", required=True)
    p.add_argument("--f", default="builtin:gauss",
                   help="builtin:gauss|sin_exp|sin_gauss|tanh|bump|sin:<w>[:<phi>]")
    p.add_argument("--nodes", type=int, default=64)
    p.add_argument("--out")

    p = add("solve-stein", cmd_solve_stein, "solve the Stein equation on a grid",
            "Columns: x, f (f_h), f1, f2, f3 (its derivatives), residual (A f_h - h + E h; "
            "nan where the jump quadrature does not converge, typically near the grid ends).")
    p.add_argument("--params", required=True)
    p.add_argument("--h", default="builtin:tanh")
    p.add_argument("--xmin", type=float, default=-16.0)
    p.add_argument("--xmax", type=float, default=16.0)
    p.add_argument("--n", type=int, default=1601)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--report", help="also write a JSON report of the norm-bound checks")
    p.add_argument("--out")

    p = add("distance", cmd_distance, "W1 and dictionary lower estimate between two samples")
    p.add_argument("--xs", required=True)
    p.add_argument("--ys", required=True)
    p.add_argument("--r", type=int, default=3)
    p.add_argument("--out")

    for name, fn, help_, cols in [
        ("compare-bound", cmd_compare_bound, "comparison bound between two symmetric VG laws",
         "config keys alpha1, lam1, alpha2, lam2, n, seed; table columns alpha1, lam1, alpha2, lam2, "
         "bound, discrepancy, stderr"),
        ("geo-rate", cmd_geo_rate, "geometric-sum Laplace approximation rate",
         "config keys lam, y (two_point|uniform|laplace), a, p (list), n, seed; table columns p, "
         "discrepancy, stderr, bound, coupling, coupling_stderr"),
        ("chaos-vg", cmd_chaos_vg, "second-chaos VG approximation via cumulants",
         "config keys eigenvalues (default: exact representation), alpha, lam, n, seed; "
         "table columns m, kappa")]:
        p = add(name, fn, help_, f"{help_}.  {cols}.")
        p.add_argument("--config")
        p.add_argument("--seed")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out")
        p.add_argument("--table")

    p = add("selfcheck", cmd_selfcheck, "run quick property suites and print PASS/FAIL per suite")
    p.add_argument("--out")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses 2 for usage errors; here 2 means a numerical failure
        return 1 if exc.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:  # rejection sampler abort
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ParameterError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
