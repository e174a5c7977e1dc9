"""Command-line front end.

Results go to stdout (or ``--output``) as JSON with floats at 17
significant digits, or as CSV with a header row for sequence outputs.
Exit status: 0 on success, 1 on a domain error (its name is printed on
stderr), 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import conjugacy as cj
from . import core
from . import suspension as su
from . import torus as tr
from .calculus import AGREEMENT_TOL, PRIMITIVE_TOL, FourierSpectrum, fourier_coeffs
from .contact import require_basic
from .errors import HelicityError
from .forms import ScalarField
from .manifolds import ManifoldId, make_grid

GRID_ENV = "HELICITY_GRID"
DEFAULT_GRID = 48


# ---------------------------------------------------------------------------
# output


def _fmt_float(x):
    if math.isnan(x) or math.isinf(x):
        return "null"
    return "%.17g" % (x + 0.0)


def dumps(obj, indent=0):
    """Deterministic JSON with 17-significant-digit floats."""
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, complex):
        return dumps([obj.real, obj.imag])
    return json.dumps(str(obj))


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_float(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def emit_report(result, args):
    """Write ``result`` (a dict, or a (header, rows) pair for CSV) to the configured sink."""
    if isinstance(result, tuple):
        header, rows, meta = result
        text = to_csv(header, rows) if args.format == "csv" else dumps({**meta, "rows": [dict(zip(header, r)) for r in rows]}) + "\n"
    else:
        text = dumps(result) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# input helpers


def _resolution(args, dim, default=None):
    raw = args.grid
    if raw is None:
        raw = os.environ.get(GRID_ENV) or (default if default is not None else DEFAULT_GRID)
    if isinstance(raw, (list, tuple)):
        vals = [int(v) for v in raw]
    else:
        vals = [int(v) for v in str(raw).replace("x", ",").split(",") if v.strip()]
    if len(vals) == 1:
        vals = vals * dim
    return tuple(vals)


def _grid(args, manifold, default=None):
    m = ManifoldId.parse(manifold)
    from .manifolds import chart

    return make_grid(m, _resolution(args, chart(m).dim, default))


def _load_json(text_or_path):
    p = Path(text_or_path)
    if p.exists():
        return json.loads(p.read_text())
    return json.loads(text_or_path)


def _spectrum(src):
    return FourierSpectrum.from_json(_load_json(src))


def _tolerances(args):
    return {"primitive": args.tol, "agreement": args.agreement_tol}


def _meta(args, grid=None, **extra):
    out = {"tolerances": _tolerances(args)}
    if grid is not None:
        out["grid"] = grid.summary()
    out.update(extra)
    return out


# ---------------------------------------------------------------------------
# subcommands


def _torus_contact(H, grid, args):
    require_basic(H, grid)
    h = tr.TorusHamiltonian(fourier_coeffs(H.expr, max(8, grid.shape[2] // 4)))
    out = {"value": tr.torus_helicity_fourier(h), "method": "FourierFormula", "residual": None, "kappa": tr.kappa()}
    if args.cross_check:
        direct = tr.torus_helicity_direct(h, grid, tol=args.tol)
        out["direct_value"] = direct.value
        out["residual"] = direct.residual
        out["difference"] = abs(direct.value - out["value"])
    out.update(_meta(args, grid))
    return out


def cmd_contact(args):
    grid = _grid(args, args.manifold)
    H = ScalarField.of(args.manifold, args.h)
    if grid.manifold is ManifoldId.TORUS3:
        return _torus_contact(H, grid, args)
    res = core.helicity_contact(H, grid)
    b = core.bounds_check(H, grid)
    out = {"value": res.value, "method": res.method.value, "residual": None, "bounds": b.to_dict()}
    if args.cross_check:
        direct = _direct(H, grid, args)
        out["direct_value"] = direct.value
        out["residual"] = direct.residual
        out["difference"] = abs(direct.value - res.value)
    out.update(_meta(args, grid))
    return out


def _direct(H, grid, args):
    if grid.manifold is ManifoldId.SPHERE3:
        return core.helicity_direct_s3(H, grid, tol=args.tol)
    if grid.manifold is ManifoldId.TORUS3:
        require_basic(H, grid)
        h = tr.TorusHamiltonian(fourier_coeffs(H.expr, max(8, grid.shape[2] // 4)))
        return tr.torus_helicity_direct(h, grid, tol=args.tol)
    raise HelicityError(f"no direct route on {grid.manifold.value}")


def cmd_relative(args):
    grid = _grid(args, args.manifold)
    value = core.relative_helicity_contact(ScalarField.of(args.manifold, args.h), ScalarField.of(args.manifold, args.k), grid)
    return {"value": value, **_meta(args, grid)}


def cmd_direct(args):
    grid = _grid(args, args.manifold)
    res = _direct(ScalarField.of(args.manifold, args.h), grid, args)
    return {**res.to_dict(), **_meta(args)}


def cmd_timedep(args):
    grid = _grid(args, args.manifold)
    res = core.helicity_timedep(ScalarField.of(args.manifold, args.h, allow_time=True), grid, args.time_nodes, args.rule)
    return {**res.to_dict(), **_meta(args)}


def cmd_bounds(args):
    grid = _grid(args, args.manifold)
    return {**core.bounds_check(ScalarField.of(args.manifold, args.h), grid).to_dict(), **_meta(args, grid)}


def cmd_lift(args):
    grid = _grid(args, ManifoldId.SPHERE2)
    res = core.horizontal_lift_helicity(ScalarField.of(ManifoldId.SPHERE2, args.f), grid)
    return {"value": res.value, "constant": res.constant, **_meta(args, grid)}


def cmd_disc_average(args):
    grid = _grid(args, ManifoldId.SPHERE3)
    value = core.filling_disc_average(ScalarField.of(ManifoldId.SPHERE3, args.h), grid.shape[0], grid=grid)
    return {"value": value, **_meta(args, grid)}


def cmd_fiber_linking(args):
    pts = [((float(p[0]), float(p[1])), int(p[2])) for p in _load_json(args.points)]
    value = core.fiber_linking(ScalarField.of(ManifoldId.SPHERE2, args.f), pts)
    return {"value": value, "points": len(pts)}


def cmd_limit(args):
    grid = _grid(args, args.manifold)
    seq = [ScalarField.of(args.manifold, h) for h in args.h]
    res = core.helicity_limit(seq, grid)
    rows = [(i + 1, v, g) for i, (v, g) in enumerate(zip(res.values, res.sup_gaps))]
    return ("i", "value", "sup_gap"), rows, _meta(args, grid)


def _spec(text, support):
    return su.IsotopySpec.of(text, support)


def cmd_suspension(args):
    grid = _grid(args, ManifoldId.SOLID_TORUS, default=",".join(map(str, su.DEFAULT_RESOLUTION)))
    spec = _spec(args.f, args.support)
    res = su.suspension_helicity_direct(spec, grid, tol=args.agreement_tol)
    rel = su.relative_helicity_suspension(spec, grid, tol=args.agreement_tol)
    return {
        "value": res.value,
        "method": res.method.value,
        "calabi": res.extra["calabi"],
        "relative_to_dt": rel,
        "field_residual": res.residual,
        **_meta(args, grid),
    }


def cmd_double_suspension(args):
    grid = _grid(args, ManifoldId.SOLID_TORUS, default=",".join(map(str, su.DEFAULT_RESOLUTION)))
    res = su.double_suspension_helicity(_spec(args.f1, args.support1), _spec(args.f2, args.support2), grid)
    return {**res.to_dict(), **_meta(args, grid)}


def cmd_torus(args):
    h = tr.TorusHamiltonian(_spectrum(args.coeffs))
    flux = tr.torus_flux(h)
    out = {"flux": {"a1": flux.a1, "b1": flux.b1}, "exact": flux.exact}
    # raises NotExact when c_1 != 0
    out["formula_value"] = tr.torus_helicity_fourier(h)
    out["kappa"] = tr.kappa()
    grid = None
    if args.direct:
        grid = _grid(args, ManifoldId.TORUS3, default=tr.DEFAULT_RESOLUTION)
        res = tr.torus_helicity_direct(h, grid, tol=args.tol)
        out["direct_value"] = res.value
        out["residual"] = res.residual
    out.update(_meta(args, grid))
    return out


def _f_spectrum(src):
    return None if src is None else _spectrum(src)


def cmd_furstenberg(args):
    if args.example:
        ex = cj.furstenberg_example(args.example, args.mode)
        rows = [(k + 1, n, a, b) for k, (n, a, b) in enumerate(zip(ex.n_k, ex.c0_partial_sums, ex.c1_partial_sums))]
        if args.format == "csv":
            return ("k", "n_k", "c0_partial_sum", "c1_partial_sum"), rows, {}
        out = ex.to_dict()
        rep = cj.split_function(ex.f, ex.theta)
        out["split_residual"] = rep.residual_sup
        out["small_divisor_min"] = rep.small_divisor_min
        return out
    theta = cj.parse_theta(args.theta)
    f = _f_spectrum(args.f)
    m = cj.FurstenbergMap(theta, args.d, f)
    out = {"theta": float(theta), "d": args.d}
    start = tuple(float(v) for v in args.start.split(","))
    if args.orbit:
        orbit = cj.furstenberg_apply(m, start, args.orbit)
        out["orbit_end"] = orbit[-1].tolist()
        out["discrepancy"] = cj.orbit_discrepancy(m, start, args.orbit, args.cells)
        out["cells"] = args.cells
    if args.split:
        if f is None:
            raise HelicityError("--split needs --f")
        rep = cj.split_function(f, theta)
        out["split"] = rep.to_dict()
        psi = cj.kodaka_psi(rep.g_spectrum, theta, rep.eta, args.d)
        pts = cj.torus_points(args.check_grid)
        out["conjugacy_error"] = cj.conjugacy_check(psi, m, cj.FurstenbergMap(theta, args.d, None), pts)
        out["check_grid"] = args.check_grid
    return out


def cmd_split(args):
    rep = cj.split_function(_spectrum(args.f), cj.parse_theta(args.theta), args.N)
    if args.format == "csv":
        rows = [(m + 1, a, b) for m, (a, b) in enumerate(zip(rep.c0_partial_sums, rep.c1_partial_sums))]
        return ("m", "c0_partial_sum", "c1_partial_sum"), rows, {}
    return rep.to_dict()


def cmd_lipschitz(args):
    tw = cj.TwistHomeo.of(args.rho, args.exponent, args.cutoff)
    pairs = cj.lipschitz_lower_bounds(tw, args.nmax)
    return ("n", "r_n", "L_n"), [(p.n, p.r, p.L) for p in pairs], {"rho": args.rho, "cutoff": args.cutoff}


def cmd_discrepancy(args):
    m = cj.FurstenbergMap(cj.parse_theta(args.theta), args.d, _f_spectrum(args.f))
    start = tuple(float(v) for v in args.start.split(","))
    value = cj.orbit_discrepancy(m, start, args.n, args.cells)
    return {"discrepancy": value, "n": args.n, "cells": args.cells}


# ---------------------------------------------------------------------------
# parser


def _common(p, fmt="json"):
    p.add_argument("--grid", default=None, help="resolution, e.g. 48 or 48,48,48 (env HELICITY_GRID)")
    p.add_argument("--tol", type=float, default=PRIMITIVE_TOL, help="primitive residual tolerance")
    p.add_argument("--agreement-tol", type=float, default=AGREEMENT_TOL, help="cross-check tolerance")
    p.add_argument("--format", choices=("json", "csv"), default=fmt)
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--config", default=None, help="JSON file with option defaults (flags win)")


def build_parser():
    parser = argparse.ArgumentParser(prog="helicity", description="Helicity of strictly contact and suspended fields.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help, fmt="json"):
        p = sub.add_parser(name, help=help)
        _common(p, fmt)
        p.set_defaults(func=fn)
        return p

    for name, fn, text in (
        ("contact", cmd_contact, "closed-form helicity of X_H"),
        ("direct", cmd_direct, "helicity by quadrature of beta ^ d beta"),
        ("bounds", cmd_bounds, "L^2 bounds and tightness"),
    ):
        p = add(name, fn, text)
        p.add_argument("--manifold", default="s3", choices=("s3", "t3"))
        p.add_argument("--h", required=True)
        if name == "contact":
            p.add_argument("--cross-check", action="store_true")

    p = add("relative", cmd_relative, "relative helicity R(X_H, X_K)")
    p.add_argument("--manifold", default="s3", choices=("s3",))
    p.add_argument("--h", required=True)
    p.add_argument("--k", required=True)

    p = add("timedep", cmd_timedep, "helicity of a time-dependent H_t")
    p.add_argument("--manifold", default="s3", choices=("s3",))
    p.add_argument("--h", required=True)
    p.add_argument("--time-nodes", type=int, default=16)
    p.add_argument("--rule", choices=("gauss", "trapezoid"), default="gauss")

    p = add("lift", cmd_lift, "helicity of the horizontal lift of X_F")
    p.add_argument("--f", required=True)

    p = add("disc-average", cmd_disc_average, "integral of H d alpha over the filling disc")
    p.add_argument("--h", required=True)

    p = add("fiber-linking", cmd_fiber_linking, "linking with a signed set of fibres")
    p.add_argument("--f", required=True)
    p.add_argument("--points", required=True, help="JSON [[phi, psi, sign], ...] or a file")

    p = add("limit", cmd_limit, "helicities along a sequence", fmt="csv")
    p.add_argument("--manifold", default="s3", choices=("s3",))
    p.add_argument("--h", action="append", required=True, help="repeat for each element")

    p = add("suspension", cmd_suspension, "suspension of a disc isotopy")
    p.add_argument("--f", required=True, help="Hamiltonian in r, theta, t")
    p.add_argument("--support", type=float, default=0.9)

    p = add("double-suspension", cmd_double_suspension, "double suspension on S^3")
    p.add_argument("--f1", default="0")
    p.add_argument("--f2", default="0")
    p.add_argument("--support1", type=float, default=0.9)
    p.add_argument("--support2", type=float, default=0.9)

    p = add("torus", cmd_torus, "Fourier helicity on T^3")
    p.add_argument("--coeffs", required=True, help="spectrum JSON file or literal")
    p.add_argument("--direct", action="store_true")

    p = add("furstenberg", cmd_furstenberg, "skew products, splitting and the Furstenberg example")
    p.add_argument("--theta", default="golden")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--f", default=None)
    p.add_argument("--start", default="0,0")
    p.add_argument("--split", action="store_true")
    p.add_argument("--orbit", type=int, default=0)
    p.add_argument("--cells", type=int, default=8)
    p.add_argument("--check-grid", type=int, default=256)
    p.add_argument("--example", type=int, default=0, help="number of terms K")
    p.add_argument("--mode", choices=("strict", "relaxed"), default="strict")

    p = add("split", cmd_split, "solve the splitting equation")
    p.add_argument("--f", required=True)
    p.add_argument("--theta", default="golden")
    p.add_argument("--N", type=int, default=None)

    p = add("lipschitz", cmd_lipschitz, "Lipschitz lower bounds for a twist", fmt="csv")
    p.add_argument("--rho", default="r^-2")
    p.add_argument("--exponent", type=float, default=2.0)
    p.add_argument("--cutoff", type=float, default=0.9)
    p.add_argument("--nmax", type=int, default=20)

    p = add("discrepancy", cmd_discrepancy, "box-count discrepancy of an orbit")
    p.add_argument("--theta", default="golden")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--f", default=None)
    p.add_argument("--start", default="0,0")
    p.add_argument("--n", type=int, default=100000)
    p.add_argument("--cells", type=int, default=8)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    config = json.loads(Path(known.config).read_text())
    args = parser.parse_args(argv)
    # re-parse with config values installed as defaults so explicit flags still win
    sub = parser._subparsers._group_actions[0].choices[args.command]
    sub.set_defaults(**{k.replace("-", "_"): v for k, v in config.items()})
    return parser.parse_args(argv)


def run(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.func(args)
        emit_report(result, args)
    except HelicityError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
