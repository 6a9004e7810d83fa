"""Command-line entry point: ``elastica-kit <subcommand> [flags]``.

Exit status is 0 on success, 1 when a verification suite fails, 2 on
invalid input and 3 on numerical failure.  Errors are also written as a
JSON record to stderr (and to ``error.json`` when the output directory is
usable).
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import warnings

import numpy as np

from .curve_core import CurveError, PlanarCurve
from .gp_flow import FlowDivergence, bending, curve_from_state, evolve, \
    profile_state, stability_limit, total_curvature, turning_number
from .minimizer import BoundaryConditions, certify_minimizer, minimize_elastica, \
    node_curvature, rectangular_boundary
from .ode_solvers import DegenerateFit, PendulumParams, PendulumState, SMKdVParams, \
    smkdv_period, solve_smkdv, solve_static_sine_gordon
from .quadrature import DomainError, ElasticaParams, ShapeTrace, classify_species, \
    curvature_along, elastica_integrals, elastica_period, smkdv_multiplier
from .verification import SUITES, run_suite

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2, 3
FORMATS = ("csv", "svg", "json")


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


def fmt(value) -> str:
    """17 significant digits, so values round-trip exactly."""
    return format(float(value), ".17g")


def _json_value(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_value(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [pad + _json_value(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt(obj) if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def dumps_json(obj) -> str:
    """JSON with floats at 17 significant digits; non-finite values become null."""
    return _json_value(obj, 2, 0) + "\n"


def write_csv(path, header, columns):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([fmt(v) for v in row])


def _canonical(points, closed):
    pts = np.asarray(points, float)
    if closed or len(pts) < 2:
        return pts
    d = pts[-1] - pts[0]
    if np.hypot(*d) == 0:
        return pts
    ang = -math.atan2(d[1], d[0])
    c, s = math.cos(ang), math.sin(ang)
    return (pts - pts[0]) @ np.array([[c, s], [-s, c]])


def render_svg(curve, width: int = 480, height: int = 480) -> str:
    """SVG 1.1 document with one path, 5% margin and equal axis scaling.

    Open curves are rotated so the chord from first to last point is
    horizontal.  A bounding box of zero extent falls back to a unit box.
    """
    closed = False
    if isinstance(curve, PlanarCurve):
        pts, closed = curve.points, curve.closed
    elif isinstance(curve, ShapeTrace):
        pts = curve.points
    else:
        pts = np.asarray(curve, float)
    if len(pts) < 2:
        raise ValueError("need at least 2 points to draw")
    pts = _canonical(pts, closed)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    extent = hi - lo
    if not np.max(extent) > 0:
        warnings.warn("degenerate bounding box; drawing in a unit box", stacklevel=2)
        lo, extent = lo - 0.5, np.array([1.0, 1.0])
    mx, my = 0.05 * width, 0.05 * height
    scale = min((width - 2 * mx) / max(extent[0], 1e-300), (height - 2 * my) / max(extent[1], 1e-300))
    ox = mx + 0.5 * ((width - 2 * mx) - scale * extent[0])
    oy = my + 0.5 * ((height - 2 * my) - scale * extent[1])
    px = ox + scale * (pts[:, 0] - lo[0])
    py = height - (oy + scale * (pts[:, 1] - lo[1]))
    cmds = [f"M {px[0]:.3f} {py[0]:.3f}"] + [f"L {x:.3f} {y:.3f}" for x, y in zip(px[1:], py[1:])]
    if closed:
        cmds.append("Z")
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">\n'
        f'  <path d="{" ".join(cmds)}" fill="none" stroke="black" stroke-width="1.5"/>\n'
        "</svg>\n"
    )


def sign_arcs(kappa, periodic=True, tol=1e-12) -> int:
    """Number of maximal runs of constant curvature sign (zeros skipped)."""
    sgn = np.sign(np.where(np.abs(kappa) > tol, kappa, 0.0))
    sgn = sgn[sgn != 0]
    if sgn.size == 0:
        return 0
    runs = 1 + int(np.count_nonzero(np.diff(sgn)))
    if periodic and runs > 1 and sgn[0] == sgn[-1]:
        runs -= 1
    return runs


# subcommands

def _params(args):
    return ElasticaParams(args.alpha, args.beta, args.gamma, args.a)


def cmd_trace(args, out):
    p = _params(args)
    if args.x0 is None and args.x1 is None:
        tr = elastica_period(p, args.n)
    elif args.x0 is None or args.x1 is None:
        raise UsageError("give both --x0 and --x1, or neither for a full period")
    else:
        tr = elastica_integrals(p, args.x0, args.x1, args.n)
    kappa = curvature_along(p, tr)
    out.csv("trace.csv", ["s", "x", "y", "kappa"], [tr.s, tr.x, tr.y, kappa])
    out.svg("trace.svg", tr)
    label = classify_species(p)
    return {"length": tr.length, "species": label.tag, "modulus": label.modulus,
            "curvature_sign_arcs": sign_arcs(kappa, periodic=args.x0 is None),
            "points": len(tr.x)}


def cmd_pendulum(args, out):
    sol = solve_static_sine_gordon(PendulumParams(args.A, args.B),
                                   PendulumState(args.phi0, args.dphi0), args.length, args.n)
    H = PendulumParams(args.A, args.B).energy(sol.phi, sol.dphi)
    out.csv("pendulum.csv", ["s", "phi", "dphi", "x", "y"],
            [sol.s, sol.phi, sol.dphi, sol.points[:, 0], sol.points[:, 1]])
    out.svg("pendulum.svg", sol.points)
    return {"energy": float(H[0]), "energy_drift": float(np.max(np.abs(H - H[0])))}


def cmd_smkdv(args, out):
    length = args.length
    if length is None:
        if args.dkappa0 != 0:
            raise UsageError("--length is required when --dkappa0 is nonzero")
        length = smkdv_period(args.a, args.kappa0)
    prof = solve_smkdv(SMKdVParams(args.a, args.kappa0, args.dkappa0), length, args.n)
    E = SMKdVParams(args.a, args.kappa0, args.dkappa0).energy(prof.kappa, prof.dkappa)
    from .curve_core import reconstruct_curve
    curve = reconstruct_curve(prof)
    out.csv("smkdv.csv", ["s", "kappa", "dkappa", "x", "y"],
            [prof.s, prof.kappa, prof.dkappa, curve.x, curve.y])
    out.svg("smkdv.svg", curve)
    return {"length": length, "first_integral": float(E[0]),
            "first_integral_drift": float(np.max(np.abs(E - E[0])))}


def cmd_flow(args, out):
    L = args.L if args.L is not None else 16 * math.pi
    state = profile_state(args.profile, args.N, L, args.amplitude)
    limit = stability_limit(args.N, L, args.i)
    if args.dt > limit:
        raise UsageError(f"--dt {args.dt!r} exceeds the stability bound {limit!r}")
    rows = [[], [], [], [], []]

    def snap(_step, st):
        try:
            curve = curve_from_state(st)
            x, y = curve.x[: st.n], curve.y[: st.n]
        except CurveError:
            # curvature too rough to integrate at this resolution
            x = y = np.full(st.n, np.nan)
        rows[0].extend([st.t] * st.n)
        rows[1].extend(st.s)
        rows[2].extend(st.kappa)
        rows[3].extend(x)
        rows[4].extend(y)

    every = args.every if args.every else max(1, args.steps // 10)
    final = evolve(state, args.i, args.dt, args.steps, callback=snap, callback_every=every)
    if args.steps % every:
        snap(args.steps, final)
    out.csv("flow.csv", ["t", "s", "kappa", "x", "y"], rows)
    out.svg("flow.svg", curve_from_state(final))
    return {
        "t": final.t,
        "energy_drift": abs(bending(final) / bending(state) - 1),
        # against the total absolute curvature, since the total may vanish
        "total_curvature_drift": abs(total_curvature(final) - total_curvature(state))
        / (float(np.sum(np.abs(state.kappa))) * state.ds),
        "turning_number": turning_number(final),
        "stability_limit": limit,
    }


def _open_node_curvature(theta, h, bc):
    """All ``n + 1`` nodes; a free (hinged) end has zero curvature."""
    inner = node_curvature(theta, h)
    first = 2 * (theta[0] - bc.start_angle) / h if bc.start_angle is not None else 0.0
    last = 2 * (bc.end_angle - theta[-1]) / h if bc.end_angle is not None else 0.0
    return np.concatenate([[first], inner, [last]])


def cmd_minimize(args, out):
    if args.case == "rectangular":
        bc, _ = rectangular_boundary()
    elif args.closed:
        if args.length is None:
            raise UsageError("--length is required")
        bc = BoundaryConditions.loop(args.length)
    else:
        missing = [k for k in ("x1", "y1", "length") if getattr(args, k) is None]
        if missing:
            raise UsageError("missing required flags: " + ", ".join("--" + m for m in missing))
        bc = BoundaryConditions((args.x0, args.y0), (args.x1, args.y1), args.length,
                                args.start_angle, args.end_angle)
    seed = None
    if args.closed:
        t = 2 * math.pi * np.arange(256) / 256
        from .curve_core import resample_arclength
        seed = resample_arclength(np.column_stack([1.2 * np.cos(t), 0.8 * np.sin(t)]), 256,
                                  closed=True)
    rep = minimize_elastica(bc, args.n, seed_curve=seed, max_iter=args.max_iter)
    pts = rep.curve.points
    kn = node_curvature(rep.angles, rep.curve.ds, True) if bc.closed \
        else _open_node_curvature(rep.angles, rep.curve.ds, bc)
    out.csv("minimize.csv", ["s", "x", "y", "kappa"], [rep.curve.s, pts[:, 0], pts[:, 1], kn])
    out.svg("minimize.svg", rep.curve)
    cert = certify_minimizer(rep) if rep.converged else None
    summary = {
        "converged": rep.converged, "message": rep.message, "iterations": rep.iterations,
        "energy": rep.energy, "gradient_norm": rep.gradient_norm,
        "constraint_error": rep.constraint_error,
        "multiplier_estimates": {"alpha": rep.multiplier_estimates[0],
                                 "beta": rep.multiplier_estimates[1]},
        "lagrange": {"x": rep.lagrange[0], "y": rep.lagrange[1]},
        "el_residual_norm": rep.el_residual_norm, "noether_deviation": rep.noether_deviation,
        "degenerate": rep.degenerate,
    }
    if cert is not None:
        summary["certification"] = {
            "noether_deviation": cert.noether_deviation, "smkdv_residual": cert.smkdv_residual,
            "smkdv_multiplier": cert.smkdv_multiplier, "pass": cert.passed}
    if not rep.converged:
        raise NumericalFailure(summary)
    return summary


def cmd_verify(args, out):
    report = run_suite(args.suite)
    return report


def cmd_classify(args, out):
    p = _params(args)
    label = classify_species(p)
    return {"species": label.tag, "modulus": label.modulus,
            "smkdv_multiplier": smkdv_multiplier(p)}


class _Output:
    def __init__(self, directory, formats, prefix):
        self.dir, self.formats, self.prefix = directory, formats, prefix
        self.files = []

    def _path(self, name):
        path = os.path.join(self.dir, self.prefix + name)
        self.files.append(path)
        return path

    def csv(self, name, header, columns):
        if "csv" in self.formats:
            write_csv(self._path(name), header, columns)

    def svg(self, name, curve):
        if "svg" in self.formats:
            with open(self._path(name), "w") as fh:
                fh.write(render_svg(curve))

    def json(self, name, obj):
        if "json" in self.formats:
            with open(self._path(name), "w", encoding="utf-8") as fh:
                fh.write(dumps_json(obj))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _finite(text):
    v = float(text)
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError("must be finite")
    return v


def _positive(text):
    v = _finite(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="elastica-kit", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--out", default=".", help="output directory (created if missing)")
    common.add_argument("--formats", default="csv,svg,json",
                        help="comma-separated subset of csv,svg,json")
    common.add_argument("--prefix", default="", help="prefix for output file names")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(handler=fn)
        return p

    p = add("trace", cmd_trace, "elastica shape from the quadrature")
    _quadratic_args(p)
    p.add_argument("--n", type=_positive_int, default=2048, help="samples")
    p.add_argument("--x0", type=_finite, help="start of the x range (default: full period)")
    p.add_argument("--x1", type=_finite, help="end of the x range")

    p = add("pendulum", cmd_pendulum, "static sine-Gordon trajectory")
    p.add_argument("--A", type=_finite, default=0.0, help="coefficient of cos(phi)")
    p.add_argument("--B", type=_finite, default=1.0, help="coefficient of sin(phi)")
    p.add_argument("--phi0", type=_finite, default=0.0, help="initial tangent angle")
    p.add_argument("--dphi0", type=_finite, default=1.0, help="initial curvature")
    p.add_argument("--length", type=_positive, default=10.0, help="arc length")
    p.add_argument("--n", type=_positive_int, default=10_000, help="samples")

    p = add("smkdv", cmd_smkdv, "static mKdV curvature profile")
    p.add_argument("--a", type=_finite, default=-1.0, help="multiplier")
    p.add_argument("--kappa0", type=_finite, default=1.9, help="initial curvature")
    p.add_argument("--dkappa0", type=_finite, default=0.0, help="initial curvature slope")
    p.add_argument("--length", type=_positive, help="arc length, defaults to one period")
    p.add_argument("--n", type=_positive_int, default=10_000, help="samples")

    p = add("flow", cmd_flow, "mKdV-hierarchy curvature flow")
    p.add_argument("--i", type=int, choices=(0, 1, 2), default=1, help="hierarchy member")
    p.add_argument("--N", type=_positive_int, default=256, help="grid points")
    p.add_argument("--L", type=_positive, help="period, default 16 pi")
    p.add_argument("--dt", type=_positive, default=1e-4, help="RK4 step")
    p.add_argument("--steps", type=_positive_int, default=1000)
    p.add_argument("--profile", choices=("cos", "circle", "perturbed-circle"), default="cos")
    p.add_argument("--amplitude", type=_finite, default=0.5,
                   help="perturbation amplitude (perturbed-circle only)")
    p.add_argument("--every", type=_positive_int, help="snapshot interval in steps")

    p = add("minimize", cmd_minimize, "discrete bending-energy minimizer")
    p.add_argument("--case", choices=("rectangular",), help="preset boundary conditions")
    p.add_argument("--x0", type=_finite, default=0.0, help="start point")
    p.add_argument("--y0", type=_finite, default=0.0)
    p.add_argument("--x1", type=_finite, help="end point")
    p.add_argument("--y1", type=_finite)
    p.add_argument("--length", type=_positive, help="curve length")
    p.add_argument("--start-angle", type=_finite, help="clamped tangent angle at the start")
    p.add_argument("--end-angle", type=_finite, help="clamped tangent angle at the end")
    p.add_argument("--closed", action="store_true", help="closed loop through the start point")
    p.add_argument("--n", type=_positive_int, default=1024, help="segments")
    p.add_argument("--max-iter", type=_positive_int, default=100_000)

    p = add("verify", cmd_verify, "run verification suites")
    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")

    p = add("classify", cmd_classify, "species of an elastica")
    _quadratic_args(p)
    return parser


def _quadratic_args(p):
    for k, d in (("alpha", 0.0), ("beta", 0.0), ("gamma", 1.0)):
        p.add_argument("--" + k, type=_finite, default=d, help=f"{k} coefficient of g(x)")
    p.add_argument("--a", type=_finite, default=1.0, help="scale in sin(phi) = g(x)/|a|")


def _error_record(kind, message, out_dir=None, details=None):
    rec = {"error": kind, "message": message}
    if details is not None:
        rec["details"] = details
    text = dumps_json(rec)
    sys.stderr.write(text)
    if out_dir and os.path.isdir(out_dir) and os.access(out_dir, os.W_OK):
        try:
            with open(os.path.join(out_dir, "error.json"), "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError:
            pass


def main(argv=None) -> int:
    parser = build_parser()
    out_dir = None
    try:
        args, extra = parser.parse_known_args(argv)
        if extra:
            raise UsageError("unknown arguments: " + " ".join(extra))
        formats = [f.strip() for f in args.formats.split(",") if f.strip()]
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise UsageError(f"unknown formats: {', '.join(bad)}")
        out_dir = args.out
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as exc:
            raise UsageError(f"cannot create output directory {out_dir!r}: {exc}") from exc
        if not os.access(out_dir, os.W_OK):
            raise UsageError(f"output directory {out_dir!r} is not writable")
        out = _Output(out_dir, formats, args.prefix)
        summary = args.handler(args, out)
        out.json(args.command + ".json", {"command": args.command,
                                          "invocation": list(argv if argv is not None
                                                             else sys.argv[1:]),
                                          "result": summary})
        sys.stdout.write(dumps_json(summary))
        if args.command == "verify" and not summary["pass"]:
            failed = [c["name"] for c in summary["checks"] if not c["pass"]]
            sys.stderr.write("violated: " + "; ".join(failed) + "\n")
            return EXIT_CHECK_FAILED
        return EXIT_OK
    except UsageError as exc:
        _error_record("validation", str(exc), out_dir)
        return EXIT_INVALID
    except NumericalFailure as exc:
        details = exc.args[0] if exc.args else None
        _error_record("numerical", "minimization did not converge", out_dir, details)
        return EXIT_NUMERICAL
    except (FlowDivergence, DomainError, DegenerateFit) as exc:
        details = getattr(exc, "diagnostics", None)
        _error_record("numerical", str(exc), out_dir, details)
        return EXIT_NUMERICAL
    except (ValueError, CurveError) as exc:
        _error_record("validation", str(exc), out_dir)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
