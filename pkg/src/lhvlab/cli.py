"""Command line front end: ``lhvlab {sweep,bell,verify,stats,tradeoff}``.

Exit codes: 0 ok, 2 usage, 3 degenerate pair rate, 4 zero coincidences,
5 cross-path verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import analysis, montecarlo, output, spectral
from .closed_form import closed_curve
from .core import (
    INV_E,
    Curve,
    DegenerateRateError,
    DetectionDensity,
    GridMode,
    Mode,
    NoClosedFormError,
    NotEvenError,
    TheoryConfig,
    ZeroCoincidenceError,
)
from .quadrature import QuadratureGrid, quad_curve, sweep_curve

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_ZERO_COINC, EXIT_VERIFY = 0, 2, 3, 4, 5

# closed vs rectangular rule: the |.| in t leaves kinks, so the rule is only
# second order there; dft vs quad on shared nodes is the same sum
CLOSED_QUAD_TOL = 1e-3
QUAD_DFT_TOL = 1e-6
MC_SIGMAS = 4.0
MC_REFERENCE_POINTS = 10_000
# the stochastic spot check samples at most this many angles on [0, pi]
MC_CHECK_POINTS = 11


class UsageError(ValueError):
    pass


def _density(args) -> DetectionDensity:
    if args.theory == "naive":
        return DetectionDensity.naive()
    if args.theory == "proj":
        return DetectionDensity.projection()
    if args.theory == "pow":
        return DetectionDensity.signed_power(args.exponent if args.exponent is not None else INV_E)
    if args.exponent is None:
        raise UsageError("--theory custom needs --exponent")
    return DetectionDensity.custom(exponent=args.exponent)


def _mode(args) -> Mode:
    if args.mode is not None:
        return Mode(args.mode)
    # the cos detector is posed for an anticorrelated source, the signed
    # power detector for a correlated one
    return Mode.ANTICORRELATED if args.theory in ("naive", "proj") else Mode.CORRELATED


def _config(args, default_grid: str = "full") -> TheoryConfig:
    grid = args.grid or default_grid
    try:
        return TheoryConfig(
            density=_density(args),
            correlation_mode=_mode(args),
            theta_points=args.theta_points,
            phi_points=args.phi_points,
            grid_mode=GridMode(grid),
            seed=args.seed,
            pairs_per_angle=args.pairs,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _method(args, cfg: TheoryConfig) -> str:
    if args.method:
        return args.method
    return "closed" if cfg.density.has_closed_form else "quad"


def _angle(text: str, degrees: bool) -> float:
    try:
        v = float(text)
    except ValueError:
        raise UsageError(f"not an angle: {text!r}") from None
    if not math.isfinite(v):
        raise UsageError(f"not a finite angle: {text!r}")
    return math.radians(v) if degrees else v


def compute_curve(cfg: TheoryConfig, method: str, *, workers: int = 1) -> Curve:
    if method == "closed":
        return sweep_curve(cfg, closed=True)
    if method == "quad":
        return sweep_curve(cfg)
    if method == "dft":
        # 2(P-1) nodes put P nodes on [0, pi] inclusive; 2P nodes put P on [0, pi)
        p = cfg.phi_points
        n = 2 * p if cfg.grid_mode is GridMode.PAPER else 2 * (p - 1)
        full = spectral.spectral_curve(cfg.density, max(n, 4), cfg.correlation_mode)
        return Curve(full.points[:p], "dft")
    if method == "mc":
        return montecarlo.estimate_curve(cfg, workers=workers)
    raise UsageError(f"unknown method {method!r}")


def _emit(text: str, out: str | None) -> None:
    if out:
        output.write_text(out, text)
    else:
        sys.stdout.write(text)


def _provenance(cfg: TheoryConfig, method: str) -> dict:
    return {"method": method, "grid": cfg.grid_mode.value, "seed": cfg.seed,
            "theta_points": cfg.theta_points, "phi_points": cfg.phi_points,
            "density": cfg.density.label, "mode": cfg.correlation_mode.value}


# ---- subcommands -------------------------------------------------------------

def cmd_sweep(args) -> int:
    cfg = _config(args)
    method = _method(args, cfg)
    curve = compute_curve(cfg, method, workers=args.workers)
    manifest = output.RunManifest.for_run(cfg, method)
    if args.format == "json":
        _emit(output.dumps({"manifest": manifest.to_dict(),
                            "provenance": _provenance(cfg, method),
                            "points": output.curve_records(curve),
                            "report": analysis.deviation_report(curve).to_dict()}), args.out)
    else:
        _emit(output.curve_csv(curve), args.out)
        if args.out:
            output.write_text(args.out + ".manifest.json", output.dumps(manifest.to_dict()))
    if args.plot:
        title = f"{cfg.density.label} {cfg.correlation_mode.value} ({method})"
        output.write_text(args.plot, output.curve_svg(curve, title, manifest))
    return EXIT_OK


def _expectation_fn(cfg: TheoryConfig, method: str):
    d, mode = cfg.density, cfg.correlation_mode
    if method == "closed":
        if not d.has_closed_form:
            raise NoClosedFormError(f"no closed form for density {d.label}")
        return lambda p: closed_curve(d, p, mode).e_hv
    if method == "quad":
        g = QuadratureGrid.make(cfg.theta_points, cfg.grid_mode)
        return lambda p: quad_curve(d, np.atleast_1d(p), mode, g).e_hv
    raise UsageError(f"method {method!r} cannot tabulate E for bell; use closed, quad or mc")


def cmd_bell(args) -> int:
    cfg = _config(args)
    method = _method(args, cfg)
    prov = _provenance(cfg, method)
    if args.scan:
        step = _angle(args.step, args.degrees)
        E = _expectation_fn(cfg, method)
        try:
            top = analysis.bell_scan(E, step, limit=args.top)
            count = analysis.count_violations(E, step)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        _emit(output.dumps({"provenance": prov, "step_rad": step, "violations": count,
                            "triples": [t.to_dict() for t in top]}), args.out)
        return EXIT_OK
    parts = (args.angles or "").split(",")
    if len(parts) != 3:
        raise UsageError("--angles takes three comma-separated values")
    a, b, c = (_angle(p, args.degrees) for p in parts)
    if len({a, b, c}) != 3:
        raise UsageError("analyzer angles must be distinct")
    if method == "mc":
        trial = montecarlo.bell_trial(cfg.density, a, b, c, cfg.pairs_per_angle,
                                      cfg.correlation_mode, cfg.seed)
        rep = {"a": a, "b": b, "c": c, "lhs": trial.lhs, "rhs": trial.rhs,
               "lhs_se": trial.lhs_se, "rhs_se": trial.rhs_se,
               "violated": trial.violated}
    else:
        rep = analysis.bell_evaluate(_expectation_fn(cfg, method), a, b, c).to_dict()
    rep["provenance"] = prov
    _emit(output.dumps(rep), args.out)
    return EXIT_OK


def _compare(name: str, x: Curve, y: Curve, tol: float) -> dict:
    c_scale = max(float(np.max(np.abs(x.c))), 1.0)
    dc = float(np.max(np.abs(x.c - y.c))) / c_scale
    dt = float(np.max(np.abs(x.t - y.t) / np.abs(y.t)))
    de = float(np.max(np.abs(x.e_hv - y.e_hv)))
    return {"pair": name, "max_rel_diff_c": dc, "max_rel_diff_t": dt,
            "max_abs_diff_e": de, "tolerance": tol,
            "ok": bool(max(dc, dt, de) <= tol)}


def verify_report(cfg: TheoryConfig, nodes: int = 256, *, with_mc: bool = True,
                  workers: int = 1) -> dict:
    """Run every available path for ``cfg.density`` and compare them pairwise."""
    d, mode = cfg.density, cfg.correlation_mode
    if d.family.value == "naive":
        closed = closed_curve(d, np.linspace(0.0, math.pi, cfg.phi_points), mode)
        return {"density": d.label, "mode": mode.value, "paths": ["closed"],
                "note": "single path", "comparisons": [], "ok": bool(len(closed) > 0)}
    paths = []
    comparisons = []
    node_phi = np.arange(nodes) * (2.0 * math.pi / nodes)
    quad = quad_curve(d, node_phi, mode, QuadratureGrid.make(nodes, GridMode.FULL))
    paths.append("quad")
    try:
        dft = spectral.spectral_curve(d, nodes, mode)
    except NotEvenError:
        dft = None
    if dft is not None:
        paths.append("dft")
        comparisons.append(_compare("quad-dft", quad, dft, QUAD_DFT_TOL))
    if d.has_closed_form:
        half = spectral.half_period_nodes(nodes)
        closed = closed_curve(d, node_phi[half], mode)
        paths.insert(0, "closed")
        comparisons.append(_compare("closed-quad", closed, Curve(quad.points[:len(half)]),
                                    CLOSED_QUAD_TOL))
        if dft is not None:
            comparisons.append(_compare("closed-dft", closed, Curve(dft.points[:len(half)]),
                                        CLOSED_QUAD_TOL))
    if with_mc:
        phi = np.linspace(0.0, math.pi, min(cfg.phi_points, MC_CHECK_POINTS))
        batches = montecarlo.run_batches(cfg, phi, workers=workers)
        ref = quad_curve(d, phi, mode, QuadratureGrid.make(MC_REFERENCE_POINTS, GridMode.FULL))
        est = np.array([b.e_estimate for b in batches])
        # standard errors at the reference value; the plug-in one is 0 when
        # every coincidence agrees, as happens near E = +-1
        se = np.array([b.e_stderr_at(e) for b, e in zip(batches, ref.e_hv)])
        z = np.abs(est - ref.e_hv)
        paths.append("mc")
        comparisons.append({"pair": "mc-quad", "max_abs_diff_e": float(z.max()),
                            "max_sigma": float(np.max(z[se > 0] / se[se > 0], initial=0.0)),
                            "tolerance_sigmas": MC_SIGMAS,
                            "ok": bool(np.all(z <= MC_SIGMAS * se + 1e-12))})
    return {"density": d.label, "mode": mode.value, "nodes": nodes, "paths": paths,
            "comparisons": comparisons, "ok": all(c["ok"] for c in comparisons)}


def cmd_verify(args) -> int:
    cfg = _config(args)
    if args.nodes < 4:
        raise UsageError("--nodes must be >= 4")
    rep = verify_report(cfg, args.nodes, with_mc=not args.no_mc, workers=args.workers)
    rep["provenance"] = {"seed": cfg.seed, "pairs_per_angle": cfg.pairs_per_angle}
    _emit(output.dumps(rep), args.out)
    return EXIT_OK if rep["ok"] else EXIT_VERIFY


def cmd_stats(args) -> int:
    cfg = _config(args)
    method = _method(args, cfg)
    rep = analysis.deviation_report(compute_curve(cfg, method, workers=args.workers))
    if args.format == "csv":
        row = rep.to_dict()
        _emit(",".join(row) + "\n" + ",".join("%.12g" % v for v in row.values()) + "\n", args.out)
    else:
        body = rep.to_dict()
        body["provenance"] = _provenance(cfg, method)
        _emit(output.dumps(body), args.out)
    return EXIT_OK


def parse_exponents(text: str) -> list[float]:
    """``start:stop:step`` (stop inclusive) or a comma-separated list.

    A range that spans 1/e also gets a 1/e row.
    """
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if not step > 0 or stop < start:
                raise UsageError("range needs step > 0 and stop >= start")
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            vals = [round(start + i * step, 12) for i in range(count)]
            if start <= INV_E <= stop and not any(abs(v - INV_E) < 1e-12 for v in vals):
                vals.append(INV_E)
                vals.sort()
        else:
            vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --exponents {text!r}: {exc}") from None
    if not vals or any(not v > 0 for v in vals):
        raise UsageError("exponents must be positive")
    return vals


def cmd_tradeoff(args) -> int:
    exps = parse_exponents(args.exponents)
    if args.exponent is None:
        args.exponent = exps[0]
    cfg = _config(args, default_grid="paper")
    rows = analysis.tradeoff_scan(exps, cfg)
    if args.format == "csv":
        lines = ["exponent,max_abs_dev_e,max_rel_dev_t"]
        lines += ["%.12g,%.12g,%.12g" % (r.exponent, r.max_abs_dev_e, r.max_rel_dev_t) for r in rows]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit(output.dumps({"provenance": _provenance(cfg, "quad"),
                            "rows": [r.to_dict() for r in rows]}), args.out)
    return EXIT_OK


# ---- parser --------------------------------------------------------------------

def _positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1 or v != float(text):
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _seed(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer seed: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--theory", choices=["naive", "proj", "pow", "custom"], default=None,
                        help="detector family (default proj; custom for tradeoff)")
    common.add_argument("--exponent", type=float, default=None,
                        help="detector exponent p in cos^|p| (pow defaults to 1/e)")
    common.add_argument("--mode", choices=["corr", "anticorr"], default=None,
                        help="source correlation; defaults per theory")
    common.add_argument("--method", choices=["closed", "quad", "dft", "mc"], default=None,
                        help="closed form when available, else quadrature")
    common.add_argument("--theta-points", type=_positive_int, default=50)
    common.add_argument("--phi-points", type=_positive_int, default=50)
    common.add_argument("--grid", choices=["paper", "full"], default=None)
    common.add_argument("--pairs", type=_positive_int, default=1_000_000)
    common.add_argument("--seed", type=_seed, default=42)
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--plot", default=None, metavar="PATH.svg")
    common.add_argument("--degrees", action=argparse.BooleanOptionalAction, default=True,
                        help="read angle flags in degrees (default) or radians")
    common.add_argument("--workers", type=_positive_int, default=1)

    parser = argparse.ArgumentParser(prog="lhvlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", parents=[common], help="correlation and rate curve over phi")
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("bell", parents=[common], help="evaluate or scan the Bell inequality")
    p.add_argument("--angles", default=None, help="three analyzer angles, e.g. 0,60,120")
    p.add_argument("--scan", action="store_true")
    p.add_argument("--step", default="2", help="scan grid step (default 2 degrees)")
    p.add_argument("--top", type=_positive_int, default=10)
    p.set_defaults(func=cmd_bell, default_format="json")

    p = sub.add_parser("verify", parents=[common], help="cross-check all computation paths")
    p.add_argument("--nodes", type=int, default=256)
    p.add_argument("--no-mc", action="store_true")
    p.set_defaults(func=cmd_verify, default_format="json")

    p = sub.add_parser("stats", parents=[common], help="deviation statistics of one curve")
    p.set_defaults(func=cmd_stats, default_format="json")

    p = sub.add_parser("tradeoff", parents=[common], help="error channels across exponents")
    p.add_argument("--exponents", required=True, help="start:stop:step or p1,p2,...")
    p.set_defaults(func=cmd_tradeoff, default_format="json", default_theory="custom")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.theory is None:
        # per-command default; set_defaults(theory=...) would leak through
        # the shared parent parser into every subcommand
        args.theory = getattr(args, "default_theory", "proj")
    if args.format is None:
        args.format = args.default_format
    if args.plot and not args.plot.lower().endswith(".svg"):
        parser.error("--plot expects a .svg path")
    try:
        return args.func(args)
    except (UsageError, NoClosedFormError, NotEvenError) as exc:
        print(f"lhvlab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DegenerateRateError as exc:
        print(f"lhvlab: degenerate pair rate: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ZeroCoincidenceError as exc:
        print(f"lhvlab: {exc}", file=sys.stderr)
        return EXIT_ZERO_COINC


if __name__ == "__main__":
    sys.exit(main())
