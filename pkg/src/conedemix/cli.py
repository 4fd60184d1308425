"""Command-line front door: thresholds, curves, geometry, single solves, and
experiment sweeps with reproducible seeding."""

import argparse
import json
import sys

import numpy as np

from . import __version__, cones, curves, thresholds
from .experiments import (
    ExperimentConfig,
    crossing_point,
    extract_contour,
    run_channel,
    run_mca,
    run_rank_sparsity,
)
from .numerics import RngState
from .random_models import haar_orthogonal
from .solvers import (
    DEFAULT_GAMMA,
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    DemixProblem,
    GaugeSpec,
    solve_demix,
)


def _parse_grid(text: str) -> tuple:
    """Parse 'a:b:step' into an inclusive tuple of grid values."""
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid must be a:b:step, got {text!r}") from exc
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError(f"need a <= b and step > 0 in {text!r}")
    n = int(round((b - a) / step))
    vals = tuple(round(a + i * step, 12) for i in range(n + 1) if a + i * step <= b + 1e-12)
    return vals


def _header(args) -> str:
    parts = [f"# version={__version__}"]
    for name in ("seed", "tol", "max_iter", "d", "n", "trials"):
        if getattr(args, name, None) is not None:
            parts.append(f"# {name}={getattr(args, name)}")
    return "\n".join(parts)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="conedemix",
                                 description="Convex demixing thresholds, geometry, and experiments")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="verb", required=True)

    th = sub.add_parser("threshold", help="decay-threshold values")
    th.add_argument("family", choices=["l1", "orthant", "schatten1", "operator", "subspace"])
    th.add_argument("--tau", type=float)
    th.add_argument("--psi", type=float, default=0.0)
    th.add_argument("--rho", type=float)
    th.add_argument("--sigma", type=float)
    th.add_argument("--out")

    cv = sub.add_parser("curve", help="phase-transition curves and bound constants")
    cv.add_argument("family", choices=["mca-weak", "mca-strong", "channel",
                                       "rank-sparsity", "matrix-bounds"])
    cv.add_argument("--grid", type=_parse_grid)
    cv.add_argument("--out")

    dm = sub.add_parser("demix", help="solve a single demixing instance from JSON")
    dm.add_argument("--infile", required=True, dest="infile")
    dm.add_argument("--tol", type=float, default=DEFAULT_TOL)
    dm.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, dest="max_iter")
    dm.add_argument("--gamma", type=float, default=DEFAULT_GAMMA)
    dm.add_argument("--out")

    cn = sub.add_parser("cones", help="conic geometry computations")
    cn.add_argument("op", choices=["volumes", "kinematic", "width", "intersect"])
    cn.add_argument("--d", type=int, required=True)
    cn.add_argument("--samples", type=int)
    cn.add_argument("--seed", type=int, default=0)
    cn.add_argument("--out")

    ex = sub.add_parser("experiment", help="Monte Carlo solver sweeps")
    ex.add_argument("kind", choices=["mca", "channel-benign", "channel-erase", "rank-sparsity"])
    ex.add_argument("--d", type=int)
    ex.add_argument("--n", type=int)
    ex.add_argument("--grid", type=_parse_grid)
    ex.add_argument("--grid2", type=_parse_grid)
    ex.add_argument("--trials", type=int)
    ex.add_argument("--seed", type=int, default=0)
    ex.add_argument("--tol", type=float, default=DEFAULT_TOL)
    ex.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, dest="max_iter")
    ex.add_argument("--threads", type=int, default=1)
    ex.add_argument("--paper-scale", action="store_true", dest="paper_scale")
    ex.add_argument("--out")
    return ap


def _cmd_threshold(args) -> int:
    fam = args.family
    if fam == "l1":
        if args.tau is None:
            raise ValueError("threshold l1 requires --tau")
        rows = [("theta_l1", thresholds.theta_l1(args.tau, args.psi))]
        if args.psi == 0.0:
            rows.append(("kappa_l1", thresholds.kappa_l1(args.tau)))
    elif fam == "orthant":
        rows = [("theta_orthant", thresholds.theta_orthant(args.psi))]
    elif fam == "schatten1":
        if args.rho is None:
            raise ValueError("threshold schatten1 requires --rho")
        rows = [("theta_schatten1", thresholds.theta_schatten1(args.rho))]
    elif fam == "operator":
        rows = [("theta_operator", thresholds.theta_operator())]
    else:
        if args.sigma is None:
            raise ValueError("threshold subspace requires --sigma")
        rows = [("theta_subspace", thresholds.theta_subspace(args.sigma))]
    print(_header(args))
    for name, val in rows:
        print(f"{name} = {val:.10f}")
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write("name,value\n")
            for name, val in rows:
                fh.write(f"{name},{val!r}\n")
    return 0


def _cmd_curve(args) -> int:
    print(_header(args))
    fam = args.family
    if fam == "channel":
        weak = curves.channel_weak_threshold()
        strong = curves.channel_strong_threshold()
        print(f"channel_weak_threshold = {weak:.10f}")
        print(f"channel_strong_threshold = {strong:.10f}")
        if args.out:
            with open(args.out, "w") as fh:
                json.dump({"weak": weak, "strong": strong}, fh, indent=2)
                fh.write("\n")
        return 0
    if fam == "matrix-bounds":
        bounds = curves.matrix_demix_bounds()
        for name, val in bounds.items():
            print(f"{name} = {val:.10f}")
        if args.out:
            with open(args.out, "w") as fh:
                json.dump(bounds, fh, indent=2)
                fh.write("\n")
        return 0
    fn = {"mca-weak": curves.mca_weak_curve,
          "mca-strong": curves.mca_strong_curve,
          "rank-sparsity": curves.rank_sparsity_curve}[fam]
    curve = fn(grid=args.grid) if args.grid else fn()
    print(f"{fam}: {len(curve.points)} points "
          f"({curve.x_label} -> {curve.y_label}, {curve.kind})")
    for x, y in curve.points[:10]:
        print(f"  {x:.6f}  {y:.6f}")
    if len(curve.points) > 10:
        print(f"  ... ({len(curve.points) - 10} more)")
    if args.out:
        curve.to_csv(args.out, sidecar={"family": fam, "version": __version__})
    return 0


def _cmd_demix(args) -> int:
    with open(args.infile) as fh:
        spec = json.load(fh)
    prob = DemixProblem(
        np.asarray(spec["z0"], dtype=float),
        np.asarray(spec["Q"], dtype=float),
        GaugeSpec(spec["objective"]["kind"], int(spec["objective"]["shape"])),
        GaugeSpec(spec["constraint"]["kind"], int(spec["constraint"]["shape"])),
        float(spec["alpha"]))
    report = solve_demix(prob, gamma=args.gamma, max_iter=args.max_iter, tol=args.tol)
    print(_header(args))
    print(f"converged = {report.converged}")
    print(f"iterations = {report.iterations}")
    print(f"residual = {report.residual:.3e}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    return 0


def _cmd_cones(args) -> int:
    print(_header(args))
    d = args.d
    if args.op == "volumes":
        if args.samples:
            prof = cones.mc_intrinsic_volumes(cones.orthant_cone(d), args.samples,
                                              RngState(args.seed))
        else:
            prof = cones.exact_orthant_volumes(d)
        for j, v in enumerate(prof.values):
            print(f"v_{j - 1} = {float(v)!r}")
        if args.out:
            prof.to_csv(args.out)
        return 0
    if args.op == "kinematic":
        prof = cones.exact_orthant_volumes(d)
        p = cones.kinematic_probability(prof, prof)
        print(f"P(orthant meets rotated orthant, d={d}) = {float(p)!r}")
        return 0
    if args.op == "width":
        samples = args.samples or 10_000
        mean, se = cones.estimate_gaussian_width(cones.orthant_cone(d), samples,
                                                 RngState(args.seed))
        print(f"width_mean = {mean!r}")
        print(f"width_se = {se!r}")
        return 0
    # intersect: one Haar draw for two orthants
    Q = haar_orthogonal(d, RngState(args.seed))
    hit = cones.intersects_nontrivially(cones.orthant_cone(d), cones.orthant_cone(d), Q)
    print(f"intersects_nontrivially = {hit}")
    return 0


def _cmd_experiment(args) -> int:
    kind = args.kind.replace("-", "_")
    if kind == "rank_sparsity":
        n = args.n or (35 if args.paper_scale else 20)
        dim = n
        trials = args.trials or (25 if args.paper_scale else 20)
        axis1 = args.grid or _parse_grid("0.05:0.30:0.05")
        axis2 = args.grid2 or _parse_grid("0.05:0.50:0.05")
    elif kind == "mca":
        dim = args.d or (100 if args.paper_scale else 40)
        trials = args.trials or (25 if args.paper_scale else 20)
        axis1 = args.grid or _parse_grid("0.05:0.45:0.05")
        axis2 = args.grid2 or axis1
    else:
        dim = args.d or (100 if args.paper_scale else 100)
        trials = args.trials or (25 if args.paper_scale else 50)
        axis1 = args.grid or _parse_grid("0.05:0.35:0.05")
        axis2 = None
    if args.paper_scale:
        print("# warning: paper-scale run; expect a long wall time", file=sys.stderr)
    cfg = ExperimentConfig(kind, dim, axis1, axis2, trials, args.seed,
                           max_iter=args.max_iter, tol=args.tol)
    runner = {"mca": run_mca, "channel_benign": run_channel,
              "channel_erase": run_channel, "rank_sparsity": run_rank_sparsity}[kind]
    grid = runner(cfg, threads=args.threads)
    if args.out:
        grid.to_csv(args.out)
    print(_header(args))
    print(f"# kind={kind} dimension={dim} trials={trials}")
    if axis2 is None:
        for i, a in enumerate(grid.axis1):
            print(f"  {grid.axis1_label}={a:.3f}  prob={grid.prob[i, 0]:.3f}")
        cross = crossing_point(grid, 0.5)
        if cross is not None:
            print(f"  50% crossing at {grid.axis1_label} = {cross:.4f}")
    elif len(grid.axis2) >= 2:
        contour = extract_contour(grid, 0.5)
        print(f"  50% contour: {len(contour.points)} points")
        for x, y in contour.points:
            print(f"  {x:.4f}  {y:.4f}")
    else:
        print(f"  prob={grid.prob[0, 0]:.3f}")
    return 0


def dispatch(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        handler = {"threshold": _cmd_threshold, "curve": _cmd_curve,
                   "demix": _cmd_demix, "cones": _cmd_cones,
                   "experiment": _cmd_experiment}[args.verb]
        return handler(args)
    except (ValueError, OSError, KeyError, RuntimeError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())
