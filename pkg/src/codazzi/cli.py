"""Command-line front end: verification suites, the critical-point solver,
and immersion meshes.

Exit-status contract: 0 when every requested check passes, 1 when a check
or a mathematical precondition fails (wrong curvature sign, non-Codazzi
input, failed suite), 2 for usage and I/O errors (unknown flags, missing or
malformed files).  All outputs are written through deterministic
serializers, so two runs with the same configuration produce byte-identical
artifacts.
"""

import argparse
import sys

import numpy as np

from . import embedding, fileio, solver, verify
from .energy import codazzi_residual
from .grid import Grid, poincare_disk
from .manufactured import ManufacturedDiffeo, pullback_of_scaled_poincare, recovery_error
from .operators import curvature

__all__ = ["main"]


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="codazzi",
        description="Verification suites and solvers for Codazzi-field geometry.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--g", metavar="FILE", help="background metric field file")
        p.add_argument("--h", metavar="FILE", help="target metric field file")
        p.add_argument("--endo", metavar="FILE", help="endomorphism field file")
        p.add_argument("--nx", type=int, default=32)
        p.add_argument("--ny", type=int, default=None)
        p.add_argument("--lx", type=float, default=0.8)
        p.add_argument("--ly", type=float, default=None)
        p.add_argument("--topology", choices=("dirichlet", "periodic"), default="dirichlet")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=None)
        p.add_argument("--out", default=None, help="output path (or prefix)")

    pv = sub.add_parser("verify", help="run seeded verification suites")
    common(pv)
    pv.add_argument(
        "--suite",
        default="all",
        choices=verify.SUITE_NAMES + ("all",),
        help="which suite to run",
    )
    pv.add_argument("--nx2", type=int, default=None, help="second (fine) resolution")
    pv.add_argument("--ny2", type=int, default=None)

    ps = sub.add_parser("solve", help="solve for a one-harmonic displacement field")
    common(ps)
    ps.add_argument("--continuation-steps", type=int, default=0)
    ps.add_argument(
        "--manufactured-seed",
        type=int,
        default=None,
        help="build a manufactured (g, h) pair instead of reading --h, and report the recovery error",
    )

    pe = sub.add_parser("embed", help="integrate a Codazzi field to a Minkowski mesh")
    common(pe)
    return parser


def _background(args, parser):
    """Background metric from --g or from grid flags (Poincare sub-disk)."""
    if args.g is not None:
        doc = _load_or_usage(args.g, parser)
        return doc["g"], doc
    ny = args.ny if args.ny is not None else args.nx
    ly = args.ly if args.ly is not None else args.lx
    grid = Grid(args.nx, ny, args.lx, ly, args.topology)
    return poincare_disk(grid), None


def _load_or_usage(path, parser):
    try:
        return fileio.load_field(path)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2) from None


def cmd_verify(args, parser):
    names = verify.SUITE_NAMES if args.suite == "all" else (args.suite,)
    n1 = args.nx
    n2 = args.nx2 if args.nx2 is not None else 2 * n1
    # optional input field: validated, and checked when it carries an endo
    report_extra = []
    if args.g is not None:
        doc = _load_or_usage(args.g, parser)
        if "endo" in doc:
            g = doc["g"]
            resid = codazzi_residual(doc["endo"], g)
            tol = args.tol if args.tol is not None else 1e-2
            report_extra.append(
                {
                    "check": "input_codazzi_residual",
                    "lhs": resid,
                    "rhs": 0.0,
                    "residual": resid,
                    "order": None,
                    "pass": resid <= tol,
                }
            )
    report = verify.run_suites(names, seed=args.seed, n1=n1, n2=n2)
    if report_extra:
        report["suites"].append(
            {
                "suite": "input",
                "passed": all(c["pass"] for c in report_extra),
                "checks": report_extra,
            }
        )
        report["passed"] = report["passed"] and report["suites"][-1]["passed"]
    for s in report["suites"]:
        for c in s["checks"]:
            status = "PASS" if c["pass"] else "FAIL"
            order = "" if c["order"] is None else f" order={c['order']:.2f}"
            print(
                f"{status} {s['suite']}.{c['check']}"
                f" residual={c['residual']:.3e}{order}"
            )
    out = args.out if args.out is not None else "verify_report.json"
    fileio.write_json(out, report)
    print(("all checks passed" if report["passed"] else "some checks FAILED"))
    return 0 if report["passed"] else 1


def cmd_solve(args, parser):
    if args.h is None and args.manufactured_seed is None:
        parser.error("solve requires --h (or --manufactured-seed)")
    g, _ = _background(args, parser)
    if np.max(curvature(g)) >= 0.0:
        print(
            "error: the background metric is not negatively curved everywhere; "
            "the critical-point equation is elliptic only for kappa < 0",
            file=sys.stderr,
        )
        return 1
    diffeo = None
    if args.manufactured_seed is not None:
        diffeo = ManufacturedDiffeo.seeded(g.grid, args.manufactured_seed)
        h = pullback_of_scaled_poincare(diffeo, g.grid)
    else:
        doc = _load_or_usage(args.h, parser)
        if "h" not in doc:
            print(f"error: {args.h}: missing required key 'h'", file=sys.stderr)
            return 2
        if doc["grid"].nx != g.grid.nx or doc["grid"].ny != g.grid.ny:
            print("error: --h grid does not match the background grid", file=sys.stderr)
            return 2
        h = doc["h"]
    tol = args.tol if args.tol is not None else 1e-8
    try:
        if args.continuation_steps > 0:
            # march from the trivial pair (target = background, solution 0)
            x, report = solver.continuation_solve(
                g, g, g.matrix(), h, steps=args.continuation_steps, tol=tol
            )
        else:
            x, report = solver.newton_solve(g, h, tol=tol)
    except (solver.SolverError, solver.CurvatureSignError) as exc:
        print(f"error: solve failed: {exc}", file=sys.stderr)
        return 1
    prefix = args.out if args.out is not None else "solve"
    fileio.save_field(f"{prefix}_displacement.json", g, x=x)
    rep = report.to_dict()
    if diffeo is not None:
        rep["recovery_error"] = float(recovery_error(diffeo, g.grid, x))
    fileio.write_json(f"{prefix}_report.json", rep)
    last = rep["residuals"][-1] if rep["residuals"] else float("nan")
    print(
        f"converged in {rep['iterations']} iterations, final residual {last:.3e}, "
        f"codazzi residual {rep['codazzi_residual']:.3e}"
    )
    if "recovery_error" in rep:
        print(f"manufactured recovery error {rep['recovery_error']:.3e}")
    return 0


def cmd_embed(args, parser):
    if args.endo is None:
        parser.error("embed requires --endo")
    doc = _load_or_usage(args.endo, parser)
    if "endo" not in doc:
        print(f"error: {args.endo}: missing required key 'endo'", file=sys.stderr)
        return 2
    grid = doc["grid"]
    a = doc["endo"]
    if np.max(np.abs(a - np.swapaxes(a, -1, -2))) > 1e-10 * (1.0 + np.abs(a).max()):
        print("error: refusing non-symmetric endomorphism input", file=sys.stderr)
        return 1
    patch = embedding.HyperboloidPatch(grid)
    resid = codazzi_residual(a, patch.metric)
    tol = args.tol if args.tol is not None else 0.05
    if resid > tol:
        print(
            f"error: refusing non-Codazzi input: residual {resid:.3e} exceeds {tol:.3e}",
            file=sys.stderr,
        )
        return 1
    u = patch.nodes()[patch.base_index]
    x = embedding.integrate_immersion(a, patch, u, sign=1, codazzi_tol=None)
    phi = embedding.support_function(x, patch, sign=1)
    prefix = args.out if args.out is not None else "embed"
    fileio.write_mesh_csv(f"{prefix}_mesh.csv", grid, x, phi)
    spacelike, definite, side = embedding.convexity_check(x, patch)
    companion = {
        "codazzi_residual": float(resid),
        "plaquette_defect": float(embedding.plaquette_defect(a, patch)),
        "induced_metric_error": float(embedding.induced_metric_error(x, a, patch)),
        "convexity": {
            "spacelike": bool(spacelike),
            "definite": bool(definite),
            "side": side,
        },
    }
    fileio.write_json(f"{prefix}_report.json", companion)
    print(
        f"mesh written: plaquette defect {companion['plaquette_defect']:.3e}, "
        f"induced-metric error {companion['induced_metric_error']:.3e}, "
        f"convexity {side}"
    )
    return 0


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return cmd_verify(args, parser)
        if args.command == "solve":
            return cmd_solve(args, parser)
        return cmd_embed(args, parser)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
