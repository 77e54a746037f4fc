"""Command-line front end.

Subcommands: solve | certify | screen | experiment | validate.  Options can
come from a flat key=value config file (--config); explicit flags win.
Exit codes: 0 success/pass, 1 usage error, 2 nonconvergence, 3
certification or bound failure.  Reruns with the same config and seed
produce byte-identical JSON/CSV.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .certify import BallSampler, CylinderSampler, certify_region, viscosity_screen
from .errors import EmptySampleSet, MinsurfError, NotConverged
from .experiments import (run_density, run_flatness, run_flatness_quadratic,
                          run_harnack, run_harnack_measure,
                          run_lawson_osserman, run_laplace_order,
                          run_replacement, run_thresholds, seeded_flat_map,
                          seeded_slope)
from .fields import (AffineDistanceField, HarmonicDeviationField,
                     QuadraticDistanceField, SphereField)
from .flatness import ExperimentParams
from .geometry import Dims
from .grid import grid_to_csv, load_grid, save_grid
from .maps import QuadraticMap
from .output import FORMAT_VERSION, validate_report, write_csv, write_json
from .rng import stream
from .solver import default_grid_n, solve_dirichlet

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_CONVERGED = 2
EXIT_FAILED = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_config(path: str) -> dict:
    cfg = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise _UsageError(f"bad config line: {line!r}")
        key, val = line.split("=", 1)
        cfg[key.strip().replace("-", "_")] = val.strip()
    return cfg


def _build_parser() -> _Parser:
    parser = _Parser(prog="minsurf", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config file")
        p.add_argument("--n", type=int, default=2)
        p.add_argument("--m", type=int, default=2)
        p.add_argument("--grid-n", type=int, default=None)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", default="msl-out")

    p = sub.add_parser("solve", help="run the Dirichlet descent")
    common(p)
    p.add_argument("--boundary", default="affine",
                   choices=["affine", "seeded-poly", "lawson-osserman"])
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--tau", type=float, default=None)
    p.add_argument("--tol-res", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=200_000)

    p = sub.add_parser("certify", help="certify a comparison family")
    common(p)
    p.add_argument("--family", required=True,
                   choices=["affine_distance", "quadratic_distance",
                            "harmonic_deviation", "sphere", "neg_sphere"])
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.75)
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--x-radius", type=float, default=None)

    p = sub.add_parser("screen", help="touching battery against a graph")
    common(p)
    p.add_argument("--boundary", default="affine",
                   choices=["affine", "seeded-poly", "bump"])
    p.add_argument("--grid", default=None, help="screen a saved grid instead")
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--tol-res", type=float, default=1e-8)

    p = sub.add_parser("experiment", help="measured-constant experiments")
    common(p)
    p.add_argument("--kind", required=True,
                   choices=["lawson-osserman", "flatness", "flatness-quadratic",
                            "harnack", "harnack-measure", "density",
                            "replacement", "laplace-order", "thresholds"])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--eps", type=float, default=1e-2)
    p.add_argument("--eta", type=float, default=0.25)
    p.add_argument("--beta", type=float, default=0.75)
    p.add_argument("--eps0", type=float, default=None)
    p.add_argument("--steps", type=int, default=3)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--tol-res", type=float, default=1e-8)

    p = sub.add_parser("validate", help="self-validate output bundles")
    p.add_argument("--path", required=True)
    return parser


def _merge_config(parser: _Parser, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        cfg = _read_config(args.config)
        sub = next(a for a in parser._actions
                   if isinstance(a, argparse._SubParsersAction))
        subparser = sub.choices[args.command]
        typed = {}
        for action in subparser._actions:
            if action.dest in cfg:
                cast = action.type or str
                typed[action.dest] = cast(cfg[action.dest])
        subparser.set_defaults(**typed)
        args = parser.parse_args(argv)  # explicit flags still win
    return args


def _config_dict(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "config"}


def _boundary_fn(kind: str, dims: Dims, seed: int, eps: float):
    if kind == "affine":
        base = seeded_slope(dims, seed)
        return base.values, {"kind": "affine", "seed": seed}
    if kind == "seeded-poly":
        base = seeded_slope(dims, seed)
        vmap = seeded_flat_map(dims, seed)

        def g(x):
            return base.values(x) + 0.95 * eps * vmap.values(x)

        return g, {"kind": "seeded-poly", "seed": seed, "eps": eps}
    if kind == "lawson-osserman":
        if (dims.n, dims.m) != (4, 3):
            raise _UsageError("lawson-osserman boundary needs --n 4 --m 3")
        from .solver import lawson_osserman
        return lawson_osserman, {"kind": "lawson-osserman"}
    raise _UsageError(f"unknown boundary {kind!r}")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _log(out: Path, lines: list[str]) -> None:
    (out / "run.log").write_text("\n".join(lines) + "\n", encoding="utf-8")


def cmd_solve(args) -> int:
    t0 = time.perf_counter()
    dims = Dims(args.n, args.m)
    g, gdesc = _boundary_fn(args.boundary, dims, args.seed, args.eps)
    out = _out_dir(args)
    gm, report = solve_dirichlet(dims, g, N=args.grid_n, tau=args.tau,
                                 tol_res=args.tol_res, max_iter=args.max_iter)
    save_grid(gm, out / "grid.bin")
    grid_to_csv(gm, out / "grid.csv")
    write_json({"command": "solve", "config": _config_dict(args),
                "boundary": gdesc, "report": report.to_dict(),
                "grid_n": gm.N}, out / "report.json")
    _log(out, [f"solve finished in {time.perf_counter() - t0:.2f} s",
               f"status: {report.status}",
               f"sup residual: {report.final_sup_residual:.3e}"])
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_certify(args) -> int:
    t0 = time.perf_counter()
    dims = Dims(args.n, args.m)
    n, m = dims.n, dims.m
    out = _out_dir(args)
    fam = args.family
    if fam in ("affine_distance", "quadratic_distance", "harmonic_deviation") \
            and args.eps is None:
        raise _UsageError(f"--eps is required for family {fam}")
    rng = stream(args.seed, 2)
    if fam == "affine_distance":
        base = seeded_slope(dims, args.seed, scale=0.4)
        H = AffineDistanceField(base, args.eps)
        sampler = CylinderSampler(
            n=n, m=m, x_radius=args.x_radius or 0.75, rho_lo=args.eps / 10.0,
            rho_hi=args.eps, x_spacing=0.05, z_spacing=args.eps / 8.0,
            anchor=base, seed=args.seed)
    elif fam == "quadratic_distance":
        quad = np.zeros((m, n, n))
        quad[0, 0, 0], quad[0, 1, 1] = args.eps ** args.beta, -args.eps ** args.beta
        q = QuadraticMap(np.zeros(m), np.zeros((n, m)), quad)
        H = QuadraticDistanceField(q, args.eps, args.beta)
        sampler = CylinderSampler(
            n=n, m=m, x_radius=args.x_radius or 0.75, rho_lo=args.eps / 10.0,
            rho_hi=args.eps, x_spacing=0.05, z_spacing=args.eps / 8.0,
            anchor=q, seed=args.seed)
    elif fam == "harmonic_deviation":
        quad = np.zeros((m, n, n))
        quad[0, 0, 0], quad[0, 1, 1] = 2.0, -2.0
        h = QuadraticMap(np.zeros(m), np.zeros((n, m)), quad)
        H = HarmonicDeviationField(h, None, args.eps, args.eta, n, m)
        sampler = CylinderSampler(
            n=n, m=m, x_radius=args.x_radius or 0.5, rho_lo=0.0,
            rho_hi=args.eps, x_spacing=0.05, z_spacing=args.eps / 8.0,
            anchor=None, seed=args.seed)
    else:
        sign = 1.0 if fam == "sphere" else -1.0
        center = rng.uniform(-0.2, 0.2, n + m)
        H = SphereField(center, n, m, sign=sign)
        sampler = BallSampler(center=center + 0.5, radius=args.x_radius or 0.5,
                              spacing=0.1, seed=args.seed)
    try:
        cert = certify_region(H, sampler, n)
    except EmptySampleSet as exc:
        print(f"certification degenerate: {exc}", file=sys.stderr)
        return EXIT_FAILED
    write_json({"command": "certify", "config": _config_dict(args),
                "certificate": cert.to_dict()}, out / "certificate.json")
    _log(out, [f"certify finished in {time.perf_counter() - t0:.2f} s",
               f"verdict: {cert.verdict}",
               f"min margin: {cert.min_margin:.3e}"])
    return EXIT_OK if cert.verdict == "pass" else EXIT_FAILED


def cmd_screen(args) -> int:
    t0 = time.perf_counter()
    dims = Dims(args.n, args.m)
    out = _out_dir(args)
    if args.grid:
        u = load_grid(args.grid)
        gdesc = {"kind": "file", "path": str(args.grid)}
    elif args.boundary == "affine":
        base = seeded_slope(dims, args.seed)
        from .grid import GridMap
        u = GridMap.from_function(dims, args.grid_n or default_grid_n(dims),
                                  base.values)
        gdesc = {"kind": "affine", "seed": args.seed}
    else:
        g, gdesc = _boundary_fn("seeded-poly", dims, args.seed, args.eps)
        u, rep = solve_dirichlet(dims, g, N=args.grid_n, tol_res=args.tol_res)
        if not rep.converged:
            print("screen input solve did not converge", file=sys.stderr)
            return EXIT_NOT_CONVERGED
        if args.boundary == "bump":
            rngb = stream(args.seed, 3)
            xc = rngb.uniform(-0.3, 0.3, dims.n)
            height = 10.0 * args.eps / (4.0 * dims.n)
            flat = u.values.reshape(-1, dims.m)
            dist2 = np.sum((u.domain_coords - xc) ** 2, axis=1)
            flat[u._st.domain_flat, 0] += height * np.exp(-dist2 / 0.25 ** 2)
            gdesc = {**gdesc, "kind": "bump", "bump_height": height}
    reports = viscosity_screen(u, args.seed, args.count)
    violations = sum(r.violation for r in reports)
    write_json({"command": "screen", "config": _config_dict(args),
                "boundary": gdesc, "count": len(reports),
                "violations": violations,
                "reports": [r.to_dict() for r in reports]},
               out / "screen.json")
    _log(out, [f"screen finished in {time.perf_counter() - t0:.2f} s",
               f"violations: {violations} of {len(reports)}"])
    return EXIT_OK if violations == 0 else EXIT_FAILED


def cmd_experiment(args) -> int:
    t0 = time.perf_counter()
    dims = Dims(args.n, args.m)
    out = _out_dir(args)
    seeds = range(args.seed, args.seed + args.seeds)
    params = ExperimentParams(eps=args.eps, eta=args.eta, beta=args.beta,
                              eps0=args.eps0)
    kind = args.kind
    if kind == "lawson-osserman":
        report = run_lawson_osserman()
    elif kind == "flatness":
        report = run_flatness(dims, seeds=seeds, params=params, N=args.grid_n,
                              steps=args.steps, workers=args.workers,
                              tol_res=args.tol_res)
    elif kind == "flatness-quadratic":
        report = run_flatness_quadratic(dims, seeds=seeds, params=params,
                                        N=args.grid_n, steps=args.steps,
                                        workers=args.workers,
                                        tol_res=args.tol_res)
    elif kind == "harnack":
        report = run_harnack(dims, seeds=seeds, params=params, N=args.grid_n,
                             workers=args.workers, tol_res=args.tol_res)
    elif kind == "harnack-measure":
        report = run_harnack_measure(dims, seeds=seeds, params=params,
                                     N=args.grid_n, workers=args.workers,
                                     tol_res=args.tol_res)
    elif kind == "density":
        report = run_density(dims, seeds=seeds, N=args.grid_n,
                             workers=args.workers)
    elif kind == "replacement":
        report = run_replacement(dims, seed=args.seed, N=args.grid_n)
    elif kind == "laplace-order":
        report = run_laplace_order(dims)
    else:
        report = run_thresholds(dims, eta=args.eta, beta=args.beta,
                                seed=args.seed)
    write_json({"command": "experiment", "config": _config_dict(args),
                "report": report.to_dict()}, out / "experiment.json")
    if report.traces:
        write_csv(report.traces, out / "trace.csv")
    _log(out, [f"experiment {kind} finished in "
               f"{time.perf_counter() - t0:.2f} s",
               f"runtime_seconds: {report.runtime_seconds:.3f}",
               f"ok: {report.ok}"])
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_validate(args) -> int:
    problems = validate_report(args.path)
    for p in problems:
        print(p, file=sys.stderr)
    if not problems:
        print(f"ok: outputs under {args.path} carry config and "
              f"format_version {FORMAT_VERSION}")
    return EXIT_OK if not problems else EXIT_FAILED


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = _merge_config(parser, argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # argparse -h
        return int(exc.code or 0)
    handlers = {"solve": cmd_solve, "certify": cmd_certify,
                "screen": cmd_screen, "experiment": cmd_experiment,
                "validate": cmd_validate}
    try:
        return handlers[args.command](args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotConverged as exc:
        print(f"not converged: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except MinsurfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
