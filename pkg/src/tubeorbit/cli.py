"""Command-line front end: ``find``, ``verify``, ``sample`` and ``sweep``.

Exit codes: 0 success, 1 a numerical outcome failed (no convergence, a
verification threshold missed), 2 invalid flags or a malformed input file.
"""

import argparse
import csv
import json
import math
import os
import sys

from .model import ModelParams
from .optimizer import NoConvergenceError, NonFiniteError, OptimConfig, find_orbit
from .trajectory import sample
from .orbitfile import (OrbitFile, OrbitFileError, read_orbit, sample_rows, write_orbit,
                        write_sample_csv)
from .verify import DEFAULT_RK_STEPS, IntegrationError, Thresholds, el_residual_profile, verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be finite and > 0: {text!r}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1: {text!r}")
    return value


def _nonneg_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"must be finite and >= 0: {text!r}")
    return value


def _int(text):
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None


def _list_of(conv):
    def parse(text):
        parts = [p.strip() for p in text.split(",")]
        if not text.strip() or any(not p for p in parts):
            raise argparse.ArgumentTypeError(f"expected a non-empty comma list: {text!r}")
        return [conv(p) for p in parts]
    return parse


def _add_solver_flags(pa):
    pa.add_argument("--modes", type=_positive_int, default=32, help="sine modes N (default 32)")
    pa.add_argument("--quad", type=_positive_int, default=None,
                    help="quadrature points M, >= 4N+1 (default 8N)")
    pa.add_argument("--m", type=_positive_float, default=1.0, help="ball mass")
    pa.add_argument("--J", type=_positive_float, default=1.0, help="tube moment of inertia")
    pa.add_argument("--g", type=_positive_float, default=1.0, help="gravity")
    pa.add_argument("--seed", type=_int, default=0)
    pa.add_argument("--starts", type=_positive_int, default=1)
    pa.add_argument("--gtol", type=_positive_float, default=1e-10)
    pa.add_argument("--max-iters", type=_int, default=5000)
    pa.add_argument("--init-scale", type=_nonneg_float, default=0.1)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tubeorbit",
        description="Periodic orbits of a rotating tube with a sliding ball.")
    sub = parser.add_subparsers(dest="command", required=True)

    pf = sub.add_parser("find", help="minimize the action for one (omega, k)")
    pf.add_argument("--omega", type=_positive_float, required=True, help="period")
    pf.add_argument("--k", type=_positive_int, required=True, help="tube turns per period")
    _add_solver_flags(pf)
    pf.add_argument("-o", "--output", default=None,
                    help="orbit file (default orbit_w<omega>_k<k>.json)")

    pv = sub.add_parser("verify", help="check a stored orbit independently")
    pv.add_argument("orbit")
    pv.add_argument("--rk-steps", type=_int, default=DEFAULT_RK_STEPS)
    pv.add_argument("--quad", type=_positive_int, default=None)
    th = Thresholds()
    pv.add_argument("--shoot-tol", type=_positive_float, default=th.shooting)
    pv.add_argument("--drift-tol", type=_positive_float, default=th.energy_drift)
    pv.add_argument("--lambda-tol", type=_positive_float, default=th.lambda_spread)
    pv.add_argument("--residual-tol", type=_positive_float, default=th.el_residual)
    pv.add_argument("--symmetry-tol", type=_positive_float, default=th.symmetry)
    pv.add_argument("--report", default=None, help="write the report as JSON here")

    ps = sub.add_parser("sample", help="write a sampled orbit as CSV")
    ps.add_argument("orbit")
    ps.add_argument("--points", type=_positive_int, default=1000)
    ps.add_argument("-o", "--output", required=True)

    pw = sub.add_parser("sweep", help="run find over a grid of (omega, k)")
    pw.add_argument("--omega-list", type=_list_of(_positive_float), default=None)
    pw.add_argument("--k-list", type=_list_of(_positive_int), default=None)
    _add_solver_flags(pw)
    pw.add_argument("-o", "--output", required=True, help="output directory")
    return parser


def orbit_filename(omega: float, k: int) -> str:
    return f"orbit_w{float(omega)!r}_k{k}.json"


def _config(args) -> OptimConfig:
    try:
        return OptimConfig(modes=args.modes, quad=args.quad, gtol=args.gtol,
                           max_iters=args.max_iters, starts=args.starts, seed=args.seed,
                           init_scale=args.init_scale)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _params(args) -> ModelParams:
    return ModelParams(args.m, args.J, args.g)


def _solve(params, omega, k, cfg):
    """Return ``(report, converged)``; the report is the best attempt either way."""
    try:
        return find_orbit(params, omega, k, cfg), True
    except NoConvergenceError as exc:
        return exc.best, False


def _orbit_file(params, cfg, report) -> OrbitFile:
    provenance = {
        "config": cfg.as_dict(),
        "action": report.action,
        "grad_norm": report.grad_norm,
        "iterations": report.iterations,
        "start_index": report.start_index,
    }
    return OrbitFile(report.trajectory, params, provenance)


def cmd_find(args) -> int:
    params, cfg = _params(args), _config(args)
    try:
        report, ok = _solve(params, args.omega, args.k, cfg)
    except NonFiniteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if not ok:
        detail = f"best gradient norm {report.grad_norm:.6e}" if report else "all starts non-finite"
        print(f"error: no start converged ({detail})", file=sys.stderr)
        return EXIT_FAIL
    path = args.output or orbit_filename(args.omega, args.k)
    write_orbit(path, _orbit_file(params, cfg, report))
    max_x = _max_abs_x(report.trajectory, cfg.quad_points)
    print(f"action {report.action:.17g}")
    print(f"grad_norm {report.grad_norm:.6e}")
    print(f"max_abs_x {max_x:.17g}")
    print(f"iterations {report.iterations}")
    print(f"wrote {path}")
    return EXIT_OK


def _max_abs_x(tr, M):
    return float(abs(sample(tr, M).states.x).max())


def cmd_verify(args) -> int:
    orbit = read_orbit(args.orbit)
    if args.rk_steps < 16:
        raise UsageError("--rk-steps must be >= 16")
    quad = args.quad
    if quad is not None and quad < 4 * orbit.trajectory.modes + 1:
        raise UsageError(f"--quad must be >= {4 * orbit.trajectory.modes + 1}")
    rep = verify(orbit.params, orbit.trajectory, args.rk_steps, quad)
    th = Thresholds(shooting=args.shoot_tol, energy_drift=args.drift_tol,
                    lambda_spread=args.lambda_tol, el_residual=args.residual_tol,
                    symmetry=args.symmetry_tol)
    failed = rep.failures(th)
    for key, value in rep.as_dict().items():
        print(f"{key} {value}")
    if args.report:
        out = {key: (None if isinstance(v, float) and not math.isfinite(v) else v)
               for key, v in rep.as_dict().items()}
        out.update(passed=not failed, failed=failed)
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(out, fh, indent=2, allow_nan=False)
            fh.write("\n")
    if failed:
        print("FAILED: " + ", ".join(failed))
        return EXIT_FAIL
    print("PASSED")
    return EXIT_OK


def cmd_sample(args) -> int:
    orbit = read_orbit(args.orbit)
    write_sample_csv(args.output, sample_rows(orbit, args.points))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if args.omega_list is None and args.k_list is None:
        raise UsageError("give --omega-list and/or --k-list")
    omegas = args.omega_list or [2.0 * math.pi]
    ks = args.k_list or [1]
    params, cfg = _params(args), _config(args)
    os.makedirs(args.output, exist_ok=True)
    rows = []
    all_ok = True
    for omega in omegas:
        for k in ks:
            try:
                report, ok = _solve(params, omega, k, cfg)
            except NonFiniteError:
                report, ok = None, False
            all_ok &= ok
            if report is None:
                rows.append([repr(omega), k, "false", "nan", "nan", "nan"])
                continue
            if ok:
                write_orbit(os.path.join(args.output, orbit_filename(omega, k)),
                            _orbit_file(params, cfg, report))
            tr = report.trajectory
            rows.append([repr(omega), k, "true" if ok else "false",
                         "%.17g" % report.action, "%.17g" % _max_abs_x(tr, cfg.quad_points),
                         "%.17g" % el_residual_profile(params, tr, cfg.quad_points)])
            print(f"omega {omega!r} k {k} converged {ok} action {report.action:.12g}")
    with open(os.path.join(args.output, "summary.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["omega", "k", "converged", "action", "max_abs_x", "el_residual_max"])
        writer.writerows(rows)
    return EXIT_OK if all_ok else EXIT_FAIL


COMMANDS = {"find": cmd_find, "verify": cmd_verify, "sample": cmd_sample, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, OrbitFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except IntegrationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
