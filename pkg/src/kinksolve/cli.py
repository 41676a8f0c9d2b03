"""Command-line interface: solve, constants, verify, scan.

Exit codes are a stable scripting contract:

    0  success
    1  usage error (malformed flags, bad grid, unreadable input)
    2  solver failed to converge
    3  a constants-ledger invariant failed

Every command writes a run manifest next to its primary output; re-running
with the manifest's parameters reproduces the outputs bit for bit on the
same platform math library.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .cone import (
    LedgerInvariantError,
    check_cone,
    check_preservation,
    compute_constants,
    random_cone_members,
)
from .grid import make_grid, profile_to_csv, profile_to_json, sample, sup_distance
from .kernels import KernelFamily
from .operators import OperatorConfig, apply_t0, apply_tq, psi, t0_psi_analytic
from .qscan import ScanConfig, scan
from .solver import SolveConfig, solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NO_CONVERGENCE = 2
EXIT_INVARIANT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse variant that reports usage problems via exit code 1."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    version: str
    wall_time_seconds: float
    outputs: list[str]

    def write(self, path: Path) -> None:
        with open(path, "w", newline="\n") as fh:
            json.dump(vars(self), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _write_manifest(command: str, params: dict, outputs: list[str],
                    started: float) -> None:
    anchor = Path(outputs[0]) if outputs else Path(f"{command}.out")
    manifest = RunManifest(command=command, parameters=params, version=__version__,
                           wall_time_seconds=time.time() - started,
                           outputs=[str(o) for o in outputs])
    manifest.write(anchor.with_name(anchor.name + ".manifest.json"))


def _build_parser() -> _Parser:
    parser = _Parser(prog="kinksolve",
                     description="Kink solutions of the Gaussian-convolution "
                                 "cubic integral equation")
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="iterate the fixed-point map")
    p_solve.add_argument("--q", type=float, default=0.0)
    p_solve.add_argument("--L", type=float, default=20.0)
    p_solve.add_argument("--h", type=float, default=0.05)
    p_solve.add_argument("--tol", type=float, default=1e-12)
    p_solve.add_argument("--max-iter", type=int, default=10000)
    p_solve.add_argument("--omega", type=float, default=1.0)
    p_solve.add_argument("--init", default="erf",
                         help="erf | psi | sign | file:PATH")
    p_solve.add_argument("--method", choices=["quadrature", "spectral"],
                         default="quadrature")
    p_solve.add_argument("--out", default="solution.csv")
    p_solve.add_argument("--format", choices=["csv", "json"], default="csv")
    p_solve.add_argument("--ledger", default=None,
                         help="reuse a constants JSON instead of recomputing")

    p_const = sub.add_parser("constants", help="compute the constants ledger")
    p_const.add_argument("--q-max", type=float, default=1.0)
    p_const.add_argument("--out", default="constants.json")

    p_verify = sub.add_parser("verify", help="run the verification suite")
    p_verify.add_argument("--q", type=float, default=0.0)
    p_verify.add_argument("--seed", type=int, default=42)
    p_verify.add_argument("--trials", type=int, default=100)
    p_verify.add_argument("--out", default="verify.json")

    p_scan = sub.add_parser("scan", help="bracket the critical deformation")
    p_scan.add_argument("--q-min", type=float, default=0.0)
    p_scan.add_argument("--q-max", type=float, default=3.0)
    p_scan.add_argument("--steps", type=int, default=4)
    p_scan.add_argument("--bisect-tol", type=float, default=1e-4)
    p_scan.add_argument("--cold-check", action="store_true")
    p_scan.add_argument("--max-iter", type=int, default=5000)
    p_scan.add_argument("--out", default="scan.json")
    return parser


def _parse_init(raw: str) -> tuple[str, str | None]:
    if raw.startswith("file:"):
        return "from_file", raw[5:]
    alias = {"erf": "erf", "psi": "psi_scaled", "psi_scaled": "psi_scaled",
             "sign": "sign"}
    if raw not in alias:
        raise _UsageError(f"unknown --init value {raw!r}")
    return alias[raw], None


def _load_or_compute_ledger(grid, cfg_op, ledger_path):
    from .cone import ConstantsLedger, validate_ledger

    if ledger_path is not None:
        ledger = ConstantsLedger.from_json_dict(json.loads(Path(ledger_path).read_text()))
        validate_ledger(ledger)
        return ledger
    return compute_constants(grid, cfg_op)


def _cmd_solve(args) -> int:
    started = time.time()
    init, init_path = _parse_init(args.init)
    grid = make_grid(args.L, args.h)
    cfg_op = OperatorConfig(method=args.method)
    ledger = _load_or_compute_ledger(grid, cfg_op, args.ledger)
    cfg = SolveConfig(q=args.q, damping=args.omega, tol=args.tol,
                      max_iter=args.max_iter, init=init, init_path=init_path)
    report = solve(cfg, grid, ledger, cfg_op)

    out = Path(args.out)
    if args.format == "csv":
        profile_to_csv(report.solution, out)
        report_path = out.with_name(out.name + ".report.json")
        report_dict = report.to_json_dict(inline_profile=False, profile_path=out.name)
    else:
        profile_to_json(report.solution, out)
        report_path = out.with_name(out.name + ".report.json")
        report_dict = report.to_json_dict(inline_profile=True)
    with open(report_path, "w", newline="\n") as fh:
        json.dump(report_dict, fh, indent=2)
        fh.write("\n")

    params = {k: getattr(args, k) for k in
              ("q", "L", "h", "tol", "max_iter", "omega", "init", "method",
               "out", "format")}
    _write_manifest("solve", params, [str(out), str(report_path)], started)
    print(f"q={args.q}: converged={report.converged} "
          f"iterations={report.iterations} residual={report.final_residual:.3e}")
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def _cmd_constants(args) -> int:
    started = time.time()
    if not args.q_max > 0.0:
        raise _UsageError(f"--q-max must be positive, got {args.q_max}")
    grid = make_grid(20.0, 0.05)
    try:
        ledger = compute_constants(grid, OperatorConfig(), q_range_max=args.q_max)
    except LedgerInvariantError as exc:
        print(f"ledger invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    out = Path(args.out)
    with open(out, "w", newline="\n") as fh:
        json.dump(ledger.to_json_dict(), fh, indent=2)
        fh.write("\n")
    _write_manifest("constants", {"q_max": args.q_max, "out": args.out},
                    [str(out)], started)
    print(f"constants written to {out} (q0 = {ledger.q0:.6f})")
    return EXIT_OK


def _cmd_verify(args) -> int:
    started = time.time()
    grid = make_grid(20.0, 0.05)
    cfg_op = OperatorConfig()
    ledger = compute_constants(grid, cfg_op)
    checks: list[tuple[str, float, float, bool]] = []

    ramp = sample(psi, grid, 0.5, -0.5)
    oracle_err = float(np.max(np.abs(apply_t0(ramp, cfg_op).values
                                     - t0_psi_analytic(grid.x))))
    checks.append(("analytic smoothing oracle", oracle_err, 1e-8, oracle_err <= 1e-8))

    from scipy.special import erf

    family = KernelFamily(args.q)
    worst = 0.0
    for f, tr in [(lambda x: erf(x), 1.0), (np.tanh, 1.0), (psi, 0.5)]:
        p = sample(f, grid, tr, -tr)
        worst = max(worst, sup_distance(apply_tq(p, family, OperatorConfig("quadrature")),
                                        apply_tq(p, family, OperatorConfig("spectral"))))
    checks.append(("quadrature vs spectral", worst, 1e-8, worst <= 1e-8))

    q_run = min(args.q, ledger.q0)
    members = random_cone_members(args.trials, grid, ledger, seed=args.seed)
    n_in = sum(check_cone(m, ledger).member for m in members)
    n_preserved = sum(
        check_preservation(m, KernelFamily(q_run), ledger, cfg_op).member
        for m in members)
    checks.append((f"cone membership of {args.trials} draws", float(n_in),
                   float(args.trials), n_in == args.trials))
    checks.append((f"cone preservation at q={q_run:.4f}", float(n_preserved),
                   float(args.trials), n_preserved == args.trials))

    width = max(len(name) for name, *_ in checks)
    all_ok = True
    for name, measured, threshold, ok in checks:
        all_ok &= ok
        print(f"{name:<{width}}  measured={measured:.6g}  "
              f"threshold={threshold:.6g}  {'PASS' if ok else 'FAIL'}")
    out = Path(args.out)
    with open(out, "w", newline="\n") as fh:
        json.dump([{"check": n, "measured": m, "threshold": t, "pass": ok}
                   for n, m, t, ok in checks], fh, indent=2)
        fh.write("\n")
    _write_manifest("verify", {"q": args.q, "seed": args.seed,
                               "trials": args.trials}, [str(out)], started)
    return EXIT_OK if all_ok else EXIT_INVARIANT


def _cmd_scan(args) -> int:
    started = time.time()
    grid = make_grid(20.0, 0.05)
    cfg_op = OperatorConfig()
    ledger = compute_constants(grid, cfg_op)
    cfg = ScanConfig(q_min=args.q_min, q_max=args.q_max, coarse_steps=args.steps,
                     bisect_tol=args.bisect_tol,
                     per_solve=SolveConfig(max_iter=args.max_iter),
                     cold_check=args.cold_check)
    report = scan(cfg, grid, ledger, cfg_op)
    out = Path(args.out)
    report.to_json(out)
    csv_path = out.with_suffix(".csv")
    report.to_csv(csv_path)
    params = {k: getattr(args, k) for k in
              ("q_min", "q_max", "steps", "bisect_tol", "cold_check", "max_iter")}
    _write_manifest("scan", params, [str(out), str(csv_path)], started)
    if report.q_star_bracket:
        lo, hi = report.q_star_bracket
        print(f"critical deformation bracket: [{lo:.6f}, {hi:.6f}]")
    else:
        print("no kink/no-kink boundary in the scanned range")
    if report.warm_cold_agree is False:
        print("WARNING: warm- and cold-started classifications disagree "
              "(hysteresis); inspect the per-sample tables", file=sys.stderr)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {"solve": _cmd_solve, "constants": _cmd_constants,
                   "verify": _cmd_verify, "scan": _cmd_scan}[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LedgerInvariantError as exc:
        print(f"ledger invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
