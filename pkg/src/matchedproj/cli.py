"""File-based front end: analyze, generate, path, min2x2, verify.

Exit codes: 0 all checks passed, 1 a mathematical check failed, 2 input or
usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from pathlib import Path

from .battery import run_battery
from .errors import MatchedProjectionError
from .idempotents import (
    Idempotent,
    as_idempotent,
    null_projection,
    random_idempotent,
    range_projection,
)
from .linalg import Tolerances, operator_norm
from .matched import (
    QppVerdict,
    homotopy_path,
    is_quasi_projection_pair,
    matched_projection,
    range_identities,
    sabotaged_formula,
)
from .matrixio import dumps, load_matrix, matrix_to_obj, save_matrix
from .norms import distance_report
from .report import Check, all_passed, boolean_check, failures
from .two_by_two import canonical_idempotent, closed_form_p0, grid_minimize

E_OK, E_MATH, E_USAGE = 0, 1, 2


def _tolerances(args) -> Tolerances:
    return Tolerances(check=args.tol_check, rank=args.tol_rank)


def _checks_to_obj(checks: list[Check]) -> list[dict]:
    return [c.as_dict() for c in checks]


def _verdict_to_obj(v: QppVerdict) -> dict:
    return {
        "holds": bool(v.holds),
        "gate": float(v.gate),
        "residuals": {k: float(r) for k, r in v.residuals.items()},
    }


def _load_idempotent(path: str, tol: Tolerances) -> Idempotent:
    return as_idempotent(load_matrix(path), tol)


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")


def cmd_analyze(args) -> int:
    tol = _tolerances(args)
    try:
        q = _load_idempotent(args.input, tol)
    except MatchedProjectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return E_USAGE

    digest = hashlib.sha256(Path(args.input).read_bytes()).hexdigest()
    try:
        pair = matched_projection(q, tol)
        rep = distance_report(q, tol)
        checks = list(rep.checks) + range_identities(q, tol)

        inv = pair.invariant_residuals(tol)
        scale = tol.check * (1.0 + operator_norm(q.matrix))
        checks.append(Check("matched_equals_tt_factor", inv["factor_tt"], 10 * tol.check))
        checks.append(Check("matched_equals_vv_factor", inv["factor_vv"], 10 * tol.check))
        checks.append(Check("matched_reflection_identity", inv["adjoint_reflection"], scale))

        qpp_matched = is_quasi_projection_pair(pair.projection, q, tol)
        qpp_range = is_quasi_projection_pair(range_projection(q, tol), q, tol)
        qpp_null = is_quasi_projection_pair(null_projection(q, tol), q, tol)
        checks.append(boolean_check("matched_pair_is_qpp", qpp_matched.holds))
    except MatchedProjectionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return E_MATH

    ok = all_passed(checks)
    report = {
        "input": {"path": args.input, "sha256": digest, "dim": q.dim},
        "tolerances": {"check": tol.check, "psd": tol.psd, "rank": tol.rank},
        "idempotent_defect": q.defect,
        "matched_projection": matrix_to_obj(pair.projection.matrix),
        "distances": {
            "norm_q": rep.norm_q,
            "norm_complement": rep.norm_complement,
            "d_matched": rep.d_matched,
            "d_matched_closed": rep.d_matched_closed,
            "d_range": rep.d_range,
            "d_null": rep.d_null,
        },
        "checks": _checks_to_obj(checks),
        "qpp": {
            "matched": _verdict_to_obj(qpp_matched),
            "range_partner": _verdict_to_obj(qpp_range),
            "null_partner": _verdict_to_obj(qpp_null),
        },
        "all_passed": ok,
    }
    _write(args.output, dumps(report))

    print(f"dim {q.dim}, idempotent defect {q.defect:.3e}")
    print(
        f"d_matched {rep.d_matched:.6f} (closed form {rep.d_matched_closed:.6f}), "
        f"d_range {rep.d_range:.6f}, d_null {rep.d_null:.6f}"
    )
    bad = failures(checks)
    print(f"checks: {len(checks) - len(bad)}/{len(checks)} passed")
    for c in bad:
        print(f"  FAIL {c.name}: residual {c.residual:.3e} > {c.tolerance:.3e}")
    return E_OK if ok else E_MATH


def cmd_generate(args) -> int:
    tol = _tolerances(args)
    if args.offdiag_norm > 1e3:
        print("error: --offdiag-norm capped at 1e3 (conditioning)", file=sys.stderr)
        return E_USAGE
    try:
        q = random_idempotent(args.dim, args.rank, args.offdiag_norm, args.seed, tol)
    except (MatchedProjectionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return E_USAGE
    save_matrix(args.output, q.matrix)
    print(
        f"wrote {args.output}: dim {args.dim}, rank {args.rank}, "
        f"norm {operator_norm(q.matrix):.12f}, defect {q.defect:.3e}"
    )
    return E_OK


def cmd_path(args) -> int:
    tol = _tolerances(args)
    try:
        q = _load_idempotent(args.input, tol)
    except MatchedProjectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return E_USAGE
    try:
        samples = homotopy_path(q, args.samples, tol)
    except MatchedProjectionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return E_MATH
    _write(args.output, dumps([matrix_to_obj(s.matrix) for s in samples]))
    worst = max(s.defect for s in samples)
    print(f"{len(samples)} samples from m(Q) to Q, max idempotency defect {worst:.3e}")
    return E_OK


def cmd_min2x2(args) -> int:
    tol = _tolerances(args)
    a = complex(args.a_re, args.a_im)
    if a == 0:
        print("error: parameter a must be nonzero", file=sys.stderr)
        return E_USAGE
    try:
        problem = closed_form_p0(a, tol)
        gm = grid_minimize(a, args.grid, args.grid, tol)
        pair = matched_projection(canonical_idempotent(a, tol), tol)
    except MatchedProjectionError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return E_MATH
    checks = list(gm.checks)
    route_gap = operator_norm(problem.p0.matrix - pair.projection.matrix)
    checks.append(
        Check("closed_form_is_matched", route_gap, 10 * tol.check * (1.0 + abs(a)))
    )
    ok = all_passed(checks)
    record = {
        "a": [a.real, a.imag],
        "b": problem.b,
        "theta0": problem.theta0,
        "t0": problem.t0,
        "closed_form": matrix_to_obj(problem.p0.matrix),
        "grid": {
            "points": args.grid,
            "min_value": gm.min_value,
            "argmin_x": gm.argmin_x,
            "argmin_t": gm.argmin_t,
            "optimum": gm.optimum,
            "gap": gm.gap,
            "grid_tolerance": gm.grid_tolerance,
        },
        "checks": _checks_to_obj(checks),
        "all_passed": ok,
    }
    _write(args.output, dumps(record))
    print(
        f"grid min {gm.min_value:.9f} at (x={gm.argmin_x:.6f}, t={gm.argmin_t:.6f}); "
        f"closed form {gm.optimum:.9f}, gap {gm.gap:.3e}"
    )
    for c in failures(checks):
        print(f"  FAIL {c.name}: residual {c.residual:.3e} > {c.tolerance:.3e}")
    return E_OK if ok else E_MATH


def cmd_verify(args) -> int:
    tol = _tolerances(args)
    if args.sabotage:
        with sabotaged_formula():
            report = run_battery(args.dim_max, args.trials, args.seed, tol)
    else:
        report = run_battery(args.dim_max, args.trials, args.seed, tol)

    width = max([len(n) for n in report.tallies] + [5])
    print(f"{'check':<{width}}  {'pass':>6}  {'fail':>6}")
    for tally in sorted(report.tallies.values(), key=lambda t: t.name):
        print(f"{tally.name:<{width}}  {tally.passed:>6}  {tally.failed:>6}")
    if "continuity_constant" in report.notes:
        print(f"observed continuity constant: {report.notes['continuity_constant']:.6f}")
    if report.all_passed:
        print(f"all checks passed over {args.trials} trials")
        return E_OK
    print(f"FIRST FAILURE: {report.first_failure()}")
    return E_MATH


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="matchedproj",
        description="Analyze idempotent matrices and their matched projections.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_tols(p):
        p.add_argument("--tol-check", type=float, default=1e-10, help="identity residual tolerance")
        p.add_argument(
            "--tol-rank",
            type=float,
            default=None,
            help="relative rank cutoff factor (default dim * machine epsilon)",
        )

    p = sub.add_parser("analyze", help="verify all identities for an idempotent from a JSON file")
    p.add_argument("--input", required=True)
    p.add_argument("--output", default=None, help="write the full JSON report here")
    add_tols(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("generate", help="write a seeded random idempotent to a JSON file")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--offdiag-norm", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    add_tols(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("path", help="sample the homotopy from m(Q) to Q")
    p.add_argument("--input", required=True)
    p.add_argument("--samples", type=int, default=11)
    p.add_argument("--output", default=None)
    add_tols(p)
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("min2x2", help="2x2 closed-form minimum against the grid oracle")
    p.add_argument("--a-re", type=float, default=0.0)
    p.add_argument("--a-im", type=float, default=0.0)
    p.add_argument("--grid", type=int, default=512)
    p.add_argument("--output", default=None)
    add_tols(p)
    p.set_defaults(func=cmd_min2x2)

    p = sub.add_parser("verify", help="run the randomized invariant battery")
    p.add_argument("--dim-max", type=int, default=8)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sabotage", action="store_true", help=argparse.SUPPRESS)
    add_tols(p)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except MatchedProjectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return E_MATH
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return E_USAGE


if __name__ == "__main__":
    sys.exit(main())
