"""Norm identities, inequalities, closed forms, and convergence tables for m(Q)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InapplicableHypothesisError, ValidationError
from .idempotents import (
    Idempotent,
    Projection,
    as_idempotent,
    null_projection,
    range_projection,
)
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    abs_value,
    adjoint,
    hermitian_gap,
    identity,
    operator_norm,
    psd_order,
    psd_power,
    require_hermitian,
)
from .matched import is_quasi_projection_pair, matched_projection
from .report import Check, boolean_check


def closed_form_distance(norm_q: float) -> float:
    """||m(Q) - Q|| from ||Q|| alone: (||Q|| - 1 + sqrt(||Q||^2 - 1)) / 2.

    Any nonzero idempotent has norm >= 1; values below 1 only occur for the
    zero matrix (or round-off), where the distance is 0.
    """
    if norm_q <= 1.0:
        return 0.0
    return 0.5 * (norm_q - 1.0 + np.sqrt(norm_q**2 - 1.0))


def kkm_distance(p1: Projection, p2: Projection, tol: Tolerances | None = None) -> float:
    """max(||P1 (I - P2)||, ||(I - P1) P2||), certified equal to ||P1 - P2||."""
    tol = tol or DEFAULT_TOL
    eye = identity(p1.dim)
    d = max(
        operator_norm(p1.matrix @ (eye - p2.matrix)),
        operator_norm((eye - p1.matrix) @ p2.matrix),
    )
    direct = operator_norm(p1.matrix - p2.matrix)
    if abs(d - direct) > tol.check:
        raise ValidationError(
            f"projection-distance equality violated: {d:.12e} vs {direct:.12e}"
        )
    return d


@dataclass(frozen=True)
class DistanceReport:
    """Distances from Q to its distinguished projections, with all cross-checks."""

    norm_q: float
    norm_complement: float
    d_matched: float
    d_matched_closed: float
    d_range: float
    d_null: float
    v_sim: np.ndarray
    d_op: np.ndarray
    x_op: np.ndarray
    y_op: np.ndarray
    checks: list[Check]


def distance_report(q: Idempotent, tol: Tolerances | None = None) -> DistanceReport:
    """All distance identities and inequalities for a single idempotent.

    Covers the closed-form distance, the sandwich between half the range-gap
    and the full range-gap, the chain through ||Q|| = ||I - Q||, the
    similarity through V = (|Q| + |I - Q| + I)/2, and the quadratic
    identities tying (Q* - Q)(Q* - Q)* to the defect operator D.
    """
    tol = tol or DEFAULT_TOL
    qm = q.matrix
    eye = identity(q.dim)
    pair = matched_projection(q, tol)
    m = pair.projection.matrix

    norm_q = operator_norm(qm)
    norm_c = operator_norm(eye - qm)
    d_matched = operator_norm(m - qm)
    d_closed = closed_form_distance(norm_q)
    d_range = operator_norm(range_projection(q, tol).matrix - qm)
    d_null = operator_norm(null_projection(q, tol).matrix - qm)

    v_sim = 0.5 * (pair.abs_q + abs_value(eye - qm) + eye)

    cross_range = m @ (eye - qm) @ m
    cross_null = (eye - m) @ qm @ (eye - m)
    d_op = -cross_range - cross_null
    diff = m - qm
    x_op = diff @ adjoint(diff)
    y_op = adjoint(diff) @ diff
    gap_adj = adjoint(qm) - qm

    scale = tol.check * (1.0 + norm_q)
    scale_sq = tol.check * (1.0 + norm_q**2)
    norm_d = operator_norm(d_op)

    checks = [
        Check("closed_form_agreement", abs(d_matched - d_closed), scale),
        Check("range_gap_equals_adjoint_gap", abs(d_range - operator_norm(gap_adj)), scale),
        Check(
            "range_gap_closed_form",
            abs(d_range - np.sqrt(max(norm_q**2 - 1.0, 0.0))),
            scale,
        ),
        Check("sandwich_lower", max(0.0, 0.5 * d_range - d_matched), scale),
        Check("sandwich_upper", max(0.0, d_matched - d_range), scale),
        Check("chain_matched_below_norm", max(0.0, d_matched - norm_q), scale),
        Check("chain_norm_below_null_gap", max(0.0, norm_q - d_null), scale),
        Check(
            "similarity_conjugates_matched",
            operator_norm(v_sim @ qm - m @ v_sim),
            scale_sq,
        ),
        Check(
            "similarity_defect_square",
            operator_norm((eye - v_sim) @ (eye - v_sim) - y_op),
            scale_sq,
        ),
        Check(
            "defect_operator_identity",
            operator_norm(4.0 * d_op @ d_op + 4.0 * d_op - gap_adj @ adjoint(gap_adj)),
            scale_sq,
        ),
        Check(
            "xy_sum_identity",
            operator_norm(x_op + y_op - 4.0 * d_op @ d_op - 2.0 * d_op),
            scale_sq,
        ),
        boolean_check("defect_operator_psd", psd_order(np.zeros_like(d_op), d_op, tol)),
        boolean_check(
            "range_compression_psd", psd_order(np.zeros_like(d_op), -cross_range, tol)
        ),
        boolean_check(
            "null_compression_psd", psd_order(np.zeros_like(d_op), -cross_null, tol)
        ),
        boolean_check("x_psd", psd_order(np.zeros_like(x_op), x_op, tol)),
        boolean_check("y_psd", psd_order(np.zeros_like(y_op), y_op, tol)),
        Check(
            "compression_norms_equal",
            abs(operator_norm(cross_range) - operator_norm(cross_null)),
            scale,
        ),
        Check("x_norm_is_distance_squared", abs(operator_norm(x_op) - d_matched**2), scale_sq),
        Check("y_norm_is_distance_squared", abs(operator_norm(y_op) - d_matched**2), scale_sq),
        Check(
            "xy_norm_identity",
            abs(operator_norm(x_op + y_op) - (4.0 * norm_d**2 + 2.0 * norm_d)),
            scale_sq,
        ),
        Check(
            "adjoint_gap_norm_identity",
            abs(operator_norm(gap_adj) ** 2 - (4.0 * norm_d**2 + 4.0 * norm_d)),
            scale_sq,
        ),
    ]

    # the norm equality ||Q|| = ||I - Q|| needs a non-trivial idempotent
    if norm_q > 0.5 and norm_c > 0.5:
        checks.append(Check("norm_equals_complement_norm", abs(norm_q - norm_c), scale))

    lower_tight = abs(0.5 * d_range - d_matched) <= scale
    upper_tight = abs(d_matched - d_range) <= scale
    is_projection = hermitian_gap(qm) <= tol.check
    checks.append(
        boolean_check(
            "sandwich_equality_iff_projection",
            (lower_tight == is_projection) and (upper_tight == is_projection),
        )
    )

    return DistanceReport(
        norm_q=norm_q,
        norm_complement=norm_c,
        d_matched=d_matched,
        d_matched_closed=d_closed,
        d_range=d_range,
        d_null=d_null,
        v_sim=v_sim,
        d_op=d_op,
        x_op=x_op,
        y_op=y_op,
        checks=checks,
    )


@dataclass(frozen=True)
class LipschitzBounds:
    """Upper bounds on ||m(Q1) - m(Q2)|| and whether each one held."""

    lhs: float
    alpha: float
    scaled_bound: float | None
    min_bound: float
    mixed_left: float
    mixed_right: float
    checks: list[Check]


def matched_lipschitz_bounds(
    q1: Idempotent, q2: Idempotent, tol: Tolerances | None = None
) -> LipschitzBounds:
    """Compare ||m(Q1) - m(Q2)|| against its proven upper bounds.

    The scaled bound ||Q1 - Q2|| / (1 - alpha) applies only when the
    compression norm alpha is safely below 1; near 1 it is reported as
    inapplicable rather than asserted against a meaningless bound.
    """
    tol = tol or DEFAULT_TOL
    eye = identity(q1.dim)
    m1 = matched_projection(q1, tol).projection.matrix
    m2 = matched_projection(q2, tol).projection.matrix
    lhs = operator_norm(m1 - m2)
    comp = eye - m1
    alpha = operator_norm(comp @ q1.matrix @ comp)
    gap = operator_norm(q1.matrix - q2.matrix)

    scaled = gap / (1.0 - alpha) if alpha <= 1.0 - 1e-6 else None
    min_bound = min(
        operator_norm(m1 - q2.matrix), operator_norm(q1.matrix - m2)
    )
    mixed_left = operator_norm(m1 @ q1.matrix - m2 @ q2.matrix)
    mixed_right = operator_norm(q1.matrix @ m1 - q2.matrix @ m2)

    checks = [
        Check("bounded_by_min_of_cross_gaps", max(0.0, lhs - min_bound), tol.check),
        Check("bounded_by_mixed_left", max(0.0, lhs - mixed_left), tol.check),
        Check("bounded_by_mixed_right", max(0.0, lhs - mixed_right), tol.check),
    ]
    if scaled is not None:
        checks.append(Check("bounded_by_scaled_gap", max(0.0, lhs - scaled), tol.check))

    return LipschitzBounds(
        lhs=lhs,
        alpha=alpha,
        scaled_bound=scaled,
        min_bound=min_bound,
        mixed_left=mixed_left,
        mixed_right=mixed_right,
        checks=checks,
    )


@dataclass(frozen=True)
class ConvergenceReport:
    """Fractional-power distance tables whose infimum is ||m(Q1) - m(Q2)||."""

    exponents: tuple[int, ...]
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    target: float
    checks: list[Check]


def convergence_report(
    q1: Idempotent,
    q2: Idempotent,
    exponents: list[int],
    tol: Tolerances | None = None,
) -> ConvergenceReport:
    """Tabulate the three distance families over a finite exponent grid.

    Every entry bounds ||m(Q1) - m(Q2)|| from above, and the one-sided
    family converges to it as the exponent grows, so the grid certifies the
    infimum from both sides.
    """
    tol = tol or DEFAULT_TOL
    if not exponents or any(n < 1 for n in exponents):
        raise ValueError("exponents must be positive integers")
    m1 = matched_projection(q1, tol).projection.matrix
    m2 = matched_projection(q2, tol).projection.matrix
    k1 = require_hermitian(m1 @ q1.matrix @ m1, tol)
    k2 = require_hermitian(m2 @ q2.matrix @ m2, tol)
    pow1 = [psd_power(k1, 1.0 / n, tol) for n in exponents]
    pow2 = [psd_power(k2, 1.0 / n, tol) for n in exponents]

    alpha = np.array([[operator_norm(a - b) for b in pow2] for a in pow1])
    beta = np.array([operator_norm(a - m2) for a in pow1])
    gamma = np.array([operator_norm(m1 - b) for b in pow2])
    target = operator_norm(m1 - m2)

    tabulated_min = min(alpha.min(), beta.min(), gamma.min())
    monotone_slack = max(
        [0.0] + [beta[i + 1] - beta[i] for i in range(len(beta) - 1)]
    )
    checks = [
        Check("grid_bounds_target_below", max(0.0, target - tabulated_min), tol.check),
        Check("beta_tail_near_target", abs(beta[-1] - target), 1e-2),
        Check("beta_nonincreasing", monotone_slack, tol.check),
    ]
    return ConvergenceReport(
        exponents=tuple(exponents),
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        target=target,
        checks=checks,
    )


def two_projection_construction(
    p1: Projection, p2: Projection, tol: Tolerances | None = None
) -> tuple[Idempotent, Idempotent, list[Check]]:
    """Idempotents (I - P1 P2)^(-1) P1 (I - P2) and its mirror, with their bounds.

    Requires ||P1 P2|| < 1.  For the resulting pair the matched projections
    satisfy ||m(Q1) - m(Q2)|| <= ||Q1 - Q2||, and if both projections are
    nonzero the gap ||Q1 - Q2|| is at least 1.
    """
    tol = tol or DEFAULT_TOL
    eye = identity(p1.dim)
    a, b = p1.matrix, p2.matrix
    prod_norm = operator_norm(a @ b)
    if prod_norm >= 1.0 - tol.check:
        raise InapplicableHypothesisError(f"||P1 P2|| = {prod_norm:.6f} is not < 1")
    q1 = as_idempotent(np.linalg.solve(eye - a @ b, a @ (eye - b)), tol)
    q2 = as_idempotent(np.linalg.solve(eye - b @ a, b @ (eye - a)), tol)

    m1 = matched_projection(q1, tol).projection.matrix
    m2 = matched_projection(q2, tol).projection.matrix
    lhs = operator_norm(m1 - m2)
    gap = operator_norm(q1.matrix - q2.matrix)
    checks = [Check("matched_gap_bounded_by_gap", max(0.0, lhs - gap), tol.check)]
    if operator_norm(a) > 0.5 and operator_norm(b) > 0.5:
        checks.append(Check("gap_at_least_one", max(0.0, 1.0 - gap), tol.check))
    return q1, q2, checks


@dataclass(frozen=True)
class MinimalityReport:
    """How close a candidate projection comes to the matched one."""

    d_matched: float
    d_candidate: float
    qpp_holds: bool
    checks: list[Check]


def qpp_minimality(
    p: Projection, q: Idempotent, tol: Tolerances | None = None
) -> MinimalityReport:
    """Distance-minimality of m(Q) among quasi-projection-pair partners.

    Always verifies ||m(Q) - Q|| <= 2 ||P - Q||.  When (P, Q) is a
    quasi-projection pair it additionally verifies the PSD dominance of
    (P - Q)(P - Q)* over the matched counterpart (with equality exactly at
    P = m(Q)), the sharp factor-one bound, and the small-distance rigidity:
    ||P - Q|| < 1 forces P = m(Q) and ||Q|| < 5/3.
    """
    tol = tol or DEFAULT_TOL
    pair = matched_projection(q, tol)
    m = pair.projection.matrix
    qm = q.matrix
    d_matched = operator_norm(m - qm)
    d_candidate = operator_norm(p.matrix - qm)
    scale = tol.check * (1.0 + operator_norm(qm))
    scale_sq = tol.check * (1.0 + operator_norm(qm) ** 2)

    checks = [
        Check("matched_within_twice_candidate", max(0.0, d_matched - 2.0 * d_candidate), scale)
    ]
    verdict = is_quasi_projection_pair(p, q, tol)
    if verdict.holds:
        diff_m = m - qm
        diff_p = p.matrix - qm
        left_m, left_p = diff_m @ adjoint(diff_m), diff_p @ adjoint(diff_p)
        right_m, right_p = adjoint(diff_m) @ diff_m, adjoint(diff_p) @ diff_p
        checks.append(boolean_check("psd_dominance_left", psd_order(left_m, left_p, tol)))
        checks.append(boolean_check("psd_dominance_right", psd_order(right_m, right_p, tol)))
        checks.append(
            Check("matched_within_candidate", max(0.0, d_matched - d_candidate), scale)
        )
        dominance_tight = operator_norm(left_p - left_m) <= scale_sq
        candidate_is_matched = operator_norm(p.matrix - m) <= scale
        checks.append(
            boolean_check(
                "dominance_equality_iff_matched", dominance_tight == candidate_is_matched
            )
        )
        # strict hypotheses degenerate at round-off; require a real margin below 1
        if d_candidate < 1.0 - 1e-6:
            checks.append(
                Check("small_distance_forces_matched", operator_norm(p.matrix - m), scale)
            )
            checks.append(
                Check(
                    "small_distance_bounds_norm",
                    max(0.0, operator_norm(qm) - 5.0 / 3.0),
                    tol.check,
                )
            )
    return MinimalityReport(
        d_matched=d_matched,
        d_candidate=d_candidate,
        qpp_holds=verdict.holds,
        checks=checks,
    )
