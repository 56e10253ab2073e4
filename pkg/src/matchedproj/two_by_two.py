"""Closed-form 2x2 minimization: which projection is nearest to [[1, a], [0, 0]].

Every non-projection 2x2 idempotent is unitarily equivalent to
Q = [[1, a], [0, 0]] with a != 0, and every non-trivial 2x2 projection sits
in a one-parameter Halmos family indexed by an angle t and a unimodular
scalar z.  The squared distance ||P - Q||^2 has an explicit expression in
(|a|, Re z, t) whose minimum over the family is attained at z = 1 and half
the angle theta_0 with sin(theta_0) = |a| / sqrt(1 + |a|^2).  The grid
minimizer here is the brute-force oracle for that closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError, ZeroParameterError
from .idempotents import Idempotent, Projection, as_idempotent, as_projection
from .linalg import DEFAULT_TOL, Tolerances, adjoint, operator_norm
from .report import Check, boolean_check


@dataclass(frozen=True)
class HalmosPoint:
    """Coordinates (z, t) of a non-trivial 2x2 projection; |z| = 1, t in [0, pi]."""

    z: complex
    t: float

    def __post_init__(self):
        if abs(abs(self.z) - 1.0) > 1e-10:
            raise ValueError(f"|z| = {abs(self.z)!r} is not 1")
        if not 0.0 <= self.t <= np.pi:
            raise ValueError(f"angle {self.t!r} outside [0, pi]")

    @property
    def x(self) -> float:
        """Re z, the only part of z the distance objective sees."""
        return self.z.real


def canonical_idempotent(a: complex, tol: Tolerances | None = None) -> Idempotent:
    """The 2x2 idempotent [[1, a], [0, 0]]; its norm is sqrt(1 + |a|^2)."""
    if a == 0:
        raise ZeroParameterError("parameter a must be nonzero")
    return as_idempotent([[1.0, a], [0.0, 0.0]], tol or DEFAULT_TOL)


def halmos_projection(
    point: HalmosPoint, theta: float, tol: Tolerances | None = None
) -> Projection:
    """The projection at (z, t), rotated by diag(1, e^(-i theta))."""
    c, s = np.cos(point.t), np.sin(point.t)
    w = abs(c * s)
    inner = np.array(
        [[c**2, np.conj(point.z) * w], [point.z * w, s**2]], dtype=np.complex128
    )
    u = np.diag([1.0, np.exp(-1j * theta)])
    return as_projection(u @ inner @ adjoint(u), tol or DEFAULT_TOL)


def distance_objective(a: complex, x: float, t: float) -> float:
    """||P - Q||^2 for the Halmos projection at (x, t) against [[1, a], [0, 0]].

    Analytic form: (2 sin^2 t + |a| (mu + sqrt(mu^2 + 4 sin^4 t))) / 2 with
    mu = |a| - 2 |cos t sin t| x.
    """
    mod = abs(a)
    s2 = np.sin(t) ** 2
    mu = mod - 2.0 * abs(np.cos(t) * np.sin(t)) * x
    return 0.5 * (2.0 * s2 + mod * (mu + np.sqrt(mu**2 + 4.0 * s2**2)))


@dataclass(frozen=True)
class TwoByTwoProblem:
    """Closed-form minimizer data for the parameter a."""

    a: complex
    b: float
    theta0: float
    t0: float
    p0: Projection


def closed_form_p0(a: complex, tol: Tolerances | None = None) -> TwoByTwoProblem:
    """The nearest projection (1/2b) [[b+1, a], [conj(a), b-1]], b = sqrt(1+|a|^2)."""
    tol = tol or DEFAULT_TOL
    if a == 0:
        raise ZeroParameterError("parameter a must be nonzero")
    mod = abs(a)
    b = np.sqrt(1.0 + mod**2)
    theta0 = np.arctan(mod)  # sin = |a|/b, cos = 1/b
    t0 = theta0 / 2.0
    if abs(np.sin(t0) * np.cos(t0) - mod / (2.0 * b)) > tol.check:
        raise ValidationError("half-angle identity failed")
    p0 = np.array(
        [[b + 1.0, a], [np.conjugate(a), b - 1.0]], dtype=np.complex128
    ) / (2.0 * b)
    return TwoByTwoProblem(a=a, b=b, theta0=theta0, t0=t0, p0=as_projection(p0, tol))


@dataclass(frozen=True)
class GridMinimum:
    """Brute-force minimum of the distance objective over [-1, 1] x [0, pi]."""

    min_value: float
    argmin_x: float
    argmin_t: float
    optimum: float
    gap: float
    grid_tolerance: float
    checks: list[Check]


def grid_minimize(
    a: complex, grid_x: int, grid_t: int, tol: Tolerances | None = None
) -> GridMinimum:
    """Scan the objective on a uniform grid and compare with the closed form.

    The objective is Lipschitz on the compact domain, so the grid minimum
    must land within an O(step) band above the true optimum; it can never
    fall below it, being a minimum over a subset.
    """
    tol = tol or DEFAULT_TOL
    if grid_x < 1 or grid_t < 1:
        raise ValueError("grid sizes must be positive")
    problem = closed_form_p0(a, tol)
    mod = abs(a)
    xs = np.linspace(-1.0, 1.0, grid_x)
    ts = np.linspace(0.0, np.pi, grid_t)

    best = np.inf
    best_x, best_t = xs[0], ts[0]
    max_g = -np.inf
    for t in ts:
        s2 = np.sin(t) ** 2
        mu = mod - 2.0 * abs(np.cos(t) * np.sin(t)) * xs
        vals = 0.5 * (2.0 * s2 + mod * (mu + np.sqrt(mu**2 + 4.0 * s2**2)))
        i = int(np.argmin(vals))
        if vals[i] < best:
            best, best_x, best_t = float(vals[i]), float(xs[i]), float(t)
        max_g = max(max_g, np.cos(2.0 * t) + mod * abs(np.sin(2.0 * t)))

    optimum = distance_objective(a, 1.0, problem.t0)
    gap = best - optimum
    dx = 2.0 / (grid_x - 1) if grid_x > 1 else 2.0
    dt = np.pi / (grid_t - 1) if grid_t > 1 else np.pi
    lipschitz = (2.0 + 3.0 * mod) * dt + mod * dx

    q = canonical_idempotent(a, tol)
    norm_q = operator_norm(q.matrix)
    norm_comp = operator_norm(np.eye(2) - q.matrix)
    scale = tol.check * (1.0 + problem.b)

    checks = [
        Check("grid_min_above_optimum", max(0.0, -gap), tol.check),
        Check("grid_min_near_optimum", abs(gap), lipschitz),
        Check("norm_is_b", abs(norm_q - problem.b), scale),
        Check("complement_norm_is_b", abs(norm_comp - problem.b), scale),
        boolean_check("trivial_projections_farther", problem.b > mod),
        Check("angle_bound_attained", problem.b - max_g, (2.0 + 2.0 * mod) * dt),
        Check("angle_bound_holds", max(0.0, max_g - problem.b), tol.check),
    ]
    if min(grid_x, grid_t) >= 8:
        # on coarse grids the argmin is not forced anywhere near the optimum;
        # t and pi - t parametrize the same projection, so both count
        t_gap = min(abs(best_t - problem.t0), abs(np.pi - best_t - problem.t0))
        checks.append(Check("argmin_x_at_one", abs(best_x - 1.0), dx + tol.check))
        checks.append(Check("argmin_t_near_half_angle", t_gap, dt + tol.check))
    return GridMinimum(
        min_value=best,
        argmin_x=best_x,
        argmin_t=best_t,
        optimum=optimum,
        gap=gap,
        grid_tolerance=lipschitz,
        checks=checks,
    )
