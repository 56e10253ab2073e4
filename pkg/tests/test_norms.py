"""Tests for the norm identities, bounds, and convergence tables."""

import numpy as np
import pytest

from matchedproj import (
    HalmosPoint,
    InapplicableHypothesisError,
    all_passed,
    as_idempotent,
    as_projection,
    canonical_idempotent,
    closed_form_distance,
    convergence_report,
    distance_report,
    failures,
    halmos_projection,
    kkm_distance,
    matched_lipschitz_bounds,
    matched_projection,
    null_projection,
    operator_norm,
    qpp_minimality,
    random_idempotent,
    random_projection,
    random_qpp_pair,
    range_projection,
    two_projection_construction,
)

RT2 = np.sqrt(2.0)


def random_stress_idempotent(rng, dim_max=8, nu_range=(-2, 1)):
    dim = int(rng.integers(2, dim_max + 1))
    return random_idempotent(
        dim,
        int(rng.integers(1, dim)),
        float(10.0 ** rng.uniform(*nu_range)),
        int(rng.integers(2**32)),
    )


class TestClosedFormDistance:
    def test_zero_for_projections(self):
        assert closed_form_distance(0.0) == 0.0
        assert closed_form_distance(1.0) == 0.0

    def test_canonical_value(self):
        assert closed_form_distance(RT2) == pytest.approx(RT2 / 2.0, abs=1e-15)


class TestKkmDistance:
    def test_equal_projections(self):
        p = random_projection(4, 2, 5)
        assert kkm_distance(p, p) <= 1e-14

    def test_orthogonal_rank_one(self):
        p1 = as_projection(np.diag([1.0, 0.0]))
        p2 = as_projection(np.diag([0.0, 1.0]))
        assert kkm_distance(p1, p2) == pytest.approx(1.0, abs=1e-14)

    def test_halmos_quarter_turn(self):
        p1 = as_projection(np.diag([1.0, 0.0]))
        p2 = halmos_projection(HalmosPoint(z=1.0 + 0j, t=np.pi / 4), 0.0)
        d = kkm_distance(p1, p2)
        assert d == pytest.approx(RT2 / 2.0, abs=1e-12)
        assert d == pytest.approx(operator_norm(p1.matrix - p2.matrix), abs=1e-12)

    def test_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(40):
            dim = int(rng.integers(1, 9))
            p1 = random_projection(dim, int(rng.integers(0, dim + 1)), int(rng.integers(2**32)))
            p2 = random_projection(dim, int(rng.integers(0, dim + 1)), int(rng.integers(2**32)))
            d = kkm_distance(p1, p2)
            assert d == pytest.approx(operator_norm(p1.matrix - p2.matrix), abs=1e-12)


class TestDistanceReport:
    def test_projection_input(self):
        p = random_projection(5, 2, 13)
        rep = distance_report(as_idempotent(p.matrix))
        assert rep.d_matched <= 1e-12
        assert rep.d_range <= 1e-12
        assert operator_norm(rep.v_sim - np.eye(5)) <= 1e-12
        assert operator_norm(rep.d_op) <= 1e-12
        assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]

    def test_canonical_frozen_values(self):
        rep = distance_report(canonical_idempotent(1.0))
        assert rep.norm_q == pytest.approx(RT2, abs=1e-14)
        assert rep.d_matched == pytest.approx(RT2 / 2.0, abs=1e-12)
        assert rep.d_matched_closed == pytest.approx(RT2 / 2.0, abs=1e-14)
        assert rep.d_range == pytest.approx(1.0, abs=1e-12)
        assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]

    def test_canonical_sandwich_strict(self):
        rep = distance_report(canonical_idempotent(1.0))
        assert 0.5 * rep.d_range < rep.d_matched - 1e-3
        assert rep.d_matched < rep.d_range - 1e-3

    def test_eigenvalue_oracle_for_distance(self):
        # ||m(Q) - Q||^2 equals (b - 1)(b + a) / 2 on the canonical family
        for a in (0.3, 1.0, 2.5, 10.0):
            rep = distance_report(canonical_idempotent(a))
            b = np.sqrt(1 + a * a)
            assert rep.d_matched**2 == pytest.approx(0.5 * (b - 1) * (b + a), rel=1e-10)

    def test_random(self):
        rng = np.random.default_rng(17)
        for _ in range(30):
            rep = distance_report(random_stress_idempotent(rng))
            assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]

    def test_trivial_idempotents(self):
        for mat in (np.zeros((3, 3)), np.eye(3)):
            rep = distance_report(as_idempotent(mat))
            assert rep.d_matched <= 1e-13
            assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]


class TestLipschitzBounds:
    def test_identical_inputs(self):
        q = canonical_idempotent(1.0)
        out = matched_lipschitz_bounds(q, q)
        assert out.lhs <= 1e-12
        assert all_passed(out.checks)

    def test_projection_first_argument_zeroes_alpha(self):
        p = random_projection(4, 2, 19)
        q1 = as_idempotent(p.matrix)
        q2 = random_idempotent(4, 2, 1.0, 21)
        out = matched_lipschitz_bounds(q1, q2)
        assert out.alpha <= 1e-12
        assert out.scaled_bound is not None
        # with alpha = 0 the scaled bound reduces to the plain gap
        assert out.scaled_bound == pytest.approx(
            operator_norm(q1.matrix - q2.matrix), rel=1e-9
        )
        assert all_passed(out.checks), [c.name for c in failures(out.checks)]

    def test_random_pairs(self):
        rng = np.random.default_rng(23)
        for _ in range(40):
            dim = int(rng.integers(2, 8))
            q1 = random_idempotent(dim, int(rng.integers(1, dim)), 1.5, int(rng.integers(2**32)))
            q2 = random_idempotent(dim, int(rng.integers(1, dim)), 1.5, int(rng.integers(2**32)))
            out = matched_lipschitz_bounds(q1, q2)
            assert all_passed(out.checks), [c.name for c in failures(out.checks)]


class TestConvergenceReport:
    def test_equal_projections(self):
        p = random_projection(4, 2, 29)
        q = as_idempotent(p.matrix)
        rep = convergence_report(q, q, [1, 2, 4])
        assert rep.target <= 1e-12
        assert rep.alpha.max() <= 1e-10
        assert rep.beta.max() <= 1e-10

    def test_canonical_pair_beta_drops_to_zero(self):
        q = canonical_idempotent(1.0)
        rep = convergence_report(q, q, [2**k for k in range(11)])
        assert rep.target <= 1e-12
        assert rep.beta[0] > 0.1  # the compression is visibly above m(Q) at n = 1
        assert rep.beta[-1] <= 3e-3
        assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]

    def test_random_pairs(self):
        rng = np.random.default_rng(31)
        for _ in range(15):
            dim = int(rng.integers(2, 8))
            q1 = random_idempotent(dim, int(rng.integers(1, dim)), 2.0, int(rng.integers(2**32)))
            q2 = random_idempotent(dim, int(rng.integers(1, dim)), 2.0, int(rng.integers(2**32)))
            rep = convergence_report(q1, q2, [2**k for k in range(11)])
            assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]
            assert rep.alpha.min() >= rep.target - 1e-10

    def test_rejects_bad_exponents(self):
        q = canonical_idempotent(1.0)
        with pytest.raises(ValueError):
            convergence_report(q, q, [])
        with pytest.raises(ValueError):
            convergence_report(q, q, [0])


class TestTwoProjectionConstruction:
    def test_zero_first_projection(self):
        p1 = as_projection(np.zeros((3, 3)))
        p2 = random_projection(3, 1, 37)
        q1, q2, checks = two_projection_construction(p1, p2)
        assert operator_norm(q1.matrix) <= 1e-14
        assert operator_norm(q2.matrix - p2.matrix) <= 1e-12
        assert all_passed(checks)

    def test_orthogonal_ranges_dim_three(self):
        p1 = as_projection(np.diag([1.0, 0.0, 0.0]))
        v = np.array([[0.0], [1.0], [1.0]]) / RT2
        p2 = as_projection(v @ v.T)
        assert operator_norm(p1.matrix @ p2.matrix) <= 1e-14
        q1, q2, checks = two_projection_construction(p1, p2)
        np.testing.assert_allclose(q1.matrix, p1.matrix, atol=1e-13)
        np.testing.assert_allclose(q2.matrix, p2.matrix, atol=1e-13)
        assert operator_norm(q1.matrix - q2.matrix) == pytest.approx(1.0, abs=1e-12)
        assert all_passed(checks), [c.name for c in failures(checks)]

    def test_overlapping_ranges_rejected(self):
        p = random_projection(4, 2, 41)
        with pytest.raises(InapplicableHypothesisError):
            two_projection_construction(p, p)

    def test_random_applicable_pairs(self):
        rng = np.random.default_rng(43)
        done = 0
        while done < 40:
            dim = int(rng.integers(2, 9))
            p1 = random_projection(dim, int(rng.integers(0, dim // 2 + 1)), int(rng.integers(2**32)))
            p2 = random_projection(dim, int(rng.integers(0, dim // 2 + 1)), int(rng.integers(2**32)))
            if operator_norm(p1.matrix @ p2.matrix) >= 0.999:
                continue
            _, _, checks = two_projection_construction(p1, p2)
            assert all_passed(checks), [c.name for c in failures(checks)]
            done += 1


class TestQppMinimality:
    def test_matched_pair_detected_as_equality_case(self):
        q = canonical_idempotent(1.0)
        pair = matched_projection(q)
        rep = qpp_minimality(pair.projection, q)
        assert rep.qpp_holds
        names = {c.name: c for c in rep.checks}
        assert names["dominance_equality_iff_matched"].passed
        assert names["small_distance_forces_matched"].passed
        assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]

    def test_range_partner_two_times_bound(self):
        q = canonical_idempotent(1.0)
        rep = qpp_minimality(range_projection(q), q)
        assert not rep.qpp_holds
        assert rep.d_matched == pytest.approx(RT2 / 2.0, abs=1e-12)
        assert rep.d_candidate == pytest.approx(1.0, abs=1e-12)
        assert rep.d_matched <= 2.0 * rep.d_candidate + 1e-12
        assert all_passed(rep.checks)

    def test_null_partner(self):
        q = canonical_idempotent(1.0)
        rep = qpp_minimality(null_projection(q), q)
        assert rep.d_matched <= 2.0 * rep.d_candidate + 1e-12
        assert all_passed(rep.checks)

    def test_generated_qpp_pairs(self):
        for seed in range(40):
            p, q = random_qpp_pair(6, seed)
            rep = qpp_minimality(p, q)
            assert rep.qpp_holds
            assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]

    def test_any_projection_twice_bound(self):
        rng = np.random.default_rng(47)
        for _ in range(40):
            dim = int(rng.integers(2, 8))
            q = random_stress_idempotent(rng, dim_max=dim)
            p = random_projection(q.dim, int(rng.integers(0, q.dim + 1)), int(rng.integers(2**32)))
            rep = qpp_minimality(p, q)
            assert all_passed(rep.checks), [c.name for c in failures(rep.checks)]


class TestProjectionDistanceBound:
    def test_matched_is_closer_than_q_for_any_projection(self):
        rng = np.random.default_rng(53)
        for _ in range(40):
            q = random_stress_idempotent(rng)
            m = matched_projection(q).projection.matrix
            p = random_projection(q.dim, int(rng.integers(0, q.dim + 1)), int(rng.integers(2**32)))
            lhs = operator_norm(p.matrix - m)
            rhs = operator_norm(p.matrix - q.matrix)
            assert lhs <= rhs + 1e-9
