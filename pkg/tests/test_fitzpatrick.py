import numpy as np
import pytest

from ssdkit import (
    BracketViolated,
    EmptySet,
    GridFn,
    NotAMinorant,
    PointSet,
    fitz_triple,
    lemma_2_13_suite,
    phi,
    remark_2_14_gap,
    sigma_minorant_test,
    star_theta,
    theorem_2_15_suite,
    theta,
)
from ssdkit.catalog import (
    default_grid,
    diagonal_set,
    helix_set,
    singleton_origin,
    space_zero_pairing,
)
from ssdkit.fitzpatrick import dual_probe_points, phi_two_ways


class TestTheta:
    def test_singleton_gives_affine(self, prod_space):
        a = PointSet([[1.0, 2.0]])
        rng = np.random.default_rng(9)
        ys = rng.normal(size=(50, 2))
        got = theta(prod_space, a, ys)
        expected = ys @ np.array([1.0, 2.0]) - prod_space.q([1.0, 2.0])
        assert got == pytest.approx(expected, abs=1e-12)

    def test_diagonal_closed_form(self, prod_space, diag121):
        # sup_t [t(y + y*) - t^2] = (y + y*)^2 / 4, via a dense 1-d scan oracle
        ys = np.array([[1.0, 0.5], [-2.0, 1.0], [0.3, 0.3], [2.0, -2.0]])
        got = theta(prod_space, diag121.underlying, ys)
        ts = np.linspace(-3, 3, 200_001)
        for y, g in zip(ys, got):
            oracle = np.max(ts * (y[0] + y[1]) - ts**2)
            assert g == pytest.approx(oracle, abs=1e-8)
            assert g == pytest.approx((y[0] + y[1]) ** 2 / 4.0, abs=1e-3)

    def test_empty_set_rejected(self, prod_space):
        with pytest.raises(EmptySet):
            theta(prod_space, PointSet(np.zeros((0, 2)), allow_empty=True), [0.0, 0.0])


class TestPhi:
    def test_two_formulas_agree_everywhere(self, prod_space, grid61, diag121):
        v1, v2 = phi_two_ways(prod_space, diag121.underlying, grid61.points())
        assert np.max(np.abs(v1 - v2)) < 1e-12

    def test_equals_q_on_positive_set(self, swap3):
        hel = helix_set(n=50, span=3.0)
        vals = phi(swap3, hel, hel.points)
        assert vals == pytest.approx(swap3.q(hel.points), abs=1e-12)

    def test_diagonal_closed_form(self, prod_space, grid61, diag121):
        pts = grid61.points()
        vals = phi(prod_space, diag121.underlying, pts)
        expected = pts[:, 0] * pts[:, 1] + 0.25 * (pts[:, 0] - pts[:, 1]) ** 2
        assert vals == pytest.approx(expected, abs=1e-9)

    def test_origin_singleton_gives_zero(self, prod_space, grid61):
        vals = phi(prod_space, singleton_origin(2), grid61.points())
        assert np.max(np.abs(vals)) == 0.0

    def test_monotone_in_the_set(self, prod_space, grid61):
        small = diagonal_set(-1, 1, 41)
        big = diagonal_set(-3, 3, 121)
        pts = grid61.points()
        v_small = phi(prod_space, small.underlying, pts)
        v_big = phi(prod_space, big.underlying, pts)
        assert np.all(v_small <= v_big + 1e-12)


class TestStarTheta:
    def test_matches_q_on_diagonal_nodes(self, prod_space, grid61, diag121):
        triple = fitz_triple(prod_space, diag121.underlying, grid61)
        pts = grid61.points()
        on_diag = np.abs(pts[:, 0] - pts[:, 1]) < 1e-12
        got = triple.star_theta_fn.values[on_diag]
        assert got == pytest.approx(prod_space.q(pts[on_diag]), abs=1e-9)

    def test_zero_pairing_two_point_set(self, grid61):
        space = space_zero_pairing(2)
        a = PointSet([[-1.0, -1.0], [1.0, 1.0]], label="two points")
        dual_pts = dual_probe_points(space, grid61)
        # pullback-conjugate of the primal representer is identically zero,
        # the conjugate-back representer blows up away from the hull
        assert phi(space, a, grid61.points()) == pytest.approx(np.zeros(grid61.size))
        inside = star_theta(space, a, dual_pts, np.array([0.0, 0.0]))
        outside = star_theta(space, a, dual_pts, np.array([3.0, -3.0]))
        assert abs(inside) <= 1e-9
        assert outside >= 0.5

    def test_gap_against_pullback_conjugate(self, grid61):
        space = space_zero_pairing(2)
        a = PointSet([[-1.0, -1.0], [1.0, 1.0]], label="two points")
        gap, witness = remark_2_14_gap(space, a, grid61)
        assert gap >= 0.5


class TestLemma213Suite:
    def test_diagonal_all_parts(self, prod_space, grid61, diag121):
        rep = lemma_2_13_suite(prod_space, diag121.underlying, grid61)
        assert rep.passed
        for part in ("a_two_formulas", "b_phi_touches", "e_star_below_q",
                     "f_sandwich_upper", "f_sandwich_lower", "g_equalities_on_set"):
            assert rep.check(part).worst_residual <= 1e-6
        assert rep.check("h_phi_dominates_q").status == "pass"
        assert rep.check("i_touching_sets_equal").status == "pass"

    def test_singleton_maximality_parts_skipped(self, prod_space, grid61):
        rep = lemma_2_13_suite(prod_space, singleton_origin(2), grid61)
        assert rep.passed  # skipped parts do not fail the suite
        assert rep.check("h_phi_dominates_q").status == "skipped"
        assert rep.check("i_touching_sets_equal").status == "skipped"
        for part in ("a_two_formulas", "b_phi_touches", "e_star_below_q",
                     "f_sandwich_upper", "f_sandwich_lower", "g_equalities_on_set"):
            assert rep.check(part).status == "pass"

    def test_helix_sample_in_r3(self, swap3):
        grid = default_grid(3, -3.0, 3.0, 17)
        hel = helix_set(n=61, span=3.0)
        rep = lemma_2_13_suite(swap3, hel, grid)
        for part in ("a_two_formulas", "b_phi_touches", "e_star_below_q",
                     "f_sandwich_upper", "f_sandwich_lower", "g_equalities_on_set"):
            assert rep.check(part).status == "pass", part
            assert rep.check(part).worst_residual <= 1e-6


class TestTheorem215:
    def test_worked_example_with_phi_candidate(self, prod_space, grid61, worked_fn61):
        triple_h = fitz_triple(prod_space, diagonal_set(-3, 3, 121).underlying, grid61)
        rep = theorem_2_15_suite(prod_space, worked_fn61, triple_h.phi_fn)
        assert rep.passed

    def test_star_candidate(self, prod_space, grid61, worked_fn61):
        triple_h = fitz_triple(prod_space, diagonal_set(-3, 3, 121).underlying, grid61)
        rep = theorem_2_15_suite(prod_space, worked_fn61, triple_h.star_theta_fn)
        assert rep.passed

    def test_below_sandwich_rejected(self, prod_space, grid61, worked_fn61):
        low = GridFn.from_callable(
            grid61, lambda p: prod_space.q(np.atleast_2d(p)) - 1.0,
            form="below the sandwich", require_convex=False)
        with pytest.raises(BracketViolated):
            theorem_2_15_suite(prod_space, worked_fn61, low)

    def test_no_candidate_just_brackets(self, prod_space, worked_fn61):
        rep = theorem_2_15_suite(prod_space, worked_fn61, None)
        assert rep.passed


class TestSigmaMinorant:
    def test_phi_is_a_minorant(self, prod_space, grid61, diag121):
        triple = fitz_triple(prod_space, diag121.underlying, grid61)
        rep = sigma_minorant_test(prod_space, diag121.underlying, triple.phi_fn)
        assert rep.passed

    def test_affine_tangent_is_a_minorant(self, prod_space, grid61, diag121):
        a0 = np.array([1.0, 1.0])
        fn = GridFn.from_callable(
            grid61,
            lambda p: np.atleast_2d(p) @ prod_space.pairing @ a0 - prod_space.q(a0),
            form="affine tangent at a set point")
        rep = sigma_minorant_test(prod_space, diag121.underlying, fn)
        assert rep.passed

    def test_above_q_on_set_rejected(self, prod_space, grid61, diag121):
        fn = GridFn.from_callable(
            grid61, lambda p: prod_space.q(np.atleast_2d(p)) + 1.0,
            form="above q", require_convex=False)
        with pytest.raises(NotAMinorant):
            sigma_minorant_test(prod_space, diag121.underlying, fn)


class TestConjugateBracket:
    def test_phi_star_dominates_theta(self, prod_space, grid61, diag121):
        from ssdkit.gridfn import sup_linear_minus

        triple = fitz_triple(prod_space, diag121.underlying, grid61)
        pts = grid61.points()
        sources = np.vstack([pts, diag121.points])
        vals = np.concatenate([triple.phi_fn.values,
                               phi(prod_space, diag121.underlying, diag121.points)])
        phi_star, _ = sup_linear_minus(sources, vals, triple.dual_points)
        theta_vals = theta(prod_space, diag121.underlying, triple.dual_points)
        assert np.all(phi_star >= theta_vals - 1e-9)
