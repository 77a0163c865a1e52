import math

import numpy as np
import pytest

from pextremal import (
    ConvergenceError,
    ConvexBody,
    DomainError,
    ModuliPoint,
    UnivariateExtremal,
    f_value,
    h_p,
    kkt_residual,
    monomial_bound,
    v_ball,
    v_ball_linf_2d,
    v_ball_simplex,
    v_product,
    v_torus,
)
from pextremal.extremal import _solve_kkt

LOG2 = math.log(2.0)


def random_outside_points(rng, count, d=2, rmin=1.05, rmax=3.0):
    pts = []
    while len(pts) < count:
        z = rng.uniform(0.05, 1.0, d)
        r = rng.uniform(rmin, rmax)
        z = z / np.linalg.norm(z) * r
        pts.append(z)
    return pts


def brute_force_v_q2(s, resolution=10_000):
    """Dense search over the l2 sphere arc, the independent oracle for d=2."""
    t = np.linspace(1e-6, math.pi / 2 - 1e-6, resolution)
    p = ModuliPoint(tuple(s))
    best = -math.inf
    for ti in t:
        theta = np.array([math.cos(ti), math.sin(ti)])
        best = max(best, f_value(theta, p))
    return best


class TestClosedForms:
    def test_simplex_inside(self):
        assert v_ball_simplex(ModuliPoint((0.09, 0.16))) == 0.0

    def test_simplex_radial(self):
        assert v_ball_simplex(ModuliPoint((3.0, 2.0))) == pytest.approx(
            0.5 * math.log(5.0), abs=1e-14)

    def test_simplex_log_e(self):
        assert v_ball_simplex(ModuliPoint((math.e ** 2, 0.0))) == pytest.approx(1.0)

    def test_linf_corner(self):
        assert v_ball_linf_2d(ModuliPoint((1.0, 1.0))) == pytest.approx(LOG2, abs=1e-14)

    def test_linf_edge_case(self):
        # s1 = 0.25 <= 1/2 <= s2 = 0.81
        expect = 0.5 * (math.log(0.81) - math.log(0.75))
        assert v_ball_linf_2d(ModuliPoint((0.25, 0.81))) == pytest.approx(expect, abs=1e-12)
        assert expect == pytest.approx(0.03848, abs=1e-5)

    def test_linf_axis(self):
        for w in (1.5, 2.0, 7.0):
            assert v_ball_linf_2d(ModuliPoint((0.0, w * w))) == pytest.approx(
                math.log(w), abs=1e-14)

    def test_linf_symmetric_in_arguments(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            s1, s2 = rng.uniform(0.0, 4.0, 2)
            assert v_ball_linf_2d(ModuliPoint((s1, s2))) == pytest.approx(
                v_ball_linf_2d(ModuliPoint((s2, s1))), abs=1e-14)

    def test_linf_continuity_clamp(self):
        rng = np.random.default_rng(1)
        for _ in range(50):
            ray = rng.uniform(0.05, 1.0, 2)
            ray /= np.linalg.norm(ray)
            z = ray * (1.0 + 1e-7)
            assert 0.0 <= v_ball_linf_2d(ModuliPoint(tuple(z ** 2))) < 1e-6

    def test_linf_matches_box_grid_oracle(self):
        # dense maximization over the box boundary max(theta) = 1
        rng = np.random.default_rng(2)
        ts = np.linspace(1e-9, 1.0, 4000)
        for _ in range(40):
            s = rng.uniform(0.05, 4.0, 2)
            if s.sum() <= 1.0:
                continue
            p = ModuliPoint(tuple(s))
            best = max(
                max(f_value([1.0, t], p) for t in ts),
                max(f_value([t, 1.0], p) for t in ts),
            )
            got = v_ball_linf_2d(p)
            assert got == pytest.approx(max(best, 0.0), abs=1e-6)

    def test_linf_edge_dominates_corner_exactly_when_small(self):
        # edge-critical value minus corner value is -(1/2) log(4 s1 (1 - s1))
        rng = np.random.default_rng(3)
        for _ in range(200):
            s1 = rng.uniform(0.01, 0.49)
            s2 = rng.uniform(0.5, 4.0)
            edge = 0.5 * (math.log(s2) - math.log1p(-s1))
            corner = 0.5 * math.log(s1 * s2) + LOG2
            assert edge - corner == pytest.approx(
                -0.5 * math.log(4 * s1 * (1 - s1)), abs=1e-12)
            assert edge >= corner


class TestVBall:
    def test_hull_interior(self):
        res = v_ball(ConvexBody(2, 2), ModuliPoint((0.01, 0.04)))
        assert res.value == 0.0
        assert res.method == "hull_interior"

    def test_q1_log2(self):
        res = v_ball(ConvexBody(1, 2), ModuliPoint((4.0, 0.0)))
        assert res.value == pytest.approx(LOG2, abs=1e-14)

    @pytest.mark.parametrize("a", [1.5, 2.0, 3.0])
    def test_linf_axis_anchor(self, a):
        res = v_ball(ConvexBody(math.inf, 2), ModuliPoint((a * a, 0.0)))
        assert res.value == pytest.approx(math.log(a), abs=1e-10)

    def test_linf_ones_anchor(self):
        res = v_ball(ConvexBody(math.inf, 2), ModuliPoint((1.0, 1.0)))
        assert res.value == pytest.approx(LOG2, abs=1e-10)

    def test_q2_against_brute_force(self):
        s = np.array([1.3 ** 2, 0.9 ** 2])
        res = v_ball(ConvexBody(2, 2), ModuliPoint(tuple(s)))
        assert res.value == pytest.approx(brute_force_v_q2(s), abs=1e-6)

    def test_q1_numeric_matches_closed_form(self):
        rng = np.random.default_rng(4)
        for d in (2, 3):
            body = ConvexBody(1, d)
            for z in random_outside_points(rng, 50, d):
                p = ModuliPoint(tuple(z ** 2))
                num = v_ball(body, p, force_numeric=True).value
                assert num == pytest.approx(v_ball_simplex(p), abs=1e-8)

    def test_linf_numeric_matches_closed_form(self):
        rng = np.random.default_rng(5)
        body = ConvexBody(math.inf, 2)
        for z in random_outside_points(rng, 50):
            p = ModuliPoint(tuple(z ** 2))
            num = v_ball(body, p, force_numeric=True).value
            assert num == pytest.approx(v_ball_linf_2d(p), abs=1e-8)

    def test_monotone_in_q(self):
        rng = np.random.default_rng(6)
        qs = [1.0, 1.5, 2.0, 4.0, math.inf]
        for z in random_outside_points(rng, 25):
            p = ModuliPoint(tuple(z ** 2))
            vals = [v_ball(ConvexBody(q, 2), p).value for q in qs]
            for lo, hi in zip(vals, vals[1:]):
                assert lo <= hi + 1e-10

    @pytest.mark.parametrize("q", [1.0, 1.5, 2.0, 4.0, math.inf])
    def test_axis_agreement_across_q(self, q):
        for w in (1.2, 2.0, 2.9):
            res = v_ball(ConvexBody(q, 2), ModuliPoint((w * w, 0.0)))
            assert res.value == pytest.approx(math.log(w), abs=1e-10)

    @pytest.mark.parametrize("q", [1.5, 2.0, 4.0])
    def test_interior_maximizer(self, q):
        rng = np.random.default_rng(7)
        for z in random_outside_points(rng, 20):
            res = v_ball(ConvexBody(q, 2), ModuliPoint(tuple(z ** 2)))
            assert res.theta_star is not None
            assert np.min(res.theta_star) > 0

    @pytest.mark.parametrize("q", [1.5, 2.0, 4.0])
    def test_uniqueness_under_restarts(self, q):
        rng = np.random.default_rng(8)
        for z in random_outside_points(rng, 5):
            s = z ** 2
            ref, _, _, _ = _solve_kkt(q, s, 1e-10)
            for _ in range(10):
                theta0 = rng.uniform(0.05, 1.0, 2)
                got, _, _, _ = _solve_kkt(q, s, 1e-10, theta0=theta0)
                assert np.max(np.abs(got - ref)) < 1e-6

    def test_kkt_postcondition_and_multiplier(self):
        rng = np.random.default_rng(9)
        for q in (1.5, 2.0, 4.0):
            body = ConvexBody(q, 2)
            for z in random_outside_points(rng, 10):
                p = ModuliPoint(tuple(z ** 2))
                res = v_ball(body, p)
                assert res.kkt_residual <= 1e-10
                # multiplier equals the value: the residual definition itself
                assert kkt_residual(q, res.theta_star, p) <= 1e-10
                assert f_value(res.theta_star, p) == pytest.approx(res.value, abs=1e-12)

    def test_kkt_residual_positive_off_optimum(self):
        p = ModuliPoint((1.3 ** 2, 0.9 ** 2))
        assert kkt_residual(2.0, [0.9, 0.1], p) > 1e-3

    def test_kkt_residual_rejects_inf(self):
        with pytest.raises(ValueError):
            kkt_residual(math.inf, [1.0, 1.0], ModuliPoint((2.0, 2.0)))

    def test_linf_d3_box_solver(self):
        # coarse grid oracle over the box boundary in three variables
        body = ConvexBody(math.inf, 3)
        s = np.array([1.7, 2.4, 0.9])
        p = ModuliPoint(tuple(s))
        res = v_ball(body, p)
        grid = np.linspace(1e-6, 1.0, 60)
        best = -math.inf
        for i in range(3):
            for a in grid:
                for b in grid:
                    theta = np.insert(np.array([a, b]), i, 1.0)
                    best = max(best, f_value(theta, p))
        assert res.value >= best - 1e-9
        assert res.value == pytest.approx(best, abs=1e-3)

    def test_linf_d3_reduces_to_2d_on_axis(self):
        body = ConvexBody(math.inf, 3)
        res = v_ball(body, ModuliPoint((1.7, 2.4, 0.0)))
        assert res.value == pytest.approx(
            v_ball_linf_2d(ModuliPoint((1.7, 2.4))), abs=1e-12)

    def test_negligible_coordinate_is_dropped(self):
        body = ConvexBody(2, 2)
        tiny = v_ball(body, ModuliPoint((4.0, 1e-17))).value
        assert tiny == pytest.approx(LOG2, abs=1e-10)

    def test_convergence_error_carries_best_iterate(self):
        # one modulus 13 orders below the other: the stationarity system is
        # too ill-conditioned for a 1e-12 residual, but the best iterate's
        # value is still accurate
        body = ConvexBody(2, 2)
        p = ModuliPoint((4.0, 1e-13))
        with pytest.raises(ConvergenceError) as exc_info:
            v_ball(body, p, tol=1e-12)
        res = exc_info.value.result
        assert res is not None
        assert res.value == pytest.approx(LOG2, abs=1e-6)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            v_ball(ConvexBody(2, 2), ModuliPoint((4.0, 1.0, 1.0)))
        with pytest.raises(ValueError):
            v_ball(ConvexBody(2, 2), ModuliPoint((4.0, 1.0)), tol=0.0)


class TestTorusAndProducts:
    def test_h_p_examples(self):
        assert h_p(ConvexBody(1, 2), ModuliPoint.from_point((math.e ** 2, math.e))) \
            == pytest.approx(2.0, abs=1e-12)
        assert h_p(ConvexBody(math.inf, 2), ModuliPoint.from_point((math.e, math.e))) \
            == pytest.approx(2.0, abs=1e-12)
        assert h_p(ConvexBody(2, 2), ModuliPoint.from_point((math.e, 1 / math.e))) \
            == pytest.approx(1.0, abs=1e-12)

    def test_v_torus_examples(self):
        assert v_torus(ConvexBody(1, 2), ModuliPoint.from_point((2.0, 0.5))) \
            == pytest.approx(LOG2, abs=1e-12)
        assert v_torus(ConvexBody(math.inf, 2), ModuliPoint.from_point((2.0, 2.0))) \
            == pytest.approx(2 * LOG2, abs=1e-12)
        assert v_torus(ConvexBody(2, 2), ModuliPoint.from_point((math.e, math.e))) \
            == pytest.approx(math.sqrt(2.0), abs=1e-12)

    def test_v_torus_zero_inside(self):
        assert v_torus(ConvexBody(2, 2), ModuliPoint((0.25, 0.04))) == 0.0

    def test_product_of_disks_is_torus(self):
        rng = np.random.default_rng(10)
        disks = [UnivariateExtremal("unit_disk"), UnivariateExtremal("unit_disk")]
        for q in (1.0, 2.0, math.inf):
            body = ConvexBody(q, 2)
            for _ in range(20):
                w = rng.uniform(0.2, 3.0, 2)
                assert v_product(body, disks, w) == pytest.approx(
                    v_torus(body, ModuliPoint.from_point(w)), abs=1e-12)

    def test_interval_products(self):
        intervals = [UnivariateExtremal("interval"), UnivariateExtremal("interval")]
        joukowski2 = math.log(2 + math.sqrt(3.0))
        got = v_product(ConvexBody(1, 2), intervals, (2.0, 0.5))
        assert got == pytest.approx(joukowski2, abs=1e-12)
        got = v_product(ConvexBody(math.inf, 2), intervals, (2.0, 2.0))
        assert got == pytest.approx(2 * joukowski2, abs=1e-12)

    def test_interval_inside_is_zero(self):
        f = UnivariateExtremal("interval")
        assert f.value(0.3) == pytest.approx(0.0, abs=1e-12)
        assert f.value(-1.0) == pytest.approx(0.0, abs=1e-12)

    def test_product_dimension_mismatch(self):
        with pytest.raises(ValueError):
            v_product(ConvexBody(1, 2), [UnivariateExtremal("unit_disk")], (2.0,))


class TestMonomialBound:
    def test_q1_converges_to_log2(self):
        body = ConvexBody(1, 2)
        p = ModuliPoint((4.0, 0.0))
        e50 = abs(monomial_bound(body, p, 50) - LOG2)
        e200 = abs(monomial_bound(body, p, 200) - LOG2)
        assert e200 < 0.05
        assert e200 <= e50

    def test_linf_ones(self):
        body = ConvexBody(math.inf, 2)
        p = ModuliPoint((1.0, 1.0))
        assert abs(monomial_bound(body, p, 200) - LOG2) < 0.05

    @pytest.mark.parametrize("q", [1.0, 2.0, math.inf])
    def test_never_exceeds_v_ball(self, q):
        rng = np.random.default_rng(11)
        body = ConvexBody(q, 2)
        for z in random_outside_points(rng, 15):
            p = ModuliPoint(tuple(z ** 2))
            v = v_ball(body, p).value
            for n in (5, 20, 60):
                assert monomial_bound(body, p, n) <= v + 1e-9

    def test_nondecreasing_in_n(self):
        rng = np.random.default_rng(12)
        body = ConvexBody(2, 2)
        for z in random_outside_points(rng, 10):
            p = ModuliPoint(tuple(z ** 2))
            vals = [monomial_bound(body, p, n) for n in (2, 5, 10, 25, 60)]
            for lo, hi in zip(vals, vals[1:]):
                assert hi >= lo - 1e-12

    def test_rejects_hull_points(self):
        with pytest.raises(DomainError):
            monomial_bound(ConvexBody(2, 2), ModuliPoint((0.2, 0.2)), 10)

    def test_rejects_bad_n(self):
        with pytest.raises(ValueError):
            monomial_bound(ConvexBody(2, 2), ModuliPoint((4.0, 1.0)), 0)
