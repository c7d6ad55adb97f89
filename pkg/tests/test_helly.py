import math

import numpy as np
import pytest

from lipext.errors import EnumerationGuardError
from lipext.geometry import Ball, Polytope
from lipext.rng import SplitMix64
from lipext.solvers import SolverConfig
from lipext.helly import (
    BodyFamily,
    check_k_intersection,
    common_point,
    helly_verify,
    jung_ball,
    jung_bound_check,
)
from lipext.helly import _meb_dual, _welzl

CFG = SolverConfig()


def grid_min_max_distance(family, lo, hi, steps=200):
    """Brute-force oracle: min over a grid of max_i distance(x, C_i)."""
    xs = np.linspace(lo[0], hi[0], steps)
    ys = np.linspace(lo[1], hi[1], steps)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    worst = np.full(X.shape, -np.inf)
    for b in family.bodies:
        d = np.sqrt((X - b.center[0]) ** 2 + (Y - b.center[1]) ** 2) - b.radius
        worst = np.maximum(worst, np.clip(d, 0.0, None))
    return float(worst.min())


class TestCommonPoint:
    def test_four_balls_share_origin(self):
        balls = [
            Ball([sx * 0.5, sy * 0.5], 1.0) for sx in (-1, 1) for sy in (-1, 1)
        ]
        rep = common_point(BodyFamily(balls), CFG)
        assert rep.intersects
        assert rep.residual <= 1e-6
        assert np.linalg.norm(np.asarray(rep.witness)) <= 0.5

    def test_two_disjoint_balls(self):
        fam = BodyFamily([Ball([0.0, 0.0], 1.0), Ball([4.0, 0.0], 1.0)])
        rep = common_point(fam, CFG)
        assert not rep.intersects
        # the max distance is minimized at the midpoint with value 1
        assert rep.residual == pytest.approx(1.0, abs=0.05)

    def test_single_body(self):
        rep = common_point(BodyFamily([Ball([1.0, 2.0], 0.5)]), CFG)
        assert rep.intersects and rep.residual == 0.0

    def test_polytope_family(self):
        fam = BodyFamily(
            [
                Polytope([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]]),
                Polytope([[1.0, 1.0], [3.0, 1.0], [1.0, 3.0]]),
                Ball([1.0, 1.0], 0.5),
            ]
        )
        rep = common_point(fam, CFG)
        assert rep.intersects


class TestKIntersection:
    def test_empty_pair_propagates(self):
        balls = [
            Ball([0.0, 0.0], 1.0),
            Ball([4.0, 0.0], 1.0),
            Ball([0.5, 0.5], 2.0),
        ]
        rep = check_k_intersection(BodyFamily(balls), 2, CFG)
        assert not rep.intersects
        assert rep.violating_subset == [0, 1]

    def test_pairwise_but_no_triple(self):
        # classic: three long thin rectangles-as-segments pattern with balls:
        # pairwise intersecting, empty triple
        balls = [
            Ball([0.0, 0.0], 1.05),
            Ball([2.0, 0.0], 1.05),
            Ball([1.0, 1.732], 1.05),
        ]
        fam = BodyFamily(balls)
        pair = check_k_intersection(fam, 2, CFG)
        assert pair.intersects
        triple = check_k_intersection(fam, 3, CFG)
        assert not triple.intersects
        assert triple.violating_subset == [0, 1, 2]

    def test_k1_on_nonempty_bodies(self):
        fam = BodyFamily([Ball([0.0, 0.0], 0.1), Ball([9.0, 9.0], 0.1)])
        rep = check_k_intersection(fam, 1, CFG)
        assert rep.intersects

    def test_triple_with_common_point(self):
        balls = [Ball([0.3, 0.0], 1.0), Ball([-0.3, 0.2], 1.0), Ball([0.0, -0.4], 1.0)]
        rep = check_k_intersection(BodyFamily(balls), 3, CFG)
        assert rep.intersects

    def test_enumeration_guard(self):
        balls = [Ball([float(i), 0.0], 50.0) for i in range(60)]
        with pytest.raises(EnumerationGuardError):
            check_k_intersection(BodyFamily(balls), 30, CFG)


class TestHellyVerify:
    def test_four_balls(self):
        balls = [
            Ball([sx * 0.5, sy * 0.5], 1.0) for sx in (-1, 1) for sy in (-1, 1)
        ]
        rep = helly_verify(BodyFamily(balls), CFG)
        assert rep.intersects and rep.residual <= 1e-6

    def test_intervals_on_line(self):
        # pairwise-overlapping intervals intersect globally (Helly n=1)
        ivals = [(0.0, 2.0), (1.0, 3.0), (1.5, 4.0), (-1.0, 1.6)]
        fam = BodyFamily(
            [Ball([0.5 * (a + b)], 0.5 * (b - a)) for a, b in ivals]
        )
        rep = helly_verify(fam, CFG)
        lo = max(a for a, _ in ivals)
        hi = min(b for _, b in ivals)
        assert rep.intersects
        assert lo - 1e-9 <= rep.witness[0] <= hi + 1e-9

    def test_random_families_never_refute_helly(self):
        rng = SplitMix64(101)
        for trial in range(100):
            n = 1 if trial % 2 == 0 else 2
            count = 3 + rng.integer(6)
            core = np.array([rng.uniform(-1, 1) for _ in range(n)])
            balls = []
            for _ in range(count):
                radius = rng.uniform(0.4, 1.5)
                center = core + np.array(
                    [rng.uniform(-1, 1) for _ in range(n)]
                ) * (radius - 0.2) / math.sqrt(n)
                balls.append(Ball(center, radius))
            fam = BodyFamily(balls)
            sub = check_k_intersection(fam, n + 1, CFG)
            if sub.intersects:
                rep = common_point(fam, CFG)
                assert rep.residual <= 1e-6


class TestJung:
    def test_single_point(self):
        ball = jung_ball([np.array([1.0, 2.0])], CFG)
        assert ball.radius == 0.0

    def test_two_points(self):
        ball = jung_ball([np.array([0.0, 0.0]), np.array([2.0, 0.0])], CFG)
        assert np.allclose(ball.center, [1.0, 0.0], atol=1e-12)
        assert ball.radius == pytest.approx(1.0, abs=1e-12)

    def test_equilateral_triangle_attains_bound(self):
        pts = [
            np.array([0.0, 0.0]),
            np.array([1.0, 0.0]),
            np.array([0.5, math.sqrt(3.0) / 2.0]),
        ]
        diameter, radius, bound, holds = jung_bound_check(pts, CFG)
        assert holds
        assert diameter == pytest.approx(1.0, abs=1e-12)
        assert radius == pytest.approx(1.0 / math.sqrt(3.0), abs=1e-9)
        assert bound == pytest.approx(math.sqrt(2.0 / 6.0), abs=1e-12)
        assert abs(radius - bound) <= 1e-6  # equality case in the plane

    def test_random_sets_hold_bound_and_cover(self):
        rng = SplitMix64(55)
        for _ in range(30):
            pts = [
                np.array([rng.uniform(0, 1), rng.uniform(0, 1)]) for _ in range(20)
            ]
            ball = jung_ball(pts, CFG)
            dists = [float(np.linalg.norm(p - ball.center)) for p in pts]
            assert max(dists) <= ball.radius + 1e-9
            _, _, _, holds = jung_bound_check(pts, CFG)
            assert holds

    def test_welzl_matches_dual(self):
        rng = SplitMix64(77)
        for _ in range(15):
            pts = [
                np.array([rng.uniform(-1, 1) for _ in range(3)]) for _ in range(12)
            ]
            cw, rw = _welzl(pts, 3, SplitMix64(0))
            cd, rd = _meb_dual(pts, CFG)
            assert rw == pytest.approx(rd, abs=1e-7)

    def test_dimension_fallback(self):
        rng = SplitMix64(88)
        pts = [np.array([rng.uniform(-1, 1) for _ in range(5)]) for _ in range(15)]
        ball = jung_ball(pts, CFG)
        dists = [float(np.linalg.norm(p - ball.center)) for p in pts]
        assert max(dists) <= ball.radius + 1e-9


def test_max_distance_is_nonexpansive():
    rng = SplitMix64(60)
    fam = BodyFamily([Ball([0.0, 0.0], 1.0), Ball([2.0, 1.0], 0.5)])

    def d(x):
        return max(
            max(0.0, float(np.linalg.norm(x - b.center)) - b.radius)
            for b in fam.bodies
        )

    for _ in range(50):
        x = np.array([rng.uniform(-3, 3), rng.uniform(-3, 3)])
        y = np.array([rng.uniform(-3, 3), rng.uniform(-3, 3)])
        assert abs(d(x) - d(y)) <= float(np.linalg.norm(x - y)) + 1e-10
