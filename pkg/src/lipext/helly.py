"""Intersection checking for finite families of convex bodies and Jung's bound.

common_point minimizes d(x) = max_i distance(x, C_i) -- a convex,
non-expansive function -- by subgradient descent with Polyak steps (target 0
first, then a halving estimate of the optimal value when the family turns out
not to intersect).  For families of balls in dimension <= 2 the k-subset
checks instead use an exact candidate-point certificate: any non-empty
intersection of discs contains a disc center or an intersection point of two
boundary circles.
"""

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .geometry import Ball
from .errors import EnumerationGuardError
from .rng import SplitMix64
from .solvers import SolverConfig, minimize_quadratic_over_simplex
from .convex_sets import dimension_of, distance, project

INTERSECT_TOL = 1e-6
ENUMERATION_CAP = 10 ** 6


@dataclass(frozen=True)
class BodyFamily:
    bodies: tuple

    def __post_init__(self):
        bodies = tuple(self.bodies)
        if not bodies:
            raise ValueError("family must be non-empty")
        dims = {dimension_of(b) for b in bodies}
        if len(dims) != 1:
            raise ValueError(f"mixed ambient dimensions: {sorted(dims)}")
        object.__setattr__(self, "bodies", bodies)

    @property
    def dimension(self) -> int:
        return dimension_of(self.bodies[0])

    def __len__(self) -> int:
        return len(self.bodies)


@dataclass(frozen=True)
class IntersectionReport:
    intersects: bool
    witness: object
    residual: float
    violating_subset: object = None


def _body_anchor(body):
    if isinstance(body, Ball):
        return body.center
    return body.vertices.mean(axis=0)


def _max_distance_oracle(bodies, cfg):
    def oracle(x):
        dists = [distance(x, b, cfg) for b in bodies]
        i = int(np.argmax(dists))
        di = dists[i]
        if di <= 0.0:
            return 0.0, np.zeros_like(x)
        g = (x - project(x, bodies[i], cfg)) / di
        return di, g

    return oracle


def common_point(family: BodyFamily, cfg=None) -> IntersectionReport:
    """Minimize d(x) = max_i distance(x, C_i); witness when the minimum is ~0.

    Initialized at the centroid of the bodies' centers / vertex centroids.
    intersects is declared when the final value is <= 1e-6.
    """
    cfg = cfg or SolverConfig()
    bodies = family.bodies
    oracle = _max_distance_oracle(bodies, cfg)
    x = np.mean([_body_anchor(b) for b in bodies], axis=0)
    f, g = oracle(x)
    best_x, best_f = x.copy(), f
    stop = min(cfg.tol, 1e-7)
    iters = 0
    cap1 = min(cfg.max_iters, 4000)
    # Phase 1: Polyak steps with target 0 (exact when the family intersects).
    while best_f > stop and iters < cap1:
        ng2 = float(g @ g)
        if ng2 < 1e-28:
            break
        x = x - (f / ng2) * g
        f, g = oracle(x)
        if f < best_f:
            best_f, best_x = f, x.copy()
        iters += 1
    # Phase 2: halving target estimates to localize a positive minimum.
    if best_f > INTERSECT_TOL:
        delta = best_f / 2.0
        x = best_x.copy()
        f, g = oracle(x)
        while delta > 1e-9 and iters < cfg.max_iters:
            target = max(best_f - delta, 0.0)
            improved = False
            for _ in range(150):
                ng2 = float(g @ g)
                if ng2 < 1e-28 or f <= target:
                    break
                x = x - ((f - target) / ng2) * g
                f, g = oracle(x)
                iters += 1
                if f < best_f - 0.25 * delta:
                    best_f, best_x = f, x.copy()
                    improved = True
                    break
                if f < best_f:
                    best_f, best_x = f, x.copy()
            if not improved:
                delta /= 2.0
                x = best_x.copy()
                f, g = oracle(x)
    return IntersectionReport(
        intersects=best_f <= INTERSECT_TOL,
        witness=best_x if best_f <= INTERSECT_TOL else best_x,
        residual=best_f,
    )


def _circle_pair_points(c1, r1, c2, r2):
    """Intersection points of two boundary circles in the plane (0, 1, or 2)."""
    delta = c2 - c1
    d = float(np.linalg.norm(delta))
    if d < 1e-15:
        return []
    a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d)
    h2 = r1 * r1 - a * a
    if h2 < -1e-12:
        return []
    h = math.sqrt(max(h2, 0.0))
    base = c1 + (a / d) * delta
    perp = np.array([-delta[1], delta[0]]) / d
    if h == 0.0:
        return [base]
    return [base + h * perp, base - h * perp]


class _BallCandidates:
    """Exact k-subset intersection tests for discs in the plane.

    Candidates are all centers and all pairwise boundary intersection points;
    a subset of discs intersects iff some candidate drawn from the subset's
    own centers and pairs lies in every disc of the subset.
    """

    def __init__(self, balls):
        self.balls = balls
        k = len(balls)
        centers = np.array([b.center for b in balls])
        radii = np.array([b.radius for b in balls])
        pts = [centers[i] for i in range(k)]
        self.center_cand = list(range(k))
        self.pair_cand = {}
        for i, j in combinations(range(k), 2):
            idxs = []
            for p in _circle_pair_points(centers[i], radii[i], centers[j], radii[j]):
                idxs.append(len(pts))
                pts.append(p)
            self.pair_cand[(i, j)] = idxs
        P = np.array(pts)
        # depth[c, b] = clamped distance of candidate c to ball b
        diff = P[:, None, :] - centers[None, :, :]
        self.depth = np.clip(
            np.sqrt(np.sum(diff * diff, axis=2)) - radii[None, :], 0.0, None
        )
        self.points = P

    def subset_report(self, subset):
        rows = [self.center_cand[i] for i in subset]
        for i, j in combinations(sorted(subset), 2):
            rows.extend(self.pair_cand[(i, j)])
        sub = self.depth[np.asarray(rows)][:, np.asarray(subset)]
        vals = sub.max(axis=1)
        best = int(np.argmin(vals))
        residual = float(vals[best])
        return IntersectionReport(
            intersects=residual <= INTERSECT_TOL,
            witness=self.points[rows[best]].copy(),
            residual=residual,
        )


def _interval_report(balls, subset):
    lo = max(balls[i].center[0] - balls[i].radius for i in subset)
    hi = min(balls[i].center[0] + balls[i].radius for i in subset)
    mid = np.array([(lo + hi) / 2.0])
    residual = max((lo - hi) / 2.0, 0.0)
    return IntersectionReport(
        intersects=residual <= INTERSECT_TOL, witness=mid, residual=residual
    )


def check_k_intersection(family: BodyFamily, k: int, cfg=None) -> IntersectionReport:
    """Check every k-subset (lexicographic order), stopping at the first violation.

    On success the report carries intersects=True, no witness (a passing
    k-check does not exhibit a global common point), and the worst subset
    residual.  Rejects instances with more than 10^6 subsets.
    """
    cfg = cfg or SolverConfig()
    if k < 1:
        raise ValueError("k must be >= 1")
    m = len(family)
    k = min(k, m)
    if math.comb(m, k) > ENUMERATION_CAP:
        raise EnumerationGuardError(
            f"C({m}, {k}) = {math.comb(m, k)} exceeds the 10^6 subset budget"
        )
    all_balls = all(isinstance(b, Ball) for b in family.bodies)
    n = family.dimension
    cand = None
    if all_balls and n == 2:
        cand = _BallCandidates(family.bodies)
    worst = 0.0
    for subset in combinations(range(m), k):
        if cand is not None:
            rep = cand.subset_report(subset)
        elif all_balls and n == 1:
            rep = _interval_report(family.bodies, subset)
        else:
            rep = common_point(BodyFamily([family.bodies[i] for i in subset]), cfg)
        if not rep.intersects:
            return IntersectionReport(
                intersects=False,
                witness=None,
                residual=rep.residual,
                violating_subset=list(subset),
            )
        worst = max(worst, rep.residual)
    return IntersectionReport(intersects=True, witness=None, residual=worst)


def helly_verify(family: BodyFamily, cfg=None) -> IntersectionReport:
    """If every (n+1)-subset intersects, produce a global witness.

    Runs check_k_intersection(n+1) and, on success, common_point for the whole
    family; by Helly's theorem for closed bounded convex sets the global
    search must succeed.
    """
    cfg = cfg or SolverConfig()
    k = family.dimension + 1
    sub = check_k_intersection(family, k, cfg)
    if not sub.intersects:
        return sub
    return common_point(family, cfg)


def _ball_from_support(support, n):
    if len(support) == 0:
        return np.zeros(n), 0.0
    S = np.array(support)
    if S.shape[0] == 1:
        return S[0].copy(), 0.0
    D = S[1:] - S[0]
    rhs = np.sum(D * D, axis=1)
    beta, *_ = np.linalg.lstsq(2.0 * (D @ D.T), rhs, rcond=None)
    center = S[0] + beta @ D
    radius = float(np.max(np.linalg.norm(S - center, axis=1)))
    return center, radius


def _welzl(pts, n, rng):
    order = rng.shuffle(list(range(len(pts))))

    def inside(p, c, r):
        return float(np.linalg.norm(p - c)) <= r + 1e-10 * (1.0 + r)

    def rec(count, support):
        if count == 0 or len(support) == n + 1:
            return _ball_from_support(support, n)
        p = pts[order[count - 1]]
        c, r = rec(count - 1, support)
        if inside(p, c, r):
            return c, r
        return rec(count - 1, support + [p])

    return rec(len(pts), [])


def _meb_dual(pts, cfg):
    P = np.asarray(pts)
    Q = 2.0 * (P @ P.T)
    c = -np.sum(P * P, axis=1)
    report = minimize_quadratic_over_simplex(Q, c, P.shape[0], cfg)
    center = report.argmin.weights @ P
    radius = float(np.max(np.linalg.norm(P - center, axis=1)))
    return center, radius


def jung_ball(points, cfg=None) -> Ball:
    """Minimal enclosing ball: Welzl's algorithm (exact for n <= 3), with the
    concave dual over the simplex as the fallback in higher dimensions."""
    cfg = cfg or SolverConfig()
    pts = [np.asarray(p, dtype=float) for p in points]
    if not pts:
        raise ValueError("need at least one point")
    n = pts[0].shape[0]
    uniq = []
    seen = set()
    for p in pts:
        key = p.tobytes()
        if key not in seen:
            seen.add(key)
            uniq.append(p)
    if len(uniq) == 1:
        return Ball(uniq[0], 0.0)
    if n > 3:
        center, radius = _meb_dual(uniq, cfg)
    else:
        center, radius = _welzl(uniq, n, SplitMix64(cfg.seed))
        cover = float(np.max(np.linalg.norm(np.array(uniq) - center, axis=1)))
        if cover > radius + 1e-9:
            center, radius = _meb_dual(uniq, cfg)  # degenerate support rescue
    return Ball(center, radius)


def jung_bound_check(points, cfg=None):
    """Return (diameter, radius, bound, holds) for Jung's enclosing-ball bound
    radius <= diameter * sqrt(n / (2(n+1)))."""
    pts = np.asarray([np.asarray(p, dtype=float) for p in points])
    if pts.shape[0] < 2:
        raise ValueError("need at least two points")
    n = pts.shape[1]
    diff = pts[:, None, :] - pts[None, :, :]
    diameter = float(np.sqrt(np.max(np.sum(diff * diff, axis=2))))
    radius = jung_ball(pts, cfg).radius
    bound = diameter * math.sqrt(n / (2.0 * (n + 1)))
    return diameter, radius, bound, radius <= bound + 1e-9
