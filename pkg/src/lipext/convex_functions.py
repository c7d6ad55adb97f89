"""Expression trees for extended-real-valued convex functions.

Closed-form nodes (quadratic, max-affine, indicators, kappa, sums, scalings,
translations) evaluate exactly.  Conjugate, infimal convolution, and proximal
average evaluate by inner optimization over an explicit search box: a 5-per-
dimension coarse grid followed by a deterministic compass (pattern) search.
Every inner problem in this algebra is convex (or concave for suprema), so an
interior optimum is global; when the optimizer lands on the box boundary the
box is doubled twice, and sustained improvement is interpreted as divergence:
+inf for suprema, a box-exhaustion error for infima (a -inf value is never
returned silently).

Values are plain floats with math.inf standing for +infinity.
"""

import math
from dataclasses import dataclass
from itertools import product as _iterproduct

import numpy as np

from .geometry import Polytope, as_vector, dot
from .convex_sets import dimension_of, distance
from .errors import (
    BoxExhaustionError,
    DimensionMismatchError,
    ImproperFunctionError,
)
from .solvers import SolverConfig, minimize_quadratic_over_simplex, solve_qp

INF = math.inf

MEMBERSHIP_TOL = 1e-8
POLYHEDRAL_INFEASIBLE_TOL = 1e-6
DIVERGENCE_IMPROVEMENT = 1e-3


@dataclass(frozen=True)
class Box:
    """Axis-aligned search box [lo, hi] for inner optimization."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        lo = as_vector(self.lo)
        hi = as_vector(self.hi)
        if lo.shape != hi.shape or np.any(lo >= hi):
            raise ValueError("box must satisfy lo < hi componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def doubled(self) -> "Box":
        center = (self.lo + self.hi) / 2.0
        half = self.hi - center
        return Box(center - 2.0 * half, center + 2.0 * half)

    def grid(self, per_dim: int = 5) -> np.ndarray:
        axes = [np.linspace(self.lo[i], self.hi[i], per_dim) for i in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def cube(radius: float, dim: int) -> Box:
    """Convenience box [-radius, radius]^dim."""
    r = float(radius)
    return Box(np.full(dim, -r), np.full(dim, r))


@dataclass(frozen=True)
class Quadratic:
    """x -> 1/2 ||x||^2; self-conjugate."""

    dim: int


@dataclass(frozen=True)
class MaxAffine:
    """x -> max_i (<s_i, x> - o_i)."""

    slopes: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.slopes, dtype=float)
        o = np.asarray(self.offsets, dtype=float)
        if s.ndim != 2 or o.ndim != 1 or s.shape[0] != o.shape[0] or s.shape[0] < 1:
            raise ValueError("need matching (k, n) slopes and (k,) offsets")
        s.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "slopes", s)
        object.__setattr__(self, "offsets", o)

    @property
    def dim(self) -> int:
        return self.slopes.shape[1]


@dataclass(frozen=True)
class Indicator:
    """0 on the body, +inf outside (membership tested within 1e-8)."""

    body: object

    @property
    def dim(self) -> int:
        return dimension_of(self.body)


@dataclass(frozen=True)
class Kappa:
    """(x, y) -> 1/2 ||x - y||^2 on R^h x R^h."""

    half_dim: int

    @property
    def dim(self) -> int:
        return 2 * self.half_dim


@dataclass(frozen=True)
class Sum:
    children: tuple
    coefficients: tuple

    def __post_init__(self):
        children = tuple(self.children)
        coeffs = tuple(float(c) for c in self.coefficients)
        if len(children) != len(coeffs) or not children:
            raise ValueError("children and coefficients must match and be non-empty")
        if any(c < 0 for c in coeffs):
            raise ValueError("coefficients must be non-negative")
        dims = {c.dim for c in children}
        if len(dims) != 1:
            raise DimensionMismatchError("summands live in different dimensions")
        object.__setattr__(self, "children", children)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def dim(self) -> int:
        return self.children[0].dim


def _positive_factor(factor):
    f = float(factor)
    if not f > 0:
        raise ValueError(f"scaling factor must be positive, got {f}")
    return f


@dataclass(frozen=True)
class Scale:
    """lambda * f."""

    factor: float
    child: object

    def __post_init__(self):
        object.__setattr__(self, "factor", _positive_factor(self.factor))

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True)
class EpiScale:
    """Epi-multiplication (lambda * f)(x) = lambda f(x / lambda)."""

    factor: float
    child: object

    def __post_init__(self):
        object.__setattr__(self, "factor", _positive_factor(self.factor))

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True)
class Translate:
    """f(x) = child(x - shift) + <x, slope> + offset."""

    shift: np.ndarray
    slope: np.ndarray
    offset: float
    child: object

    def __post_init__(self):
        shift = as_vector(self.shift)
        slope = as_vector(self.slope)
        if shift.shape[0] != self.child.dim or slope.shape[0] != self.child.dim:
            raise DimensionMismatchError("translation data does not match child dim")
        shift.setflags(write=False)
        slope.setflags(write=False)
        object.__setattr__(self, "shift", shift)
        object.__setattr__(self, "slope", slope)
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True)
class Conjugate:
    """Numeric Fenchel conjugate: sup over the box of <x, y> - child(x)."""

    child: object
    box: Box

    def __post_init__(self):
        if self.box.dim != self.child.dim:
            raise DimensionMismatchError("box does not match child dimension")

    @property
    def dim(self) -> int:
        return self.child.dim


@dataclass(frozen=True)
class MaxAffineConjugate:
    """Exact polyhedral conjugate of a max-affine function.

    Value at y is min { sum_i l_i o_i : sum_i l_i s_i = y, l in simplex },
    +inf when y is outside conv(slopes).
    """

    slopes: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.slopes, dtype=float)
        o = np.asarray(self.offsets, dtype=float)
        s.setflags(write=False)
        o.setflags(write=False)
        object.__setattr__(self, "slopes", s)
        object.__setattr__(self, "offsets", o)

    @property
    def dim(self) -> int:
        return self.slopes.shape[1]


@dataclass(frozen=True)
class SupportFunction:
    """Exact conjugate of an indicator: y -> sup over the body of <x, y>."""

    body: object

    @property
    def dim(self) -> int:
        return dimension_of(self.body)


@dataclass(frozen=True)
class InfConv:
    """(f [] g)(x) = inf over the box in y of f(y) + g(x - y)."""

    left: object
    right: object
    box: Box

    def __post_init__(self):
        if self.left.dim != self.right.dim or self.box.dim != self.left.dim:
            raise DimensionMismatchError("convolution operands disagree in dimension")

    @property
    def dim(self) -> int:
        return self.left.dim


@dataclass(frozen=True)
class ProxAvg:
    """Proximal average: inf over y+z=x of (1/2*f)(y) + (1/2*g)(z) + 1/2||y-z||^2."""

    left: object
    right: object
    box: Box

    def __post_init__(self):
        if self.left.dim != self.right.dim or self.box.dim != self.left.dim:
            raise DimensionMismatchError("average operands disagree in dimension")

    @property
    def dim(self) -> int:
        return self.left.dim


class _Divergence(Exception):
    pass


def _compass_directions(d):
    if d <= 3:
        dirs = [np.array(v, dtype=float) for v in _iterproduct((-1, 0, 1), repeat=d)]
        return [v for v in dirs if np.any(v)]
    axes = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        axes.extend([e.copy(), -e])
    diags = [np.array(v, dtype=float) for v in _iterproduct((-1, 1), repeat=d)]
    return axes + diags


def _compass(fun, x0, f0, box, min_rel_step=1e-9):
    span = box.hi - box.lo
    dirs = _compass_directions(box.dim)
    x, fx = x0.copy(), f0
    s = 0.125
    while s > min_rel_step:
        moves = 0
        while moves < 200:
            improved = False
            for v in dirs:
                cand = np.clip(x + s * span * v, box.lo, box.hi)
                if np.array_equal(cand, x):
                    continue
                fc = fun(cand)
                if fc < fx:
                    x, fx = cand, fc
                    improved = True
                    moves += 1
                    break
            if not improved:
                break
        s *= 0.5
    return x, fx


def _grid_density(d):
    return 33 if d == 1 else (9 if d == 2 else 5)


def _box_minimize(fun, box, extra_points=()):
    """Grid + compass minimization over the box.

    extra_points are additional probe starts (e.g. the slope points of a
    polyhedral domain, which a coarse grid can miss entirely).  Returns
    (value, argmin, on_boundary) or (None, None, False) when the objective is
    +inf everywhere probed.
    """
    grid = box.grid(_grid_density(box.dim))
    if len(extra_points):
        grid = np.vstack([grid, np.asarray(extra_points, dtype=float)])
    vals = np.array([fun(p) for p in grid])
    finite = np.isfinite(vals)
    if not np.any(finite):
        return None, None, False
    order = np.argsort(vals, kind="stable")
    best_x, best_v = None, INF
    for idx in order[:2]:
        if not finite[idx]:
            continue
        x0 = np.clip(grid[idx], box.lo, box.hi)
        f0 = float(vals[idx]) if np.array_equal(x0, grid[idx]) else fun(x0)
        if not np.isfinite(f0):
            x0, f0 = grid[idx], float(vals[idx])  # probe outside the box
            x, v = x0, f0
        else:
            x, v = _compass(fun, x0, f0, box)
        if v < best_v:
            best_x, best_v = x, v
    margin = 1e-9 * (box.hi - box.lo)
    on_boundary = bool(
        np.any(best_x - box.lo <= margin) or np.any(box.hi - best_x <= margin)
    )
    return best_v, best_x, on_boundary


def _inner_minimize(fun, box, node_name, extra_points=()):
    """Minimize over the box with the doubling divergence protocol.

    Returns the minimum, None when the objective is +inf on every probed box,
    and raises _Divergence when two consecutive doublings keep improving the
    optimum by more than 1e-3.
    """
    v0, _, boundary = _box_minimize(fun, box, extra_points)
    if v0 is not None and not boundary:
        return v0
    b1 = box.doubled()
    v1, _, _ = _box_minimize(fun, b1, extra_points)
    b2 = b1.doubled()
    v2, _, _ = _box_minimize(fun, b2, extra_points)
    candidates = [v for v in (v0, v1, v2) if v is not None]
    if not candidates:
        return None
    if v1 is not None and v2 is not None:
        base = v0 if v0 is not None else v1
        if (base - v1) > DIVERGENCE_IMPROVEMENT and (v1 - v2) > DIVERGENCE_IMPROVEMENT:
            raise _Divergence(node_name)
    return min(candidates)


_MACONJ_CACHE: dict = {}
_MACONJ_PINNED: dict = {}


def _polyhedral_conjugate_value(node: MaxAffineConjugate, y, cfg) -> float:
    """min { o'l : S'l = y, l in simplex } via quadratic penalty escalation
    (3 rounds, weight x100) solved exactly per round, plus a support polish.

    Returns +inf when the equality system is infeasible beyond 1e-6.
    """
    key = (id(node), y.tobytes())
    cached = _MACONJ_CACHE.get(key)
    if cached is not None:
        return cached
    S = node.slopes
    o = node.offsets
    k = S.shape[0]
    SST = S @ S.T
    Sy = S @ y
    # Feasibility screen: distance from y to conv(slopes).
    feas = minimize_quadratic_over_simplex(
        2.0 * SST, -2.0 * Sy, k, cfg, constant=float(y @ y)
    )
    dist2 = max(feas.value, 0.0)
    if math.sqrt(dist2) > POLYHEDRAL_INFEASIBLE_TOL:
        value = INF
    else:
        lam = feas.argmin.weights.copy()
        A_eq = np.ones((1, k))
        G = -np.eye(k)
        h = np.zeros(k)
        rho = 1e8
        y_scale = 1.0 + float(np.max(np.abs(y)))
        for _ in range(3):
            P = 2.0 * rho * SST
            q = o - 2.0 * rho * Sy
            lam, _ = solve_qp(P, q, A_eq, [1.0], G, h, lam)
            np.clip(lam, 0.0, None, out=lam)
            lam /= lam.sum()
            if float(np.linalg.norm(S.T @ lam - y)) <= 1e-10 * y_scale:
                break  # already feasible to polish accuracy
            rho *= 100.0
        value = float(o @ lam)
        support = np.flatnonzero(lam > 1e-7)
        if support.size:
            # Exactly-feasible representative on the penalty support: on the
            # optimal face every feasible point shares the minimal value, so
            # this replaces the penalty's slightly infeasible estimate.
            A = np.vstack([S[support].T, np.ones((1, support.size))])
            rhs = np.concatenate([y, [1.0]])
            sol, *_ = np.linalg.lstsq(A, rhs, rcond=None)
            res = float(np.max(np.abs(A @ sol - rhs), initial=0.0))
            if res <= 1e-9 * (1.0 + float(np.max(np.abs(y)))) and np.min(sol) >= -1e-10:
                value = float(o[support] @ sol)
    if len(_MACONJ_CACHE) > 1 << 20:
        _MACONJ_CACHE.clear()
        _MACONJ_PINNED.clear()
    _MACONJ_CACHE[key] = value
    _MACONJ_PINNED[id(node)] = node
    return value


def eval(expr, x, cfg=None) -> float:  # noqa: A001 - module-level eval is the API
    """Evaluate an expression tree at x; +inf is a value, -inf is an error."""
    cfg = cfg or SolverConfig()
    x = as_vector(x)
    if x.shape[0] != expr.dim:
        raise DimensionMismatchError(
            f"point has dimension {x.shape[0]}, function expects {expr.dim}"
        )
    return _eval(expr, x, cfg)


def _eval(expr, x, cfg) -> float:
    if isinstance(expr, Quadratic):
        return 0.5 * float(x @ x)
    if isinstance(expr, MaxAffine):
        return float(np.max(expr.slopes @ x - expr.offsets))
    if isinstance(expr, Indicator):
        return 0.0 if distance(x, expr.body, cfg) <= MEMBERSHIP_TOL else INF
    if isinstance(expr, Kappa):
        h = expr.half_dim
        d = x[:h] - x[h:]
        return 0.5 * float(d @ d)
    if isinstance(expr, Sum):
        total = 0.0
        for coeff, child in zip(expr.coefficients, expr.children):
            if coeff == 0.0:
                continue
            v = _eval(child, x, cfg)
            if v == INF:
                return INF
            total += coeff * v
        return total
    if isinstance(expr, Scale):
        return expr.factor * _eval(expr.child, x, cfg)
    if isinstance(expr, EpiScale):
        return expr.factor * _eval(expr.child, x / expr.factor, cfg)
    if isinstance(expr, Translate):
        v = _eval(expr.child, x - expr.shift, cfg)
        if v == INF:
            return INF
        return v + dot(x, expr.slope) + expr.offset
    if isinstance(expr, MaxAffineConjugate):
        return _polyhedral_conjugate_value(expr, x, cfg)
    if isinstance(expr, SupportFunction):
        body = expr.body
        if hasattr(body, "radius"):  # Ball
            return float(body.center @ x) + body.radius * float(np.linalg.norm(x))
        return float(np.max(body.vertices @ x))
    if isinstance(expr, Conjugate):
        if isinstance(expr.child, MaxAffine):
            exact = MaxAffineConjugate(expr.child.slopes, expr.child.offsets)
            return _polyhedral_conjugate_value(exact, x, cfg)
        if isinstance(expr.child, Indicator):
            return _eval(SupportFunction(expr.child.body), x, cfg)
        child = expr.child
        y = x

        def neg_slope(z):
            return _eval(child, z, cfg) - float(z @ y)

        # Polyhedral children attain the supremum at a vertex of their
        # domain; probe the generating slopes so the grid cannot miss it.
        probes = child.slopes if isinstance(child, MaxAffineConjugate) else ()
        name = f"Conjugate({type(child).__name__})"
        try:
            m = _inner_minimize(neg_slope, expr.box, name, extra_points=probes)
        except _Divergence:
            return INF  # the supremum escapes every box: conjugate is +inf
        if m is None:
            raise ImproperFunctionError(
                name, f"child is +inf on the whole box; conjugate would be -inf"
            )
        return -m
    if isinstance(expr, InfConv):
        f, g = expr.left, expr.right
        # A single-point indicator is the shift element: f [] delta_p = f(. - p).
        for a, b in ((f, g), (g, f)):
            if (
                isinstance(a, Indicator)
                and isinstance(a.body, Polytope)
                and a.body.n_vertices == 1
            ):
                return _eval(b, x - a.body.vertices[0], cfg)

        def total(ylocal):
            a = _eval(f, ylocal, cfg)
            if a == INF:
                return INF
            b = _eval(g, x - ylocal, cfg)
            if b == INF:
                return INF
            return a + b

        name = f"InfConv({type(f).__name__},{type(g).__name__})"
        try:
            m = _inner_minimize(total, expr.box, name)
        except _Divergence:
            raise BoxExhaustionError(
                name, f"infimal convolution diverges to -inf in node {name}"
            )
        return INF if m is None else m
    if isinstance(expr, ProxAvg):
        f, g = expr.left, expr.right

        def total(ylocal):
            a = _eval(f, 2.0 * ylocal, cfg)
            if a == INF:
                return INF
            b = _eval(g, 2.0 * (x - ylocal), cfg)
            if b == INF:
                return INF
            d = 2.0 * ylocal - x
            return 0.5 * a + 0.5 * b + 0.5 * float(d @ d)

        name = f"ProxAvg({type(f).__name__},{type(g).__name__})"
        try:
            m = _inner_minimize(total, expr.box, name)
        except _Divergence:
            raise BoxExhaustionError(name)
        return INF if m is None else m
    raise TypeError(f"unknown expression node: {type(expr).__name__}")


def conjugate(f, box=None):
    """Conjugate node; exact evaluators for max-affine and indicator input,
    box-based supremum otherwise."""
    if isinstance(f, MaxAffine):
        return MaxAffineConjugate(f.slopes, f.offsets)
    if isinstance(f, Indicator):
        return SupportFunction(f.body)
    if box is None:
        raise ValueError("a search box is required for non-polyhedral conjugates")
    return Conjugate(f, box)


def inf_conv(f, g, box):
    return InfConv(f, g, box)


def prox_avg(f, g, box):
    return ProxAvg(f, g, box)


def scale_ops(f, factor, mode):
    """Scale (mode='mul', lambda*f) or epi-scale (mode='epi', lambda star f)."""
    if mode == "mul":
        return Scale(factor, f)
    if mode == "epi":
        return EpiScale(factor, f)
    raise ValueError(f"mode must be 'mul' or 'epi', got {mode!r}")


def _auto_dual_box(f_star, margin=1.0):
    if isinstance(f_star, MaxAffineConjugate):
        lo = f_star.slopes.min(axis=0) - margin
        hi = f_star.slopes.max(axis=0) + margin
        return Box(lo, hi)
    return None


def biconjugate_check(f, samples, cfg=None, primal_box=None, dual_box=None):
    """max |f**(x) - f(x)| over the samples; samples must be in dom f."""
    cfg = cfg or SolverConfig()
    f_star = conjugate(f, primal_box)
    if dual_box is None:
        dual_box = _auto_dual_box(f_star)
    if dual_box is None:
        raise ValueError("dual_box is required when f* is not polyhedral")
    f_star_star = Conjugate(f_star, dual_box)
    worst = 0.0
    for s in samples:
        s = as_vector(s)
        fv = eval(f, s, cfg)
        if fv == INF:
            raise ValueError(f"sample {s} is outside dom f")
        worst = max(worst, abs(eval(f_star_star, s, cfg) - fv))
    return worst


def delta_expr(a, b):
    """The coupled quadratic delta(x, y) = 1/2||(a-x, b-y)||^2 - <x, y> built
    from a translated 2n-dimensional quadratic."""
    a = as_vector(a)
    b = as_vector(b)
    if a.shape != b.shape:
        raise DimensionMismatchError("a and b must share a dimension")
    n = a.shape[0]
    shift = np.concatenate([a, b])
    slope = -np.concatenate([b, a])
    return Translate(shift, slope, float(a @ b), Quadratic(2 * n))


def delta_conjugate_identity_check(a, b, samples, cfg=None, box=None):
    """max gap of delta*(x*, y*) = delta(-y*, -x*) over sampled (x*, y*)."""
    cfg = cfg or SolverConfig()
    a = as_vector(a)
    b = as_vector(b)
    n = a.shape[0]
    samples = [as_vector(s) for s in samples]
    if box is None:
        # delta is quadratic, so the conjugate's argmax is s + (a+b, a+b)
        # up to coordinate pairing; cover those points with slack.
        targets = np.array([s for s in samples])
        reach = float(np.max(np.abs(targets))) + float(np.max(np.abs(a))) + float(
            np.max(np.abs(b))
        )
        box = cube(reach + 3.0, 2 * n)
    d = delta_expr(a, b)
    d_star = Conjugate(d, box)
    worst = 0.0
    for s in samples:
        xs, ys = s[:n], s[n:]
        lhs = eval(d_star, s, cfg)
        rhs = eval(d, np.concatenate([-ys, -xs]), cfg)
        worst = max(worst, abs(lhs - rhs))
    return worst


def fenchel_duality_solve(f, neg_g, box, cfg=None):
    """Fenchel duality for convex f and concave g supplied as neg_g = -g.

    primal = inf over the box of f - g; dual = max over the box of g* - f*
    with g*(y) = inf_x (<x, y> - g(x)).  Returns (primal, dual, gap).
    """
    cfg = cfg or SolverConfig()
    if f.dim != neg_g.dim or box.dim != f.dim:
        raise DimensionMismatchError("operands disagree in dimension")

    def primal_obj(z):
        a = _eval(f, z, cfg)
        if a == INF:
            return INF
        b = _eval(neg_g, z, cfg)
        return INF if b == INF else a + b

    try:
        primal = _inner_minimize(primal_obj, box, "FenchelPrimal")
    except _Divergence:
        raise BoxExhaustionError("FenchelPrimal")
    if primal is None:
        primal = INF

    f_star = conjugate(f, box)

    def g_star(y):
        def h(z):
            b = _eval(neg_g, z, cfg)
            return INF if b == INF else float(z @ y) + b

        try:
            m = _inner_minimize(h, box, "ConcaveConjugate")
        except _Divergence:
            return -INF  # the concave conjugate is -inf outside its domain
        return -INF if m is None else m

    def dual_neg(y):
        fs = _eval(f_star, y, cfg)
        if fs == INF:
            return INF
        gs = g_star(y)
        if gs == -INF:
            return INF
        return fs - gs

    # Polyhedral operands pin the dual domain: probe their slope points,
    # which a coarse grid over the box may miss (affine g has a point domain).
    probes = []
    if isinstance(f, MaxAffine):
        probes.extend(f.slopes)
    if isinstance(neg_g, MaxAffine):
        probes.extend(-neg_g.slopes)
    try:
        m = _inner_minimize(dual_neg, box, "FenchelDual", extra_points=probes)
    except _Divergence:
        raise BoxExhaustionError("FenchelDual")
    dual = -m if m is not None else -INF
    return primal, dual, primal - dual


def fenchel_young_check(f, pairs, cfg=None, box=None):
    """min over sampled (x, x*) of f(x) + f*(x*) - <x, x*>; must be >= -1e-6."""
    cfg = cfg or SolverConfig()
    f_star = conjugate(f, box)
    worst = INF
    for x, xs in pairs:
        x = as_vector(x)
        xs = as_vector(xs)
        fv = eval(f, x, cfg)
        fsv = eval(f_star, xs, cfg)
        if fv == INF or fsv == INF:
            continue
        worst = min(worst, fv + fsv - dot(x, xs))
    return worst
