"""Lipschitz and uniformly continuous extension of finite map data.

Two independent routes extend L-Lipschitz data {(a_i, b_i)} in R^m -> R^n to
any query point:

* extend_minimax solves, per query x, the ball-intersection problem
  "find y with ||y - b_i|| <= L ||x - a_i|| for all i" through its concave
  dual over the simplex (maximize sum l_i (||b_i||^2 - L^2 ||x - a_i||^2)
  - ||sum l_i b_i||^2, recover y = sum l_i b_i), which is guaranteed
  feasible for consistent data.
* extend_proxavg runs the firmly-non-expansive pipeline: zero-pad to a square
  dimension, rescale to a non-expansive map, pass to g = (id + f)/2, read off
  the monotone graph T = g^{-1} - id, and evaluate the resolvent of the
  maximal monotone extension of T per query; y = L (2 G(x) - x), un-padded.

Scalar data additionally supports McShane-Whitney envelopes with a general
modulus of continuity, the Riesz/Tietze continuous extension, and the
empirical-modulus pipeline (concave majorant + envelope) for uniformly
continuous data.  extend_coordinatewise applies the scalar envelope per
output coordinate, giving the classical sqrt(n) L baseline.
"""

from dataclasses import dataclass, field

import numpy as np

from .geometry import as_vector
from .errors import (
    DataConsistencyError,
    DimensionMismatchError,
    ModulusViolationError,
)
from .solvers import SolverConfig, minimize_quadratic_over_simplex
from .convex_sets import distance, project
from .monotone import OperatorGraph, graph_of_resolvent, resolvent_eval

DUPLICATE_TOL = 1e-9
LIPSCHITZ_SLACK = 1e-9


def _pairwise_lipschitz(points, values, L):
    """Worst violating pair of ||db|| <= L ||da|| + slack, or None."""
    k = points.shape[0]
    for i in range(k):
        da = np.linalg.norm(points[i] - points[i + 1 :], axis=1)
        db = np.linalg.norm(values[i] - values[i + 1 :], axis=1)
        bad = db > L * da + LIPSCHITZ_SLACK
        if np.any(bad):
            j = int(np.argmax(bad))
            return (i, i + 1 + j, float(da[j]), float(db[j]))
    return None


@dataclass(frozen=True)
class FiniteMapData:
    """Finite L-Lipschitz sample {(a_i, b_i)} with a_i in R^m, b_i in R^n.

    L may be supplied (and is then verified against every pair, slack 1e-9)
    or omitted to be computed as the empirical constant.
    """

    points: np.ndarray
    values: np.ndarray
    L: float = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        if pts.ndim != 2 or vals.ndim != 2 or pts.shape[0] != vals.shape[0]:
            raise ValueError("points and values must be matching (k, dim) arrays")
        if pts.shape[0] < 1:
            raise ValueError("need at least one data point")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(vals))):
            raise ValueError("data has non-finite entries")
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        k = pts.shape[0]
        for i in range(k):
            dup = np.linalg.norm(pts[i] - pts[i + 1 :], axis=1) <= 1e-12
            if np.any(dup):
                diffs = np.linalg.norm(vals[i] - vals[i + 1 :], axis=1)
                bad = dup & (diffs > DUPLICATE_TOL)
                if np.any(bad):
                    j = i + 1 + int(np.argmax(bad))
                    raise DataConsistencyError(
                        f"duplicate points {i} and {j} carry different values",
                        witness=(i, j),
                    )
        if self.L is None:
            object.__setattr__(self, "L", _constant(pts, vals))
        else:
            object.__setattr__(self, "L", float(self.L))
            if self.L < 0:
                raise ValueError("L must be >= 0")
            witness = _pairwise_lipschitz(pts, vals, self.L)
            if witness is not None:
                i, j, da, db = witness
                raise DataConsistencyError(
                    f"data is not {self.L}-Lipschitz: pair ({i}, {j}) has "
                    f"||db|| = {db:.6g} > L ||da|| = {self.L * da:.6g}",
                    witness=(i, j),
                )

    @property
    def m(self) -> int:
        return self.points.shape[1]

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]


def _constant(points, values) -> float:
    k = points.shape[0]
    best = 0.0
    for i in range(k):
        da = np.linalg.norm(points[i] - points[i + 1 :], axis=1)
        db = np.linalg.norm(values[i] - values[i + 1 :], axis=1)
        dup = da <= 1e-12
        if np.any(dup & (db > DUPLICATE_TOL)):
            j = i + 1 + int(np.argmax(dup & (db > DUPLICATE_TOL)))
            raise DataConsistencyError(
                f"duplicate points {i} and {j} carry different values",
                witness=(i, j),
            )
        live = ~dup
        if np.any(live):
            best = max(best, float(np.max(db[live] / da[live])))
    return best


def lipschitz_constant(data: FiniteMapData) -> float:
    """Empirical constant max ||b_i - b_j|| / ||a_i - a_j|| (0 for one point)."""
    return _constant(data.points, data.values)


def extend_minimax(data: FiniteMapData, x, cfg=None):
    """One-point extension to the Chebyshev center of the constraint balls.

    The value is the minimizer of max_i (||y - b_i|| - L ||x - a_i||), i.e.
    the center of the deepest point of the intersection of the balls
    B(b_i, L ||x - a_i||).  This selection interpolates the data, always has
    residual <= 0 up to solver error (the intersection is non-empty for
    consistent data), and -- unlike the argmin of the squared violations --
    is a non-expansive function of the query.

    Computed by safeguarded Newton root-finding on the concave value function
    phi(t) = min_y max_i (||y - b_i||^2 - (r_i + t)^2), each evaluation being
    one concave dual over the simplex (maximize sum l_i (||b_i||^2 -
    (r_i+t)^2) - ||sum l_i b_i||^2, recover y = sum l_i b_i); phi(t*) = 0 at
    the Chebyshev value t*, with phi'(t) = -2 sum l_i (r_i + t) read off the
    dual weights.

    Returns (y, residual) with residual = max_i (||y - b_i|| - L ||x - a_i||).
    """
    cfg = cfg or SolverConfig()
    x = as_vector(x)
    if x.shape[0] != data.m:
        raise DimensionMismatchError("query dimension does not match the data")
    A, B, L = data.points, data.values, data.L
    exact = np.flatnonzero(np.linalg.norm(A - x, axis=1) == 0.0)
    if exact.size:
        return B[exact[0]].copy(), 0.0
    radii = L * np.linalg.norm(A - x, axis=1)
    if data.size == 1:
        return B[0].copy(), 0.0
    Q = 2.0 * (B @ B.T)
    sq_norms = np.sum(B * B, axis=1)
    scale = 1.0 + float(np.max(radii) ** 2) + float(np.max(np.abs(sq_norms)))
    inner_cfg = SolverConfig(tol=min(cfg.tol, 1e-11), max_iters=cfg.max_iters,
                             seed=cfg.seed)

    def dual_solve(t):
        infl = radii + t
        gains = sq_norms - infl ** 2
        report = minimize_quadratic_over_simplex(Q, -gains, data.size, inner_cfg)
        lam = report.argmin.weights
        phi = -report.value
        slope = -2.0 * float(lam @ infl)
        return phi, slope, lam

    t_lo = -float(np.min(radii))
    t_hi = 0.0
    t = 0.0
    lam = None
    for _ in range(80):
        phi, slope, lam = dual_solve(t)
        if phi > 0.0:
            t_lo = max(t_lo, t)
        else:
            t_hi = min(t_hi, t)
        if abs(phi) <= 1e-13 * scale or (t_hi - t_lo) <= 1e-13:
            break
        if slope < -1e-18:
            t_new = t - phi / slope
        else:
            t_new = 0.5 * (t_lo + t_hi)
        if not (t_lo < t_new < t_hi):
            t_new = 0.5 * (t_lo + t_hi)
        t = t_new
    y = lam @ B
    residual = float(np.max(np.linalg.norm(y - B, axis=1) - radii))
    return y, residual


class _ProxAvgModel:
    """Precomputed monotone graph for the proximal-average pipeline."""

    def __init__(self, data: FiniteMapData, cfg):
        self.data = data
        self.cfg = cfg
        self.k_dim = max(data.m, data.n)
        self.constant = data.L <= 1e-14 or data.size == 1
        if self.constant:
            self.value = data.values[0].copy()
            return
        pads = self._pad(data.points, data.m)
        vals = self._pad(data.values, data.n) / data.L
        g = OperatorGraph(pads, (pads + vals) / 2.0, multi_valued=True)
        self.T = graph_of_resolvent(g)

    def _pad(self, arr, width):
        if width == self.k_dim:
            return np.asarray(arr, dtype=float)
        out = np.zeros((arr.shape[0], self.k_dim))
        out[:, :width] = arr
        return out

    def query(self, x):
        x = as_vector(x)
        if x.shape[0] != self.data.m:
            raise DimensionMismatchError("query dimension does not match the data")
        if self.constant:
            return self.value.copy(), 0.0
        xhat = np.zeros(self.k_dim)
        xhat[: self.data.m] = x
        g, residual = resolvent_eval(self.T, xhat, self.cfg)
        fhat = 2.0 * g - xhat
        return self.data.L * fhat[: self.data.n], residual


def extend_proxavg(data: FiniteMapData, x, cfg=None):
    """One-point extension through the firmly-non-expansive pipeline.

    Returns (y, residual); the residual is the resolvent certificate (the
    value of a convex program whose optimum is exactly 0).  For batch queries
    build an ExtensionModel once instead.
    """
    cfg = cfg or SolverConfig()
    return _ProxAvgModel(data, cfg).query(x)


@dataclass(frozen=True)
class Modulus:
    """Piecewise-linear modulus of continuity on a breakpoint grid.

    Starts at (0, 0), interpolates linearly, extrapolates with the last
    slope.  is_concave / is_subadditive are computed on construction (the
    subadditivity check is a grid check over breakpoint sums).
    """

    breakpoints: np.ndarray
    values: np.ndarray
    is_concave: bool = field(init=False, default=False)
    is_subadditive: bool = field(init=False, default=False)

    def __post_init__(self):
        t = as_vector(self.breakpoints)
        v = as_vector(self.values)
        if t.shape != v.shape:
            raise ValueError("breakpoints and values must match")
        if t[0] != 0.0 or (t.size > 1 and np.any(np.diff(t) <= 0)):
            raise ValueError("breakpoints must start at 0 and strictly increase")
        if v[0] != 0.0:
            raise ValueError("a modulus must satisfy w(0) = 0")
        if np.any(v < 0) or (v.size > 1 and np.any(np.diff(v) < -1e-12)):
            raise ValueError("modulus values must be non-negative and non-decreasing")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "is_concave", self._concave())
        object.__setattr__(self, "is_subadditive", self._subadditive())

    def _slopes(self):
        if self.breakpoints.size < 2:
            return np.zeros(0)
        return np.diff(self.values) / np.diff(self.breakpoints)

    def _concave(self) -> bool:
        s = self._slopes()
        return bool(s.size < 2 or np.all(np.diff(s) <= 1e-12))

    def _subadditive(self) -> bool:
        t = self.breakpoints
        probes = np.concatenate([t, t[-1] * np.array([1.5, 2.0, 3.0])])
        s = probes[:, None] + probes[None, :]
        lhs = self(s.ravel()).reshape(s.shape)
        rhs = self(probes)[:, None] + self(probes)[None, :]
        return bool(np.all(lhs <= rhs + 1e-12))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-15):
            raise ValueError("modulus arguments must to be >= 0")
        t = np.clip(t, 0.0, None)
        out = np.interp(t, self.breakpoints, self.values)
        if self.breakpoints.size >= 2:
            last_t = self.breakpoints[-1]
            slope = (self.values[-1] - self.values[-2]) / (
                self.breakpoints[-1] - self.breakpoints[-2]
            )
            beyond = t > last_t
            if np.any(beyond):
                out = np.where(beyond, self.values[-1] + slope * (t - last_t), out)
        return float(out) if out.ndim == 0 else out


def linear_modulus(L: float, scale: float = 1.0) -> Modulus:
    """The Lipschitz modulus w(t) = L t (exact under linear extrapolation)."""
    return Modulus(np.array([0.0, scale]), np.array([0.0, L * scale]))


def _check_modulus_for_data(data: FiniteMapData, omega: Modulus):
    pts, vals = data.points, data.values
    k = pts.shape[0]
    for i in range(k):
        da = np.linalg.norm(pts[i] - pts[i + 1 :], axis=1)
        db = np.abs(vals[i, 0] - vals[i + 1 :, 0])
        bad = db > omega(da) + 1e-9
        if np.any(bad):
            j = i + 1 + int(np.argmax(bad))
            raise ModulusViolationError(
                f"modulus fails on pair ({i}, {j}): |db| = "
                f"{float(np.abs(vals[i, 0] - vals[j, 0])):.6g} > "
                f"w(||da||) = {float(omega(np.linalg.norm(pts[i] - pts[j]))):.6g}",
                witness=(i, j),
            )


def extend_mcshane(data: FiniteMapData, omega: Modulus, x, side: str) -> float:
    """McShane-Whitney envelope for scalar data under a general modulus.

    side='lower' is the smallest extension sup_i (b_i - w(||x - a_i||)),
    side='upper' the largest inf_i (b_i + w(||x - a_i||)); lower <= upper
    pointwise.  The modulus must be increasing and subadditive and must
    dominate the data (checked, witness reported).
    """
    if data.n != 1:
        raise ValueError("McShane-Whitney extension needs scalar values (n = 1)")
    if not omega.is_subadditive:
        raise ValueError("modulus must be subadditive")
    _check_modulus_for_data(data, omega)
    x = as_vector(x)
    if x.shape[0] != data.m:
        raise DimensionMismatchError("query dimension does not match the data")
    d = np.linalg.norm(data.points - x, axis=1)
    if side == "lower":
        return float(np.max(data.values[:, 0] - omega(d)))
    if side == "upper":
        return float(np.min(data.values[:, 0] + omega(d)))
    raise ValueError(f"side must be 'lower' or 'upper', got {side!r}")


def extend_coordinatewise(data: FiniteMapData, x, cfg=None) -> np.ndarray:
    """Apply the scalar lower envelope with w(t) = L t to each coordinate.

    The result interpolates the data and is sqrt(n) L-Lipschitz.
    """
    x = as_vector(x)
    scale = 1.0 + float(np.max(np.abs(data.points))) + float(np.max(np.abs(x)))
    omega = linear_modulus(data.L, scale)
    out = np.empty(data.n)
    for j in range(data.n):
        coord = FiniteMapData(data.points, data.values[:, j : j + 1], data.L)
        out[j] = extend_mcshane(coord, omega, x, "lower")
    return out


def extend_project_domain(data: FiniteMapData, domain, x, cfg=None) -> np.ndarray:
    """Extend beyond a convex domain containing the data by projecting the
    query onto the domain first; preserves the modulus of continuity."""
    cfg = cfg or SolverConfig()
    for i, a in enumerate(data.points):
        d = distance(a, domain, cfg)
        if d > 1e-9:
            raise ValueError(f"data point {i} lies outside the domain by {d:.3e}")
    p = project(as_vector(x), domain, cfg)
    y, _ = extend_minimax(data, p, cfg)
    return y


def _tau(t):
    return 1.5 + t / (2.0 * np.sqrt(1.0 + t * t))


def _tau_inv(s):
    u = s - 1.5
    return u / np.sqrt(0.25 - u * u)


def tietze_extend(data: FiniteMapData, x) -> float:
    """Riesz-formula continuous extension of scalar data.

    Values are passed through the homeomorphism t -> 3/2 + t/(2 sqrt(1+t^2))
    onto (1, 2), extended by inf_i f(a_i) d(x, a_i) / d(x, A), and mapped
    back.  At (numerically) zero distance the nearest data value is returned.
    """
    if data.n != 1:
        raise ValueError("Tietze extension needs scalar values (n = 1)")
    x = as_vector(x)
    d = np.linalg.norm(data.points - x, axis=1)
    dmin = float(np.min(d))
    if dmin <= 1e-12:
        return float(data.values[int(np.argmin(d)), 0])
    c = _tau(data.values[:, 0])
    return float(_tau_inv(np.min(c * d / dmin)))


def affine_majorant(omega: Modulus):
    """Affine majorant (slope, intercept) = (1/delta, 2) of a subadditive
    modulus, where delta is the largest breakpoint prefix with values < 1.

    Raises ValueError when no breakpoint has value < 1 (the modulus does not
    sink below 1 near 0) or when majorization fails on the grid (the input
    was not subadditive).
    """
    t, v = omega.breakpoints, omega.values
    prefix_end = 0
    for idx in range(1, t.size):
        if v[idx] < 1.0:
            prefix_end = idx
        else:
            break
    if prefix_end == 0:
        raise ValueError("no admissible delta: modulus does not drop below 1 at 0+")
    delta = float(t[prefix_end])
    slope, intercept = 1.0 / delta, 2.0
    if np.any(v > intercept + slope * t + 1e-12):
        raise ValueError("affine majorant fails on the grid; modulus not subadditive")
    return slope, intercept


def concave_majorant(omega: Modulus) -> Modulus:
    """Least concave majorant on the breakpoint grid: the upper concave hull
    of (t_k, w(t_k)), evaluated back on the same grid and extended by the
    last hull slope."""
    affine_majorant(omega)  # gate: extendability requires an affine majorant
    t, v = omega.breakpoints, omega.values
    hull = []
    for p in zip(t, v):
        while len(hull) >= 2:
            (t1, v1), (t2, v2) = hull[-2], hull[-1]
            cross = (t2 - t1) * (p[1] - v1) - (p[0] - t1) * (v2 - v1)
            if cross >= -1e-15:
                hull.pop()
            else:
                break
        hull.append(p)
    ht = np.array([p[0] for p in hull])
    hv = np.array([p[1] for p in hull])
    return Modulus(t, np.interp(t, ht, hv))


def empirical_modulus(data: FiniteMapData) -> Modulus:
    """Exact empirical modulus on the grid of pairwise distances."""
    if data.n != 1:
        raise ValueError("empirical modulus needs scalar values (n = 1)")
    pts, vals = data.points, data.values[:, 0]
    k = pts.shape[0]
    pairs = []
    for i in range(k):
        for j in range(i + 1, k):
            pairs.append(
                (float(np.linalg.norm(pts[i] - pts[j])), abs(float(vals[i] - vals[j])))
            )
    if not pairs:
        return Modulus(np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    pairs.sort()
    ts, vs = [0.0], [0.0]
    running = 0.0
    for t, dv in pairs:
        running = max(running, dv)
        if t <= 1e-15:
            continue
        if ts and abs(t - ts[-1]) <= 1e-15:
            vs[-1] = max(vs[-1], running)
        else:
            ts.append(t)
            vs.append(running)
    if len(ts) == 1:
        ts.append(1.0)
        vs.append(0.0)
    return Modulus(np.array(ts), np.array(vs))


def uniform_extend(data: FiniteMapData, x, cfg=None) -> float:
    """Extend scalar uniformly continuous data: empirical modulus, concave
    majorant, then the lower McShane-Whitney envelope.

    Values are normalized so the empirical modulus passes the affine-majorant
    gate regardless of the data's scale; the result is scaled back.
    """
    if data.n != 1:
        raise ValueError("uniform extension needs scalar values (n = 1)")
    if data.size == 1:
        return float(data.values[0, 0])
    omega_raw = empirical_modulus(data)
    s = max(1.0, 2.0 * float(np.max(omega_raw.values)))
    omega = Modulus(omega_raw.breakpoints, omega_raw.values / s)
    majorant = concave_majorant(omega)
    scaled = FiniteMapData(data.points, data.values / s)
    return s * extend_mcshane(scaled, majorant, x, "lower")


class ExtensionModel:
    """A reusable evaluator for one extension method over fixed data.

    project_domain additionally needs the convex domain; mcshane accepts an
    optional modulus (defaulting to the Lipschitz one); tietze and mcshane
    require scalar values.
    """

    METHODS = (
        "minimax",
        "proxavg",
        "mcshane",
        "coordinatewise",
        "project_domain",
        "tietze",
    )

    def __init__(self, data: FiniteMapData, method: str, cfg=None, omega=None,
                 domain=None):
        if method not in self.METHODS:
            raise ValueError(f"unknown method {method!r}")
        self.data = data
        self.method = method
        self.cfg = cfg or SolverConfig()
        self.domain = domain
        if method == "proxavg":
            self._prox = _ProxAvgModel(data, self.cfg)
        if method in ("mcshane", "tietze") and data.n != 1:
            raise ValueError(f"{method} requires scalar values (n = 1)")
        if method == "mcshane":
            scale = 1.0 + float(np.max(np.abs(data.points))) + float(
                np.max(np.abs(data.values))
            )
            self.omega = omega or linear_modulus(data.L, 4.0 * scale)
        if method == "project_domain" and domain is None:
            raise ValueError("project_domain requires a convex domain")

    def query(self, x):
        """Return (value vector in R^n, residual)."""
        if self.method == "minimax":
            return extend_minimax(self.data, x, self.cfg)
        if self.method == "proxavg":
            return self._prox.query(x)
        if self.method == "mcshane":
            v = extend_mcshane(self.data, self.omega, x, "lower")
            return np.array([v]), 0.0
        if self.method == "project_domain":
            return extend_project_domain(self.data, self.domain, x, self.cfg), 0.0
        if self.method == "tietze":
            return np.array([tietze_extend(self.data, x)]), 0.0
        v = extend_coordinatewise(self.data, x, self.cfg)
        return v, 0.0
