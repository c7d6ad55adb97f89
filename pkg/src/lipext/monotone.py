"""Finite set-valued maps, Fitzpatrick functions, and resolvent evaluation.

A finite operator graph T = {(x_i, x_i*)} in R^n x R^n induces:

* its Fitzpatrick function Phi(x, x*) = max_i <x, a_i*> + <a_i, x*> - <a_i, a_i*>,
  a max-affine function of (x, x*) with slopes (a_i*, a_i);
* the conjugate Phi*, an exact polyhedral program on conv{(a_i*, a_i)};
* Psi, the proximal average of Phi and Phi*t, an autoconjugate function whose
  equality set {Psi = <.,.>} is the graph of a maximal monotone extension of
  a monotone T;
* the resolvent of that extension, evaluated per query by one convex program.

Psi and every derived quantity are computed through a single reduction: the
constraint that the conjugate argument stays in dom Phi* is enforced by a
simplex parametrization z = sum_i l_i (a_i, a_i*), the quarter-kappa coupling
term collapses to 1/2 ||x~ - z||^2, and the remaining max-affine term is
moved into an epigraph variable.  The result is a linearly constrained convex
QP solved exactly by the dense active-set solver, so residuals reach machine
precision rather than first-order-method accuracy.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import as_vector, dot
from .errors import DimensionMismatchError
from .solvers import SolverConfig, solve_qp
from .convex_functions import MaxAffineConjugate, _polyhedral_conjugate_value

RESOLVENT_TOL = 1e-6


@dataclass(frozen=True)
class OperatorGraph:
    """Finite graph of a set-valued map R^n => R^n.

    Set multi_valued=True to allow one x to carry several x* values;
    otherwise duplicate points with conflicting values (beyond 1e-12) are
    rejected.
    """

    points: np.ndarray
    values: np.ndarray
    multi_valued: bool = False

    def __post_init__(self):
        xs = np.asarray(self.points, dtype=float)
        vs = np.asarray(self.values, dtype=float)
        if xs.ndim != 2 or vs.ndim != 2 or xs.shape != vs.shape or xs.shape[0] < 1:
            raise ValueError("need matching non-empty (k, n) point and value arrays")
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(vs))):
            raise ValueError("graph has non-finite entries")
        xs.setflags(write=False)
        vs.setflags(write=False)
        object.__setattr__(self, "points", xs)
        object.__setattr__(self, "values", vs)
        if not self.multi_valued:
            k = xs.shape[0]
            for i in range(k):
                for j in range(i + 1, k):
                    if np.max(np.abs(xs[i] - xs[j])) <= 1e-12 and np.max(
                        np.abs(vs[i] - vs[j])
                    ) > 1e-12:
                        raise ValueError(
                            f"points {i} and {j} coincide with conflicting values; "
                            "pass multi_valued=True for set-valued graphs"
                        )

    @classmethod
    def from_pairs(cls, pairs, multi_valued=False):
        xs = [as_vector(p) for p, _ in pairs]
        vs = [as_vector(v) for _, v in pairs]
        return cls(np.asarray(xs), np.asarray(vs), multi_valued)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    def pairs(self):
        return list(zip(self.points, self.values))


@dataclass(frozen=True)
class PairwiseCheck:
    passed: bool
    worst_value: float
    worst_pair: object


def is_monotone(T: OperatorGraph) -> PairwiseCheck:
    """Exhaustive pair check of <x_i - x_j, x_i* - x_j*> >= -1e-10."""
    xs, vs = T.points, T.values
    k = xs.shape[0]
    if k < 2:
        return PairwiseCheck(True, np.inf, None)
    worst, pair = np.inf, None
    for i in range(k - 1):
        dx = xs[i] - xs[i + 1 :]
        dv = vs[i] - vs[i + 1 :]
        prods = np.sum(dx * dv, axis=1)
        j = int(np.argmin(prods))
        if prods[j] < worst:
            worst, pair = float(prods[j]), (i, i + 1 + j)
    return PairwiseCheck(worst >= -1e-10, worst, pair)


def firmly_nonexpansive_check(F: OperatorGraph) -> PairwiseCheck:
    """Min over pairs of <df, dx> - ||df||^2; passes when >= -1e-10."""
    xs, vs = F.points, F.values
    k = xs.shape[0]
    if k < 2:
        return PairwiseCheck(True, np.inf, None)
    worst, pair = np.inf, None
    for i in range(k - 1):
        dx = xs[i] - xs[i + 1 :]
        df = vs[i] - vs[i + 1 :]
        slack = np.sum(df * dx, axis=1) - np.sum(df * df, axis=1)
        j = int(np.argmin(slack))
        if slack[j] < worst:
            worst, pair = float(slack[j]), (i, i + 1 + j)
    return PairwiseCheck(worst >= -1e-10, worst, pair)


def _nonexpansive_check(F: OperatorGraph):
    xs, vs = F.points, F.values
    for i in range(xs.shape[0]):
        dx = np.linalg.norm(xs[i] - xs[i + 1 :], axis=1)
        df = np.linalg.norm(vs[i] - vs[i + 1 :], axis=1)
        bad = df > dx * (1.0 + 1e-10) + 1e-10
        if np.any(bad):
            j = int(np.argmax(bad))
            raise ValueError(
                f"map is not non-expansive on pair ({i}, {i + 1 + j})"
            )


def resolvent_of_graph(T: OperatorGraph) -> OperatorGraph:
    """Push graph(T) through (x, x*) -> (x + x*, x), the graph of (T + id)^-1.

    Monotone input makes the image single-valued; a conflict therefore
    signals non-monotone input and is raised.
    """
    ys = T.points + T.values
    k = ys.shape[0]
    for i in range(k):
        for j in range(i + 1, k):
            if np.max(np.abs(ys[i] - ys[j])) <= 1e-10 and np.max(
                np.abs(T.points[i] - T.points[j])
            ) > 1e-10:
                raise ValueError(
                    f"resolvent image is multi-valued on pairs ({i}, {j}); "
                    "the input graph is not monotone"
                )
    return OperatorGraph(ys, T.points.copy())


def graph_of_resolvent(F: OperatorGraph) -> OperatorGraph:
    """Inverse transform (y, y*) -> (y*, y - y*)."""
    return OperatorGraph(F.values.copy(), F.points - F.values, multi_valued=True)


def nonexpansive_to_firm(F: OperatorGraph) -> OperatorGraph:
    """g = (id + f) / 2; input must be non-expansive."""
    _nonexpansive_check(F)
    return OperatorGraph(F.points.copy(), (F.points + F.values) / 2.0)


def firm_to_nonexpansive(G: OperatorGraph) -> OperatorGraph:
    """f = 2 g - id; input must be firmly non-expansive."""
    check = firmly_nonexpansive_check(G)
    if not check.passed:
        raise ValueError(
            f"map is not firmly non-expansive (worst slack {check.worst_value:.3e} "
            f"on pair {check.worst_pair})"
        )
    return OperatorGraph(G.points.copy(), 2.0 * G.values - G.points)


def _atoms(T: OperatorGraph):
    """Rows a~_i = (a_i, a_i*), transposed rows (a_i*, a_i), offsets <a_i, a_i*>."""
    Arows = np.hstack([T.points, T.values])
    Brows = np.hstack([T.values, T.points])
    o = np.sum(T.points * T.values, axis=1)
    return Arows, Brows, o


def fitzpatrick_eval(T: OperatorGraph, x, xstar) -> float:
    """Exact max over the graph of <x, a*> + <a, x*> - <a, a*>."""
    x = as_vector(x)
    xstar = as_vector(xstar)
    if x.shape[0] != T.dim or xstar.shape[0] != T.dim:
        raise DimensionMismatchError("argument dimension does not match the graph")
    best = -np.inf
    for a, astar in zip(T.points, T.values):
        term = dot(x, astar) + dot(a, xstar) - dot(a, astar)
        if term > best:
            best = term
    return best


def fitzpatrick_conj_eval(T: OperatorGraph, y, ystar, cfg=None) -> float:
    """Conjugate of the Fitzpatrick function by the exact polyhedral rule.

    Phi is max-affine with slopes (a_i*, a_i) and offsets <a_i, a_i*>, so
    Phi*(y, y*) = min { sum l_i <a_i, a_i*> : sum l_i (a_i*, a_i) = (y, y*) },
    +inf when (y, y*) is outside the hull of the transposed atoms.
    """
    cfg = cfg or SolverConfig()
    y = as_vector(y)
    ystar = as_vector(ystar)
    _, Brows, o = _atoms(T)
    node = MaxAffineConjugate(Brows, o)
    return _polyhedral_conjugate_value(node, np.concatenate([y, ystar]), cfg)


def _psi_value_at(Arows, Brows, o, BA, xt, lam):
    p = 2.0 * (Brows @ xt) - BA @ lam - o
    r = xt - Arows.T @ lam
    return 0.5 * float(np.max(p)) + 0.5 * float(o @ lam) + 0.5 * float(r @ r)


def _clean_simplex(lam):
    lam = np.clip(lam, 0.0, None)
    s = lam.sum()
    return lam / s if s > 0 else np.full_like(lam, 1.0 / lam.size)


def _psi_qp(T: OperatorGraph, xt, cfg):
    """Minimize the epigraph form of Psi's inner problem at the point x~."""
    Arows, Brows, o = _atoms(T)
    k = Arows.shape[0]
    BA = Brows @ Arows.T
    P = np.zeros((k + 1, k + 1))
    P[:k, :k] = Arows @ Arows.T
    q = np.concatenate([-(Arows @ xt) + 0.5 * o, [0.5]])
    G = np.zeros((2 * k, k + 1))
    G[:k, :k] = -BA
    G[:k, k] = -1.0
    G[k:, :k] = -np.eye(k)
    h = np.concatenate([o - 2.0 * (Brows @ xt), np.zeros(k)])
    A_eq = np.zeros((1, k + 1))
    A_eq[0, :k] = 1.0
    lam0 = np.full(k, 1.0 / k)
    p0 = 2.0 * (Brows @ xt) - BA @ lam0 - o
    z0 = np.concatenate([lam0, [float(np.max(p0))]])
    z, _ = solve_qp(P, q, A_eq, [1.0], G, h, z0, initial_active=[int(np.argmax(p0))])
    lam = _clean_simplex(z[:k])
    return _psi_value_at(Arows, Brows, o, BA, xt, lam), lam


def psi_eval(T: OperatorGraph, x, xstar, cfg=None) -> float:
    """Proximal average of Phi and Phi*t evaluated at (x, x*)."""
    cfg = cfg or SolverConfig()
    xt = np.concatenate([as_vector(x), as_vector(xstar)])
    return _psi_qp(T, xt, cfg)[0]


def _psi_conj_qp(T: OperatorGraph, wt, cfg):
    """Exact Psi*(w~) = sup over x~ of <w~, x~> - Psi(x~).

    The inner minimization over the simplex commutes with the outer supremum
    (the objective is jointly concave in (x~, -l)), so the whole conjugate is
    one concave-maximization QP over (x~, l, t).
    """
    Arows, Brows, o = _atoms(T)
    k = Arows.shape[0]
    d = Arows.shape[1]
    BA = Brows @ Arows.T
    nz = d + k + 1
    P = np.zeros((nz, nz))
    P[:d, :d] = np.eye(d)
    P[:d, d : d + k] = -Arows.T
    P[d : d + k, :d] = -Arows
    P[d : d + k, d : d + k] = Arows @ Arows.T
    q = np.concatenate([-wt, 0.5 * o, [0.5]])
    G = np.zeros((2 * k, nz))
    G[:k, :d] = 2.0 * Brows
    G[:k, d : d + k] = -BA
    G[:k, d + k] = -1.0
    G[k:, d : d + k] = -np.eye(k)
    h = np.concatenate([o, np.zeros(k)])
    A_eq = np.zeros((1, nz))
    A_eq[0, d : d + k] = 1.0
    half = d // 2
    xt0 = np.concatenate([wt[half:], wt[:half]])
    lam0 = np.full(k, 1.0 / k)
    p0 = 2.0 * (Brows @ xt0) - BA @ lam0 - o
    z0 = np.concatenate([xt0, lam0, [float(np.max(p0))]])
    z, _ = solve_qp(P, q, A_eq, [1.0], G, h, z0, initial_active=[int(np.argmax(p0))])
    xt = z[:d]
    lam = _clean_simplex(z[d : d + k])
    value = float(wt @ xt) - _psi_value_at(Arows, Brows, o, BA, xt, lam)
    return value, xt, lam


def psi_conj_eval(T: OperatorGraph, y, ystar, cfg=None) -> float:
    """Conjugate of Psi, evaluated exactly (no search box needed)."""
    cfg = cfg or SolverConfig()
    wt = np.concatenate([as_vector(y), as_vector(ystar)])
    return _psi_conj_qp(T, wt, cfg)[0]


def autoconjugacy_check(T: OperatorGraph, samples, cfg=None) -> float:
    """max over samples x~ of |Psi*(x~^t) - Psi(x~)|; ~0 for monotone T."""
    cfg = cfg or SolverConfig()
    n = T.dim
    worst = 0.0
    for s in samples:
        s = as_vector(s)
        if s.shape[0] != 2 * n:
            raise DimensionMismatchError("samples must live in R^(2n)")
        st = np.concatenate([s[n:], s[:n]])
        gap = abs(psi_conj_eval(T, st[:n], st[n:], cfg) - _psi_qp(T, s, cfg)[0])
        worst = max(worst, gap)
    return worst


def resolvent_eval(T: OperatorGraph, x, cfg=None):
    """Evaluate the resolvent of the maximal monotone extension of T at x.

    Minimizes h(y, l) = Psi(y, x - y) - <y, x - y> jointly over y and the
    simplex parametrization of the conjugate block; the optimum value is 0,
    so the returned residual doubles as the convergence certificate
    (converged iff residual <= 1e-6; the active-set solve normally lands at
    ~1e-14).  Returns (y, residual).
    """
    cfg = cfg or SolverConfig()
    x = as_vector(x)
    if x.shape[0] != T.dim:
        raise DimensionMismatchError("query dimension does not match the graph")
    n = T.dim
    Arows, Brows, o = _atoms(T)
    k = Arows.shape[0]
    BA = Brows @ Arows.T
    nz = n + k + 1
    # M y = (y, -y); x~ = M y + (0, x).
    MtA = (T.points - T.values).T  # columns a_j - a_j*
    P = np.zeros((nz, nz))
    P[:n, :n] = 4.0 * np.eye(n)
    P[:n, n : n + k] = -MtA
    P[n : n + k, :n] = -MtA.T
    P[n : n + k, n : n + k] = Arows @ Arows.T
    q = np.concatenate([-2.0 * x, -(T.values @ x) + 0.5 * o, [0.5]])
    G = np.zeros((2 * k, nz))
    G[:k, :n] = 2.0 * (T.values - T.points)
    G[:k, n : n + k] = -BA
    G[:k, n + k] = -1.0
    G[k:, n : n + k] = -np.eye(k)
    h = np.concatenate([o - 2.0 * (T.points @ x), np.zeros(k)])
    A_eq = np.zeros((1, nz))
    A_eq[0, n : n + k] = 1.0

    def pvec(y, lam):
        xt = np.concatenate([y, x - y])
        return 2.0 * (Brows @ xt) - BA @ lam - o, xt

    y0 = x / 2.0
    lam0 = np.full(k, 1.0 / k)
    p0, _ = pvec(y0, lam0)
    z0 = np.concatenate([y0, lam0, [float(np.max(p0))]])
    z, _ = solve_qp(P, q, A_eq, [1.0], G, h, z0, initial_active=[int(np.argmax(p0))])
    y = z[:n]
    lam = _clean_simplex(z[n : n + k])
    p, xt = pvec(y, lam)
    r = xt - Arows.T @ lam
    psi_upper = 0.5 * float(np.max(p)) + 0.5 * float(o @ lam) + 0.5 * float(r @ r)
    residual = max(psi_upper - float(y @ (x - y)), 0.0)
    return y, residual
