"""Deterministic convex solvers shared by the algorithmic modules.

Four public entry points:

* minimize_quadratic_over_simplex -- Frank-Wolfe with away steps and exact
  line search for 1/2 l'Ql + c'l over the probability simplex, certified by
  the Frank-Wolfe duality gap.  A KKT polish on the final support pushes the
  gap to machine precision.
* polyak_subgradient -- subgradient descent with Polyak steps for problems
  whose optimal value is known in advance (the Kirszbraun machinery supplies
  target 0).
* joint_descent -- descent over a product domain R^n x simplex for smooth
  jointly convex oracles: gradient steps with Armijo backtracking on the free
  block, Frank-Wolfe steps on the simplex block.
* golden_section -- 1-D unimodal minimization.

Internal helpers used by other modules:

* _minimize_quadratic_over_blocks -- Frank-Wolfe over a product of simplices
  (the closest-pair parametrization between two polytopes).
* solve_qp -- dense primal active-set solver for small convex QPs with
  equality constraints and linear inequalities.  It terminates on an exact
  KKT point, which is what lets epigraph reformulations of max-affine
  objectives reach 1e-12 accuracy.

All routines are pure and deterministic: identical inputs and config produce
bit-identical reports.
"""

from dataclasses import dataclass

import numpy as np

from .geometry import SimplexWeights
from .errors import SolverCapError

_ARMIJO_C1 = 1e-4
_ARMIJO_FACTOR = 0.5


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-9
    max_iters: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class SolveReport:
    """Outcome of a solve.

    residual is the problem-specific optimality certificate (Frank-Wolfe gap,
    value above target, bracket width).  converged means the residual met the
    tolerance declared in the config, in the sense of each solver's contract.
    """

    argmin: object
    value: float
    residual: float
    iters: int
    converged: bool


def _as_quad_apply(quad):
    if callable(quad):
        return quad
    mat = np.asarray(quad, dtype=float)
    return lambda v: mat @ v


def _block_slices(blocks):
    out = []
    start = 0
    for size in blocks:
        out.append(slice(start, start + size))
        start += size
    return out


def _fw_gap(g, z, slices):
    gap = 0.0
    for sl in slices:
        gap += float(g[sl] @ z[sl] - np.min(g[sl]))
    return gap


def _polish_blocks(quad_apply, c, z, blocks, slices):
    """Solve the equality-KKT system on the support of z and return the
    polished point, or None if the solve leaves the simplex."""
    K = z.shape[0]
    support = z > 1e-10
    for sl in slices:
        if not np.any(support[sl]):
            support[sl.start + int(np.argmax(z[sl]))] = True
    for _ in range(K + 1):
        idx = np.flatnonzero(support)
        s = idx.size
        Q = np.empty((s, s))
        for j, col in enumerate(idx):
            e = np.zeros(K)
            e[col] = 1.0
            Q[:, j] = quad_apply(e)[idx]
        rows = []
        rhs_rows = []
        for sl in slices:
            row = np.zeros(s)
            row[(idx >= sl.start) & (idx < sl.stop)] = 1.0
            rows.append(row)
            rhs_rows.append(1.0)
        E = np.array(rows)
        kkt = np.block([[Q, E.T], [E, np.zeros((E.shape[0], E.shape[0]))]])
        rhs = np.concatenate([-c[idx], np.array(rhs_rows)])
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        zs = sol[:s]
        if np.min(zs) >= -1e-12:
            out = np.zeros(K)
            out[idx] = np.clip(zs, 0.0, None)
            for sl in slices:
                tot = out[sl].sum()
                if tot <= 0:
                    return None
                out[sl] /= tot
            return out
        drop = idx[int(np.argmin(zs))]
        support[drop] = False
        for sl in slices:
            if not np.any(support[sl]):
                return None
    return None


def _minimize_quadratic_over_blocks(quad, c, blocks, cfg, constant=0.0, polish=True):
    """Away-step Frank-Wolfe for 1/2 z'Qz + c'z + constant over a product of
    probability simplices with the given block sizes."""
    quad_apply = _as_quad_apply(quad)
    c = np.asarray(c, dtype=float)
    K = int(sum(blocks))
    if c.shape[0] != K:
        raise ValueError("linear term length does not match block sizes")
    slices = _block_slices(blocks)

    z = np.zeros(K)
    for sl in slices:
        z[sl.start] = 1.0
    Qz = quad_apply(z)

    def value_at(zz, Qzz):
        return 0.5 * float(zz @ Qzz) + float(c @ zz) + constant

    gap = np.inf
    iters = 0
    if K == len(blocks):  # every block is a single forced vertex
        gap = 0.0
    while iters < cfg.max_iters:
        g = Qz + c
        gap = _fw_gap(g, z, slices)
        if gap <= cfg.tol * (1.0 + abs(value_at(z, Qz))):
            break
        # Frank-Wolfe direction over the product polytope.
        d_fw = -z.copy()
        for sl in slices:
            d_fw[sl.start + int(np.argmin(g[sl]))] += 1.0
        gap_fw = -float(g @ d_fw)
        # Blockwise away direction: worst active coordinate of one block.
        best_away = None
        for sl in slices:
            active = np.flatnonzero(z[sl] > 1e-14)
            if active.size <= 1:
                continue
            j = sl.start + active[int(np.argmax(g[sl][active]))]
            score = float(g[j] - g[sl] @ z[sl])
            if best_away is None or score > best_away[0]:
                best_away = (score, j, sl)
        use_away = best_away is not None and best_away[0] > gap_fw
        if use_away:
            _, j, sl = best_away
            d = np.zeros(K)
            d[sl] = z[sl]
            d[j] -= 1.0
            zj = z[j]
            gamma_max = zj / (1.0 - zj) if zj < 1.0 else 0.0
        else:
            d = d_fw
            gamma_max = 1.0
        slope = float(g @ d)
        if slope >= 0.0 or gamma_max <= 0.0:
            iters += 1
            continue
        Qd = quad_apply(d)
        curv = float(d @ Qd)
        if curv <= 1e-18:
            gamma = gamma_max
        else:
            gamma = min(gamma_max, -slope / curv)
        z = z + gamma * d
        Qz = Qz + gamma * Qd
        np.clip(z, 0.0, None, out=z)
        iters += 1
        if iters % 256 == 0:  # guard against slow drift of the block sums
            for sl in slices:
                z[sl] /= z[sl].sum()
            Qz = quad_apply(z)

    if polish:
        polished = _polish_blocks(quad_apply, c, z, blocks, slices)
        if polished is not None:
            Qp = quad_apply(polished)
            gap_p = _fw_gap(Qp + c, polished, slices)
            if value_at(polished, Qp) <= value_at(z, Qz) + 1e-15 or gap_p < gap:
                z, Qz, gap = polished, Qp, gap_p

    value = value_at(z, Qz)
    converged = gap <= cfg.tol * (1.0 + abs(value))
    return z, value, gap, iters, converged


def minimize_quadratic_over_simplex(quad, c, k, cfg=None, constant=0.0, polish=True):
    """Minimize 1/2 l'Ql + c'l (+ constant) over the probability simplex.

    quad is a dense PSD matrix or a linear-operator callable.  The returned
    residual is the Frank-Wolfe duality gap at the final iterate, a valid
    upper bound on the suboptimality for any PSD instance.
    """
    cfg = cfg or SolverConfig()
    z, value, gap, iters, converged = _minimize_quadratic_over_blocks(
        quad, c, [int(k)], cfg, constant=constant, polish=polish
    )
    return SolveReport(
        argmin=SimplexWeights(z),
        value=value,
        residual=gap,
        iters=iters,
        converged=converged,
    )


def polyak_subgradient(oracle, target, x0, cfg=None):
    """Drive a convex function with known minimum <= target below target.

    oracle(x) returns (value, subgradient).  Steps are
    (f(x) - target) / ||g||^2 along -g; the iteration stops as soon as the
    best value is within cfg.tol of the target.  Never reports converged=True
    unless f(best) <= target + tol.
    """
    cfg = cfg or SolverConfig()
    x = np.asarray(x0, dtype=float).copy()
    f, g = oracle(x)
    best_x, best_f = x.copy(), f
    iters = 0
    while best_f > target + cfg.tol and iters < cfg.max_iters:
        ng2 = float(g @ g)
        if ng2 < 1e-28:
            break  # numerically stationary; cannot certify the target
        x = x - ((f - target) / ng2) * g
        f, g = oracle(x)
        if f < best_f:
            best_f, best_x = f, x.copy()
        iters += 1
    residual = max(best_f - target, 0.0)
    return SolveReport(
        argmin=best_x,
        value=best_f,
        residual=residual,
        iters=iters,
        converged=residual <= cfg.tol,
    )


def joint_descent(oracle, y0, k, cfg=None, target=None):
    """Minimize a smooth jointly convex oracle over R^n x simplex.

    oracle(y, lam) returns (value, grad_y, grad_lam).  The free block takes
    Armijo-backtracked gradient steps (initial step 1, factor 0.5, c1=1e-4);
    the simplex block takes Frank-Wolfe steps.  The residual sums a scaled
    gradient norm and the simplex Frank-Wolfe gap; when target is given the
    solve also stops once the value is within tol of it.
    """
    cfg = cfg or SolverConfig()
    y = np.asarray(y0, dtype=float).copy()
    lam = np.full(int(k), 1.0 / int(k))
    f, gy, gl = oracle(y, lam)
    iters = 0
    step = 1.0
    while iters < cfg.max_iters:
        gap_l = float(gl @ lam - np.min(gl))
        residual = float(np.linalg.norm(gy)) * (1.0 + float(np.linalg.norm(y))) + gap_l
        if residual <= cfg.tol * (1.0 + abs(f)):
            break
        if target is not None and f <= target + cfg.tol:
            break
        moved = False
        ng2 = float(gy @ gy)
        if ng2 > 1e-28:
            s = min(step * 2.0, 1.0)
            while s > 1e-18:
                y_new = y - s * gy
                f_new = oracle(y_new, lam)[0]
                if f_new <= f - _ARMIJO_C1 * s * ng2:
                    y = y_new
                    step = s
                    moved = True
                    break
                s *= _ARMIJO_FACTOR
            if moved:
                f, gy, gl = oracle(y, lam)
        if gap_l > 1e-16:
            # Away-step Frank-Wolfe direction (linear convergence on the
            # simplex block instead of the plain 1/k rate).
            i = int(np.argmin(gl))
            d_fw = -lam.copy()
            d_fw[i] += 1.0
            gap_fw = -float(gl @ d_fw)
            d, eta_max = d_fw, 1.0
            active = np.flatnonzero(lam > 1e-14)
            if active.size > 1:
                j = active[int(np.argmax(gl[active]))]
                gap_away = float(gl[j] - gl @ lam)
                if gap_away > gap_fw and lam[j] < 1.0:
                    d = lam.copy()
                    d[j] -= 1.0
                    eta_max = lam[j] / (1.0 - lam[j])
            slope = float(gl @ d)
            eta = eta_max
            while eta > 1e-18:
                lam_new = np.clip(lam + eta * d, 0.0, None)
                lam_new /= lam_new.sum()
                f_new = oracle(y, lam_new)[0]
                if f_new <= f + _ARMIJO_C1 * eta * slope:
                    lam = lam_new
                    f, gy, gl = oracle(y, lam)
                    moved = True
                    break
                eta *= _ARMIJO_FACTOR
        iters += 1
        if not moved:
            break
    gap_l = float(gl @ lam - np.min(gl))
    residual = float(np.linalg.norm(gy)) * (1.0 + float(np.linalg.norm(y))) + gap_l
    converged = residual <= cfg.tol * (1.0 + abs(f)) or (
        target is not None and f <= target + cfg.tol
    )
    return SolveReport(
        argmin=np.concatenate([y, lam]),
        value=f,
        residual=residual,
        iters=iters,
        converged=converged,
    )


_INVPHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, a, b, cfg=None):
    """Golden-section search for a unimodal f on [a, b]."""
    cfg = cfg or SolverConfig()
    a = float(a)
    b = float(b)
    if not a < b:
        raise ValueError(f"need a < b, got [{a}, {b}]")
    width0 = b - a
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    iters = 0
    while (b - a) > cfg.tol * width0 and iters < cfg.max_iters:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        iters += 1
    t = c if fc <= fd else d
    return SolveReport(
        argmin=t,
        value=f(t),
        residual=b - a,
        iters=iters,
        converged=(b - a) <= cfg.tol * width0,
    )


def _nullspace(C, K):
    """Orthonormal basis of the null space of C (identity when C is empty)."""
    if C.shape[0] == 0:
        return np.eye(K)
    u, s, vt = np.linalg.svd(C, full_matrices=True)
    rank_tol = max(C.shape) * (s[0] if s.size else 0.0) * 1e-13
    rank = int(np.sum(s > rank_tol))
    return vt[rank:].T


def solve_qp(P, q, A_eq, b_eq, G, h, z0, initial_active=(), tol=1e-10, max_iters=None):
    """Dense primal active-set method for a small convex QP.

    Minimizes 1/2 z'Pz + q'z subject to A_eq z = b_eq and G z <= h, starting
    from a feasible z0.  P must be PSD (possibly singular: each equality-
    constrained subproblem is solved in the null space of the working set,
    splitting the reduced gradient into curvature and ray components, so
    linear descent directions are followed to their blocking constraints).
    Returns (z, info) with info carrying converged / iters.
    """
    P = np.asarray(P, dtype=float)
    q = np.asarray(q, dtype=float)
    K = q.shape[0]
    A_eq = np.asarray(A_eq, dtype=float).reshape(-1, K)
    b_eq = np.asarray(b_eq, dtype=float).reshape(-1)
    G = np.asarray(G, dtype=float).reshape(-1, K)
    h = np.asarray(h, dtype=float).reshape(-1)
    me, mi = A_eq.shape[0], G.shape[0]
    z = np.asarray(z0, dtype=float).copy()
    if me:
        corr, *_ = np.linalg.lstsq(A_eq, b_eq - A_eq @ z, rcond=None)
        z += corr
    active = np.zeros(mi, dtype=bool)
    for i in initial_active:
        active[i] = True
    if max_iters is None:
        max_iters = 200 + 80 * (mi + 1)
    converged = False
    iters = 0
    while iters < max_iters:
        iters += 1
        grad = P @ z + q
        local = 1.0 + float(np.max(np.abs(grad), initial=0.0))
        act_idx = np.flatnonzero(active)
        rows = [A_eq] if me else []
        if act_idx.size:
            rows.append(G[act_idx])
        C = np.vstack(rows) if rows else np.zeros((0, K))
        Z = _nullspace(C, K)
        ray = False
        if Z.shape[1] == 0:
            d = np.zeros(K)
        else:
            # Reduced Hessian by eigendecomposition: small positive curvature
            # is genuine (take the long Newton step along it); only the true
            # null space turns the subproblem linear (follow the ray).
            H = Z.T @ P @ Z
            gr = Z.T @ grad
            w, V = np.linalg.eigh(0.5 * (H + H.T))
            w_tol = max(1e-13, float(w.max(initial=0.0)) * 1e-12)
            pos = w > w_tol
            g_eig = V.T @ gr
            g_null = V[:, ~pos] @ g_eig[~pos]
            if float(np.max(np.abs(g_null), initial=0.0)) > 1e-11 * local:
                d = Z @ (-g_null)
                ray = True
            else:
                dr = -(V[:, pos] @ (g_eig[pos] / w[pos]))
                d = Z @ dr
        if not ray and float(np.max(np.abs(d))) <= 1e-11 * (
            1.0 + float(np.max(np.abs(z), initial=0.0))
        ):
            mult = None
            if C.shape[0]:
                mu, *_ = np.linalg.lstsq(C.T, -grad, rcond=None)
                mult = mu[me:]
            if mult is None or mult.size == 0 or np.min(mult) >= -1e-11 * local:
                converged = True
                break
            # Bland's rule: drop the lowest-index violating constraint.
            neg = np.flatnonzero(mult < -1e-11 * local)
            drop = act_idx[int(neg[0])]
            active[drop] = False
            continue
        gd = G @ d
        slack = np.clip(h - G @ z, 0.0, None)
        blocking = np.flatnonzero(~active & (gd > 1e-13 * (1.0 + np.abs(gd).max())))
        alpha_max = np.inf
        block_idx = -1
        if blocking.size:
            ratios = slack[blocking] / gd[blocking]
            alpha_max = max(float(np.min(ratios)), 0.0)
            ties = np.flatnonzero(ratios <= alpha_max * (1.0 + 1e-12) + 1e-15)
            block_idx = int(blocking[ties[0]])  # Bland tie-break by index
        if ray:
            curv = float(d @ (P @ d))
            slope = float(grad @ d)
            if curv > 1e-14 * local:
                alpha = min(-slope / curv, alpha_max)
            elif np.isfinite(alpha_max):
                alpha = alpha_max
            elif slope < 0:
                raise SolverCapError("QP is unbounded below")
            else:
                alpha = 0.0
        else:
            alpha = min(1.0, alpha_max)
        if not np.isfinite(alpha):
            alpha = 1.0
        if alpha > 0.0:
            z = z + alpha * d
        if block_idx >= 0 and alpha_max <= alpha + 1e-15:
            active[block_idx] = True
        if me and iters % 16 == 0:
            corr, *_ = np.linalg.lstsq(A_eq, b_eq - A_eq @ z, rcond=None)
            z += corr
    if me:
        corr, *_ = np.linalg.lstsq(A_eq, b_eq - A_eq @ z, rcond=None)
        z += corr
    return z, {"converged": converged, "iters": iters}
