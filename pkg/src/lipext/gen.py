"""Deterministic test-data generators (all randomness via splitmix64).

Lipschitz datasets sample a known 1-Lipschitz map (orthogonal map composed
with a contraction and a translation), so the generated FiniteMapData is
valid with L = 1 by construction.  Ball families come in two modes:
'common-core' guarantees a shared ball with margin, 'disjoint-pair' plants
two separated balls so every pair check fails.
"""

import numpy as np

from .rng import SplitMix64
from .geometry import Ball
from .helly import BodyFamily
from .extension import FiniteMapData


def _gaussian_matrix(rng, rows, cols):
    return np.array([[rng.normal() for _ in range(cols)] for _ in range(rows)])


def _random_orthogonal(rng, dim):
    q, r = np.linalg.qr(_gaussian_matrix(rng, dim, dim))
    return q * np.sign(np.diag(r))


def _unit_direction(rng, dim):
    while True:
        v = np.array([rng.normal() for _ in range(dim)])
        norm = float(np.linalg.norm(v))
        if norm > 1e-9:
            return v / norm


def generate_lipschitz_data(m, n, count, seed) -> FiniteMapData:
    """Sample count points of a contraction R^m -> R^n; valid with L = 1."""
    if m < 1 or n < 1 or count < 1:
        raise ValueError("dimensions and count must be >= 1")
    rng = SplitMix64(seed)
    k_dim = max(m, n)
    rotation = _random_orthogonal(rng, k_dim)
    contraction = rng.uniform(0.3, 1.0)
    translation = np.array([rng.uniform(-1.0, 1.0) for _ in range(n)])
    points = np.array(
        [[rng.uniform(-2.0, 2.0) for _ in range(m)] for _ in range(count)]
    )
    padded = np.zeros((count, k_dim))
    padded[:, :m] = points
    values = contraction * (padded @ rotation.T)[:, :n] + translation
    return FiniteMapData(points, values, 1.0)


def generate_ball_family(n, count, seed, mode="common-core") -> BodyFamily:
    """Family of closed balls with controlled intersection structure."""
    if n < 1 or count < 1:
        raise ValueError("dimension and count must be >= 1")
    rng = SplitMix64(seed)
    core_center = np.array([rng.uniform(-1.0, 1.0) for _ in range(n)])
    core_radius = rng.uniform(0.15, 0.3)
    balls = []
    if mode == "common-core":
        for _ in range(count):
            radius = rng.uniform(core_radius + 0.2, core_radius + 1.2)
            reach = radius - core_radius - 0.05
            center = core_center + rng.uniform(0.0, reach) * _unit_direction(rng, n)
            balls.append(Ball(center, radius))
    elif mode == "disjoint-pair":
        r0 = rng.uniform(0.2, 0.6)
        r1 = rng.uniform(0.2, 0.6)
        c0 = core_center
        gap = rng.uniform(0.3, 1.0)
        c1 = c0 + (r0 + r1 + gap) * _unit_direction(rng, n)
        balls.append(Ball(c0, r0))
        balls.append(Ball(c1, r1))
        for _ in range(count - 2):
            center = np.array([rng.uniform(-2.0, 2.0) for _ in range(n)])
            balls.append(Ball(center, rng.uniform(0.2, 1.0)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return BodyFamily(balls)


def generate_monotone_graph(n, count, seed, margin=0.0):
    """Random monotone operator graph: samples of a and c R + PSD-quadratic
    gradient map x -> c x + M'M x (+ optional strict margin via c)."""
    rng = SplitMix64(seed)
    M = _gaussian_matrix(rng, n, n) / max(n, 1)
    S = M.T @ M + (margin + rng.uniform(0.0, 1.0)) * np.eye(n)
    points = np.array([[rng.uniform(-1.5, 1.5) for _ in range(n)] for _ in range(count)])
    values = points @ S.T
    return points, values
