"""Desk-scale numerical checks of the complexity bounds.

For 2-d patterns under the linear kernel, the set of argmax assignments
(instance -> window) induced by directions u is enumerated exactly with
an angular sweep over the hyperplane arrangement of pattern differences.
For other settings a seeded sampling procedure gives a certified lower
bound on the count.  A Monte-Carlo estimate of the empirical Gaussian
complexity is compared against the closed-form bound

    R * Lam * sqrt((sqrt(2) - 1) + 2 ln |Theta|) / sqrt(m).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PatternBank
from .exceptions import InvalidParameterError, UnsupportedError
from .kernels import KernelSpec


@dataclass
class ComplexityParams:
    R: float       # max pattern feature norm
    lam: float     # hypothesis norm budget
    m: int
    Q: int
    ell: int

    def __post_init__(self):
        if min(self.R, self.lam) < 0 or min(self.m, self.Q, self.ell) < 1:
            raise InvalidParameterError("complexity parameters must be positive")


@dataclass
class ThetaCount:
    count: int
    method: str  # "exact-2d" | "sampled-lower-bound"


def _assignment(u: np.ndarray, patterns: np.ndarray) -> tuple:
    """argmax_j <u, x_i^(j)> per instance; ties break to the smallest j."""
    scores = patterns @ u  # (m, Q)
    return tuple(int(np.argmax(row)) for row in scores)


def count_theta_2d(bank: PatternBank) -> ThetaCount:
    """Exact number of distinct argmax assignments for 2-d linear patterns.

    Every pair of distinct patterns contributes a line through the
    origin where the direction's preference flips; evaluating one
    representative direction inside each angular sector between
    consecutive lines visits every assignment exactly once.
    """
    if bank.pattern_length != 2:
        raise UnsupportedError("exact enumeration is implemented for ell=2 only")
    pts = np.unique(bank.flat_patterns, axis=0)
    diffs = []
    for a in range(len(pts)):
        for b in range(a + 1, len(pts)):
            v = pts[a] - pts[b]
            if np.any(v != 0):
                diffs.append(v)
    # boundary angles where u is orthogonal to some difference vector
    boundaries = set()
    for v in diffs:
        phi = math.atan2(v[1], v[0])
        for shift in (math.pi / 2, -math.pi / 2):
            boundaries.add((phi + shift) % (2 * math.pi))
    if not boundaries:
        return ThetaCount(count=1, method="exact-2d")
    angles = sorted(boundaries)
    reps = []
    for a0, a1 in zip(angles, angles[1:] + [angles[0] + 2 * math.pi]):
        if a1 - a0 > 1e-12:
            reps.append((a0 + a1) / 2)
    thetas = {
        _assignment(np.array([math.cos(t), math.sin(t)]), bank.patterns)
        for t in reps
    }
    return ThetaCount(count=len(thetas), method="exact-2d")


def count_theta_sampled(bank: PatternBank, kernel: KernelSpec,
                        n_directions: int, seed: int = 0) -> ThetaCount:
    """Sampled lower bound on the number of distinct argmax assignments.

    Linear kernel: directions uniform on the sphere.  Monotone kernels
    (gaussian): candidate patterns sampled uniformly in the bank's
    bounding box, with the assignment given by the nearest pattern.
    """
    if n_directions < 1:
        raise InvalidParameterError("n_directions must be >= 1")
    rng = np.random.default_rng(seed)
    ell = bank.pattern_length
    thetas = set()
    if kernel.kind == "linear":
        for _ in range(n_directions):
            u = rng.normal(size=ell)
            norm = np.linalg.norm(u)
            if norm == 0:
                continue
            thetas.add(_assignment(u / norm, bank.patterns))
    else:
        lo = bank.flat_patterns.min(axis=0)
        hi = bank.flat_patterns.max(axis=0)
        for _ in range(n_directions):
            s = rng.uniform(lo, hi)
            d2 = ((bank.patterns - s) ** 2).sum(axis=2)  # (m, Q)
            thetas.add(tuple(int(np.argmin(row)) for row in d2))
    return ThetaCount(count=max(len(thetas), 1), method="sampled-lower-bound")


def gaussian_complexity_mc(patterns: np.ndarray, u_grid: np.ndarray,
                           trials: int, seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo empirical Gaussian complexity over a direction grid.

    ``patterns`` has shape (m, Q, ell) and ``u_grid`` shape (n_u, ell);
    the estimate is (1/m) E_sigma [ max_u sum_i sigma_i h_u(x_i) ] with
    standard-normal sigma, restricted to the grid (hence a lower bound
    of the true supremum in expectation).  Returns (estimate, standard
    error of the mean).
    """
    if trials < 1:
        raise InvalidParameterError("trials must be >= 1")
    patterns = np.asarray(patterns, dtype=float)
    u_grid = np.atleast_2d(np.asarray(u_grid, dtype=float))
    m = patterns.shape[0]
    # H[g, i] = h_{u_g}(x_i) = max_j <u_g, x_i^(j)>
    H = np.einsum("gl,iql->giq", u_grid, patterns).max(axis=2)
    rng = np.random.default_rng(seed)
    sup = np.empty(trials)
    chunk = max(1, min(trials, 10_000))
    done = 0
    while done < trials:
        n = min(chunk, trials - done)
        sigma = rng.standard_normal((n, m))
        sup[done:done + n] = (sigma @ H.T).max(axis=1)
        done += n
    estimate = float(sup.mean() / m)
    stderr = float(sup.std(ddof=1) / (m * math.sqrt(trials))) if trials > 1 else 0.0
    return estimate, stderr


def gaussian_complexity_bound(p: ComplexityParams, theta_count: int) -> float:
    """Closed-form Gaussian-complexity bound for a given assignment count."""
    if theta_count < 1:
        raise InvalidParameterError("theta count must be >= 1")
    return p.R * p.lam * math.sqrt((math.sqrt(2) - 1)
                                   + 2 * math.log(theta_count)) / math.sqrt(p.m)


def unit_circle_grid(n: int, lam: float = 1.0) -> np.ndarray:
    """Dense direction grid on the radius-``lam`` circle (2-d helpers)."""
    angles = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    return lam * np.stack([np.cos(angles), np.sin(angles)], axis=1)
