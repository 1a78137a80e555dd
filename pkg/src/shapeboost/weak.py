"""Weak learner: best kernel-expansion hypothesis for a given distribution.

The weak-learning objective is minimized by alternating two steps:
fix, for every positive example, the window attaining its current max
score (the assignment step), then solve the resulting linear program in
the expansion coefficients (the convex step).  The achieved objective is
nonincreasing across iterations and the loop stops once the improvement
drops below ``epsilon`` or after ``max_dc_iter`` rounds.

With the default 1-norm budget the convex step is a plain LP over the
split coefficients; the quadratic-norm mode solves the same LP and then
rescales the result onto the quadratic boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .core import BaseHypothesis, Distribution, PatternBank
from .exceptions import InternalError, InvalidInputError, InvalidParameterError
from .kernels import GramTensor
from .lp import LinearProgram, solve_lp

DESCENT_TOL = 1e-7
_ROW_VIOLATION_TOL = 1e-9


@dataclass
class WeakLearnConfig:
    lam: float = 1.0
    epsilon: float = 1e-6
    max_dc_iter: int = 10
    norm_mode: str = "l1"            # "l1" | "l2-quadratic"
    init_mode: str = "coordinate"    # "coordinate" | "seeded-random"
    seed: int = 0
    # Negative-example constraints are added lazily: the LP is re-solved
    # with the violated rows until none remain, which reaches the same
    # optimum as building all rows up front.
    lazy_constraints: bool = True

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidParameterError("epsilon must be positive")
        if self.max_dc_iter < 1:
            raise InvalidParameterError("max_dc_iter must be >= 1")
        if self.lam < 0:
            raise InvalidParameterError("norm budget must be nonnegative")
        if self.norm_mode not in ("l1", "l2-quadratic"):
            raise InvalidParameterError(f"unknown norm mode {self.norm_mode!r}")
        if self.init_mode not in ("coordinate", "seeded-random"):
            raise InvalidParameterError(f"unknown init mode {self.init_mode!r}")


def scores_on_bank(alpha: np.ndarray, gram: GramTensor, m: int, Q: int) -> np.ndarray:
    """Hypothesis value on every training instance: max_j (alpha @ G)_{i,j}."""
    return (alpha @ gram.values).reshape(m, Q).max(axis=1)


def argmax_assignment(alpha: np.ndarray, gram: GramTensor, positives,
                      Q: int) -> dict[int, int]:
    """Best window per positive example under the current coefficients.

    Ties break toward the smallest offset.
    """
    positives = np.asarray(positives, dtype=int)
    if len(positives) == 0:
        raise InvalidInputError("sample contains no positive examples")
    alpha = np.asarray(alpha, dtype=float).ravel()
    if len(alpha) != gram.values.shape[0]:
        raise InvalidInputError("alpha does not match the bank index space")
    s = alpha @ gram.values
    out = {}
    for p in positives:
        out[int(p)] = int(np.argmax(s[p * Q:(p + 1) * Q]))
    return out


def dc_subproblem(gram: GramTensor, d: Distribution, labels, jstar: dict,
                  cfg: WeakLearnConfig,
                  warm_alpha: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Convex step: optimal coefficients for a fixed positive assignment.

    Minimizes
        - sum_{p pos} d_p (G alpha)_{p, jstar_p} + sum_{q neg} d_q lambda_q
    subject to (G alpha)_{q, j} <= lambda_q for every negative q and
    offset j, and ||alpha||_1 <= lam (split into nonnegative halves).
    Returns the coefficient vector and the achieved objective.
    """
    labels = np.asarray(labels, dtype=int)
    weights = d.weights
    G = gram.values
    nA = G.shape[0]
    Q = nA // len(labels)
    pos = np.flatnonzero(labels > 0)
    neg = np.flatnonzero(labels < 0)
    if any(p not in jstar for p in pos):
        raise InvalidInputError("assignment must cover every positive example")
    if cfg.lam == 0.0:
        return np.zeros(nA), 0.0

    c_alpha = np.zeros(nA)
    for p in pos:
        c_alpha -= weights[p] * G[p * Q + jstar[int(p)], :]

    n_neg = len(neg)
    neg_rows_all = (neg[:, None] * Q + np.arange(Q)).ravel()  # flat (q, j) ids

    if cfg.lazy_constraints and n_neg:
        active = _initial_active_rows(warm_alpha, G, neg, Q)
    else:
        active = list(neg_rows_all)

    while True:
        alpha, lam_vals, objective = _solve_restricted(
            G, c_alpha, weights, neg, active, Q, cfg.lam)
        if not n_neg:
            break
        s = alpha @ G
        worst = s[neg_rows_all].reshape(n_neg, Q)
        violation = worst.max(axis=1) - lam_vals
        if np.all(violation <= _ROW_VIOLATION_TOL):
            break
        # add the most violated offset of each violating negative
        for qi in np.flatnonzero(violation > _ROW_VIOLATION_TOL):
            row = int(neg[qi] * Q + np.argmax(worst[qi]))
            if row not in active:
                active.append(row)
    return alpha, float(objective)


def _initial_active_rows(warm_alpha, G, neg, Q):
    """Seed row generation with each negative's current best offset."""
    if warm_alpha is None or not np.any(warm_alpha):
        return [int(q * Q) for q in neg]
    s = warm_alpha @ G
    return [int(q * Q + np.argmax(s[q * Q:(q + 1) * Q])) for q in neg]


def _solve_restricted(G, c_alpha, weights, neg, active_rows, Q, lam):
    """LP over split coefficients with the given negative-constraint rows."""
    nA = G.shape[0]
    n_neg = len(neg)
    neg_pos = {int(q): qi for qi, q in enumerate(neg)}
    n_rows = len(active_rows)
    A_neg = G[active_rows, :]
    lam_col = np.zeros((n_rows, n_neg))
    for r, row in enumerate(active_rows):
        lam_col[r, neg_pos[row // Q]] = -1.0
    A_ub = sp.vstack([
        sp.hstack([sp.csr_matrix(A_neg), sp.csr_matrix(-A_neg),
                   sp.csr_matrix(lam_col)], format="csr"),
        sp.hstack([sp.csr_matrix(np.ones((1, 2 * nA))),
                   sp.csr_matrix((1, n_neg))], format="csr"),
    ], format="csr")
    b_ub = np.zeros(n_rows + 1)
    b_ub[-1] = lam
    c = np.concatenate([c_alpha, -c_alpha, weights[neg]])
    bounds = [(0, None)] * (2 * nA) + [(None, None)] * n_neg
    sol = solve_lp(LinearProgram(c=c, A_ub=A_ub, b_ub=b_ub, bounds=bounds))
    if sol.status != "optimal":
        raise InternalError(
            f"weak-learner subproblem reported {sol.status}; "
            "the zero expansion is always feasible, this is a solver bug")
    alpha = sol.x[:nA] - sol.x[nA:2 * nA]
    lam_vals = sol.x[2 * nA:]
    return alpha, lam_vals, sol.objective


def _coordinate_init(gram, d, labels, Q, lam) -> np.ndarray:
    """Mass lam on the single signed coordinate with the largest edge."""
    m = len(labels)
    M = gram.values.reshape(gram.values.shape[0], m, Q)
    hi = M.max(axis=2)   # (nA, m): per-coordinate positive-direction score
    lo = M.min(axis=2)
    yd = labels * d.weights
    edge_plus = hi @ yd
    edge_minus = -(lo @ yd)
    alpha = np.zeros(gram.values.shape[0])
    if edge_plus.max() >= edge_minus.max():
        alpha[int(np.argmax(edge_plus))] = lam
    else:
        alpha[int(np.argmax(edge_minus))] = -lam
    return alpha


def _random_init(n, lam, seed) -> np.ndarray:
    rng = np.random.default_rng(seed)
    alpha = rng.dirichlet(np.ones(n)) * rng.choice([-1.0, 1.0], size=n)
    return alpha * lam


def weak_learn(labels, d: Distribution, gram: GramTensor, bank: PatternBank,
               cfg: WeakLearnConfig) -> tuple[BaseHypothesis, list[float]]:
    """Alternate assignment and convex steps until the objective settles.

    Returns the hypothesis and the per-iteration objective values, which
    are nonincreasing (a breach raises ``InternalError``).
    """
    labels = np.asarray(labels, dtype=int)
    d.validate()
    if not (np.any(labels > 0) and np.any(labels < 0)):
        raise InvalidInputError("sample must contain both labels")
    m = len(labels)
    Q = bank.patterns_per_instance
    positives = np.flatnonzero(labels > 0)

    if cfg.init_mode == "coordinate":
        alpha = _coordinate_init(gram, d, labels, Q, cfg.lam)
    else:
        alpha = _random_init(gram.values.shape[0], cfg.lam, cfg.seed)

    f_prev = np.inf
    trace: list[float] = []
    for _ in range(cfg.max_dc_iter):
        jstar = argmax_assignment(alpha, gram, positives, Q)
        alpha, f = dc_subproblem(gram, d, labels, jstar, cfg, warm_alpha=alpha)
        if f > f_prev + DESCENT_TOL:
            raise InternalError(
                f"weak-learner objective increased: {f_prev} -> {f}")
        trace.append(f)
        if f_prev - f <= cfg.epsilon:
            break
        f_prev = f

    if cfg.norm_mode == "l2-quadratic":
        quad = float(alpha @ gram.values @ alpha)
        if quad > 0:
            alpha = alpha * (cfg.lam / np.sqrt(quad))

    return BaseHypothesis(alpha=alpha, bank_ref=bank.bank_id,
                          kernel=gram.spec), trace
