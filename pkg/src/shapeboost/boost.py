"""Totally-corrective boosting master loop with column generation.

Each round solves, over the hypotheses collected so far, the restricted
soft-margin dual

    min gamma  s.t.  sum_i y_i d_i h_j(x_i) <= gamma  for all j,
                     0 <= d_i <= 1/(nu*m),  sum_i d_i = 1,

and feeds the new distribution to the weak learner.  The primal ensemble
weights are the dual multipliers of the hypothesis rows; the loop stops
once the newest hypothesis no longer beats the current gamma by more
than ``stop_eps``, or after ``max_rounds``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .core import BaseHypothesis, Distribution, Ensemble, PatternBank
from .exceptions import InternalError, InvalidInputError, InvalidParameterError
from .kernels import GramTensor
from .lp import LinearProgram, dump_lp, solve_lp
from .weak import WeakLearnConfig, scores_on_bank, weak_learn

GAMMA_MONOTONE_TOL = 1e-7
DISTRIBUTION_TOL = 1e-8
WEIGHT_SUM_TOL = 1e-6
PRIMAL_DUAL_TOL = 1e-5
PRUNE_WEIGHT_TOL = 1e-9


@dataclass
class BoostConfig:
    nu: float = 0.1
    max_rounds: int = 100
    stop_eps: float = 1e-4
    weak: WeakLearnConfig = field(default_factory=WeakLearnConfig)

    def __post_init__(self):
        if not 0 < self.nu <= 1:
            raise InvalidParameterError(f"nu must be in (0, 1], got {self.nu}")
        if self.max_rounds < 1:
            raise InvalidParameterError("max_rounds must be >= 1")
        if self.stop_eps < 0:
            raise InvalidParameterError("stop_eps must be nonnegative")


@dataclass
class RoundRecord:
    round: int
    gamma: float
    edge: float
    dual_feas_violation: float
    n_nonzero_d: int
    wall_ms: float


@dataclass
class BoostTrace:
    records: list[RoundRecord] = field(default_factory=list)
    margin: float = np.nan          # rho, the multiplier of sum d = 1
    primal_dual_gap: float = np.nan
    stopped_early: bool = False

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("round,gamma,edge,nonzero_d_count,wall_ms\n")
            for r in self.records:
                fh.write(f"{r.round},{r.gamma!r},{r.edge!r},"
                         f"{r.n_nonzero_d},{r.wall_ms:.3f}\n")


def edge(h: BaseHypothesis, d: Distribution, labels, bank: PatternBank,
         instances=None, eval_scores=None) -> float:
    """sum_i y_i d_i h(x_i).

    Scores are taken from ``eval_scores`` when given (the training loop
    computes them from the Gram tensor); otherwise the hypothesis is
    evaluated on ``instances`` directly.
    """
    labels = np.asarray(labels, dtype=int)
    if eval_scores is None:
        if instances is None:
            raise InvalidInputError("edge() needs instances or eval_scores")
        from .core import eval_base
        eval_scores = [eval_base(h, bank, x) for x in instances]
    return float(np.sum(labels * d.weights * np.asarray(eval_scores)))


def restricted_dual(score_matrix: np.ndarray, labels, nu: float,
                    debug_dump: str | None = None):
    """Solve the restricted dual over the collected hypotheses.

    ``score_matrix[j, i]`` is h_j(x_i).  Returns (Distribution, gamma,
    weights w over hypotheses, rho).
    """
    H = np.atleast_2d(np.asarray(score_matrix, dtype=float))
    labels = np.asarray(labels, dtype=int)
    t, m = H.shape
    if t == 0:
        raise InvalidInputError("restricted dual needs at least one hypothesis")
    cap = 1.0 / (nu * m)
    # variables: d_1..d_m, gamma
    c = np.zeros(m + 1)
    c[-1] = 1.0
    A_ub = np.hstack([H * labels, -np.ones((t, 1))])
    A_eq = np.zeros((1, m + 1))
    A_eq[0, :m] = 1.0
    lp = LinearProgram(c=c, A_ub=A_ub, b_ub=np.zeros(t),
                       A_eq=A_eq, b_eq=np.array([1.0]),
                       bounds=[(0, cap)] * m + [(None, None)])
    sol = solve_lp(lp)
    if sol.status != "optimal":
        if debug_dump:
            dump_lp(lp, debug_dump)
        raise InternalError(
            f"restricted dual reported {sol.status}; it is always feasible "
            f"and bounded, this indicates a solver bug"
            + (f" (LP dumped to {debug_dump})" if debug_dump else ""))
    d = Distribution(weights=sol.x[:m], nu=nu)
    gamma = float(sol.x[-1])
    w = sol.dual_ineq.copy()
    rho = float(sol.dual_eq[0])
    if abs(w.sum() - 1.0) > WEIGHT_SUM_TOL:
        raise InternalError(f"hypothesis weights sum to {w.sum()}, expected 1")
    return d, gamma, w, rho


def train(labels, bank: PatternBank, gram: GramTensor,
          cfg: BoostConfig) -> tuple[Ensemble, BoostTrace]:
    """Run the boosting loop on a training sample.

    ``labels`` are the +-1 labels of the instances underlying ``bank``;
    hypothesis scores during training are computed directly from the
    Gram tensor.
    """
    labels = np.asarray(labels, dtype=int)
    m = len(labels)
    if m < 2 or not (np.any(labels > 0) and np.any(labels < 0)):
        raise InvalidInputError("training needs >= 2 examples with both labels")
    Q = bank.patterns_per_instance

    d = Distribution(weights=np.full(m, 1.0 / m), nu=cfg.nu)
    hypotheses: list[BaseHypothesis] = []
    scores: list[np.ndarray] = []
    trace = BoostTrace()
    gamma = -np.inf
    w = np.array([])
    rho = np.nan

    for t in range(1, cfg.max_rounds + 1):
        start = time.perf_counter()
        h, _ = weak_learn(labels, d, gram, bank, cfg.weak)
        h_scores = scores_on_bank(h.alpha, gram, m, Q)
        edge_t = float(np.sum(labels * d.weights * h_scores))
        if edge_t <= gamma + cfg.stop_eps:
            trace.stopped_early = True
            break
        hypotheses.append(h)
        scores.append(h_scores)
        d, new_gamma, w, rho = restricted_dual(np.vstack(scores), labels, cfg.nu)
        d.validate(DISTRIBUTION_TOL)
        # each round adds one dual constraint, so the minimum cannot drop
        if np.isfinite(gamma) and new_gamma < gamma - GAMMA_MONOTONE_TOL:
            raise InternalError(
                f"gamma decreased from {gamma} to {new_gamma}")
        gamma = new_gamma
        dual_violation = max(0.0, float(np.max(
            np.vstack(scores) @ (labels * d.weights) - gamma)))
        trace.records.append(RoundRecord(
            round=t, gamma=gamma, edge=edge_t,
            dual_feas_violation=dual_violation,
            n_nonzero_d=int(np.count_nonzero(d.weights > DISTRIBUTION_TOL)),
            wall_ms=(time.perf_counter() - start) * 1e3))

    if not hypotheses:
        raise InternalError("no hypothesis cleared the stopping threshold")

    trace.margin = rho
    trace.primal_dual_gap = _primal_dual_gap(
        np.vstack(scores), labels, w, rho, cfg.nu, gamma)
    if trace.primal_dual_gap > PRIMAL_DUAL_TOL:
        raise InternalError(
            f"primal-dual gap {trace.primal_dual_gap} exceeds tolerance")

    terms = [(float(wj), h) for wj, h in zip(w, hypotheses)
             if wj > PRUNE_WEIGHT_TOL]
    ensemble = Ensemble(terms=terms, hyper_params={
        "ell": bank.pattern_length, "nu": cfg.nu, "lam": cfg.weak.lam,
        "kernel": gram.spec.kind, "sigma": gram.spec.sigma,
    })
    return ensemble, trace


def _primal_dual_gap(score_matrix, labels, w, rho, nu, gamma) -> float:
    """|primal soft-margin objective - gamma| at the returned solution.

    The primal objective is rho - 1/(nu*m) * sum_i max(0, rho - y_i g(x_i));
    at optimality, LP duality makes it coincide with gamma.
    """
    m = score_matrix.shape[1]
    g = w @ score_matrix
    xi = np.maximum(0.0, rho - labels * g)
    primal = rho - xi.sum() / (nu * m)
    return float(abs(primal - gamma))
