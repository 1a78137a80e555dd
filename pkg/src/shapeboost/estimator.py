"""Scikit-learn style classifier wrapping the boosting pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array, check_X_y

from .boost import BoostConfig, train
from .core import LabeledInstance, TimeSeries, eval_ensemble, extract_patterns
from .exceptions import InvalidParameterError
from .kernels import DEFAULT_SIGMA_GRID, KernelSpec, gram_bank, select_sigma
from .weak import WeakLearnConfig


class ShapeletBoostClassifier(BaseEstimator, ClassifierMixin):
    """Binary time-series classifier built from boosted kernel patterns.

    Each weak hypothesis scores a series by the best kernel similarity
    between a learned sparse combination of training subsequences and
    any window of the series; an LP-based boosting loop combines them
    into a sparse convex ensemble.

    Parameters
    ----------
    ell : int or None
        Window length.  When None it is derived as
        ``round(length_frac * L)`` clamped to [2, L].
    length_frac : float
        Window length as a fraction of the series length (used when
        ``ell`` is None).
    nu : float
        Soft-margin parameter in (0, 1]; caps each dual weight at
        1/(nu*m).
    lam : float
        Norm budget of each weak hypothesis' coefficient vector.
    kernel : str
        "gaussian" or "linear".
    sigma : float or None
        Gaussian bandwidth; when None it is picked from ``sigma_grid``
        by maximizing the variance of the Gram entries.
    max_rounds, stop_eps : boosting iteration cap and early-stop slack.
    dc_max_iter, dc_eps : weak-learner iteration cap and convergence gap.
    init_mode : "coordinate" or "seeded-random" weak-learner start.
    norm_mode : "l1" or "l2-quadratic" hypothesis norm constraint.
    random_state : seed for all stochastic choices.

    Attributes
    ----------
    classes_ : original class labels; the smaller one plays +1.
    ell_, sigma_ : resolved window length and bandwidth.
    bank_ : training pattern bank backing the ensemble.
    ensemble_ : the trained convex combination.
    trace_ : per-round booster diagnostics.
    """

    def __init__(self, ell=None, length_frac=0.1, nu=0.1, lam=1.0,
                 kernel="gaussian", sigma=None, sigma_grid=None,
                 max_rounds=100, stop_eps=1e-4, dc_max_iter=10, dc_eps=1e-6,
                 init_mode="coordinate", norm_mode="l1", random_state=0):
        self.ell = ell
        self.length_frac = length_frac
        self.nu = nu
        self.lam = lam
        self.kernel = kernel
        self.sigma = sigma
        self.sigma_grid = sigma_grid
        self.max_rounds = max_rounds
        self.stop_eps = stop_eps
        self.dc_max_iter = dc_max_iter
        self.dc_eps = dc_eps
        self.init_mode = init_mode
        self.norm_mode = norm_mode
        self.random_state = random_state

    def _resolve_ell(self, L: int) -> int:
        if self.ell is not None:
            return int(self.ell)
        if not 0 < self.length_frac <= 1:
            raise InvalidParameterError(
                f"length_frac must be in (0, 1], got {self.length_frac}")
        return int(np.clip(round(self.length_frac * L), 2, L))

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        classes = np.unique(y)
        if len(classes) != 2:
            raise InvalidParameterError(
                f"binary classifier needs exactly 2 classes, got {len(classes)}")
        self.classes_ = classes
        signs = np.where(y == classes[0], 1, -1)

        L = X.shape[1]
        self.ell_ = self._resolve_ell(L)
        instances = [LabeledInstance(TimeSeries(row, id=str(i)), int(s))
                     for i, (row, s) in enumerate(zip(X, signs))]
        self.bank_ = extract_patterns(instances, self.ell_)

        if self.kernel == "gaussian" and self.sigma is None:
            grid = self.sigma_grid or DEFAULT_SIGMA_GRID
            self.sigma_ = select_sigma(self.bank_, grid, seed=self.random_state)
        else:
            self.sigma_ = self.sigma
        spec = (KernelSpec("gaussian", sigma=self.sigma_)
                if self.kernel == "gaussian" else KernelSpec("linear"))

        gram = gram_bank(spec, self.bank_)
        cfg = BoostConfig(
            nu=self.nu, max_rounds=self.max_rounds, stop_eps=self.stop_eps,
            weak=WeakLearnConfig(
                lam=self.lam, epsilon=self.dc_eps, max_dc_iter=self.dc_max_iter,
                norm_mode=self.norm_mode, init_mode=self.init_mode,
                seed=self.random_state))
        self.ensemble_, self.trace_ = train(signs, self.bank_, gram, cfg)
        return self

    def _check_fitted(self):
        if not hasattr(self, "ensemble_"):
            raise NotFittedError("call fit before predict")

    def decision_function(self, X):
        self._check_fitted()
        X = check_array(X, dtype=float)
        return np.array([eval_ensemble(self.ensemble_, self.bank_, row)[0]
                         for row in X])

    def predict(self, X):
        scores = self.decision_function(X)
        return np.where(scores >= 0, self.classes_[0], self.classes_[1])
