"""Grid search, full-dataset training and evaluation used by the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .boost import BoostConfig, train
from .core import PatternBank, eval_ensemble, extract_patterns
from .data import Dataset, stratified_kfold
from .exceptions import InvalidParameterError
from .kernels import (
    DEFAULT_SIGMA_GRID,
    GramTensor,
    KernelSpec,
    gram_bank,
    select_sigma,
)
from .modelio import ModelFile, model_from_ensemble
from .weak import WeakLearnConfig

DEFAULT_LENGTH_FRACTIONS = (0.1, 0.2, 0.3, 0.4)
DEFAULT_NU_GRID = (0.2, 0.15, 0.1)


@dataclass
class GridSpec:
    length_fractions: tuple = DEFAULT_LENGTH_FRACTIONS
    nu_grid: tuple = DEFAULT_NU_GRID
    folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if not self.length_fractions or not self.nu_grid:
            raise InvalidParameterError("grid must be nonempty")
        if any(not 0 < f <= 1 for f in self.length_fractions):
            raise InvalidParameterError("length fractions must lie in (0, 1]")
        if any(not 0 < nu <= 1 for nu in self.nu_grid):
            raise InvalidParameterError("nu values must lie in (0, 1]")


@dataclass
class GridCell:
    length_frac: float
    ell: int
    nu: float
    sigma: float | None
    mean_accuracy: float
    fold_accuracies: list = field(default_factory=list)


@dataclass
class GridResult:
    cells: list[GridCell]
    best_ell: int
    best_nu: float
    best_sigma: float | None

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("length_frac,ell,nu,sigma,mean_accuracy\n")
            for c in self.cells:
                fh.write(f"{c.length_frac},{c.ell},{c.nu},{c.sigma},"
                         f"{c.mean_accuracy!r}\n")


def resolve_ell(frac: float, L: int) -> int:
    """Window length from a fraction of L, clamped to [2, L]."""
    return int(np.clip(round(frac * L), 2, L))


def _sub_bank(bank: PatternBank, gram: GramTensor, indices):
    """Pattern bank and Gram tensor restricted to a subset of instances."""
    indices = np.asarray(indices, dtype=int)
    Q = bank.patterns_per_instance
    sub = PatternBank(pattern_length=bank.pattern_length,
                      patterns_per_instance=Q,
                      patterns=bank.patterns[indices])
    flat = (indices[:, None] * Q + np.arange(Q)).ravel()
    sub_gram = GramTensor(values=gram.values[np.ix_(flat, flat)],
                          spec=gram.spec, symmetric=True)
    return sub, sub_gram


def _boost_config(nu, lam, max_rounds, stop_eps, dc_max_iter, dc_eps, seed):
    return BoostConfig(
        nu=nu, max_rounds=max_rounds, stop_eps=stop_eps,
        weak=WeakLearnConfig(lam=lam, epsilon=dc_eps, max_dc_iter=dc_max_iter,
                             seed=seed))


def grid_search(ds: Dataset, grid: GridSpec, lam: float = 1.0,
                max_rounds: int = 100, stop_eps: float = 1e-4,
                dc_max_iter: int = 10, dc_eps: float = 1e-6,
                kernel: str = "gaussian",
                sigma_grid=DEFAULT_SIGMA_GRID) -> GridResult:
    """Cross-validated accuracy over the (window length, nu) grid.

    For each window length, sigma is chosen once on the full training
    bank; folds reuse slices of one precomputed Gram tensor.  Ties for
    the best cell break toward the smaller window, then the larger nu.
    """
    L = ds.series_length
    labels = ds.labels
    folds = stratified_kfold(ds, grid.folds, grid.seed)
    cells = []
    for frac in grid.length_fractions:
        ell = resolve_ell(frac, L)
        bank = extract_patterns(ds.instances, ell)
        if kernel == "gaussian":
            sigma = select_sigma(bank, sigma_grid, seed=grid.seed)
            spec = KernelSpec("gaussian", sigma=sigma)
        else:
            sigma, spec = None, KernelSpec("linear")
        gram = gram_bank(spec, bank)
        for nu in grid.nu_grid:
            accs = []
            for train_idx, val_idx in folds:
                sub, sub_gram = _sub_bank(bank, gram, train_idx)
                cfg = _boost_config(nu, lam, max_rounds, stop_eps,
                                    dc_max_iter, dc_eps, grid.seed)
                ensemble, _ = train(labels[train_idx], sub, sub_gram, cfg)
                correct = sum(
                    eval_ensemble(ensemble, sub, ds.instances[i].series)[1]
                    == labels[i]
                    for i in val_idx)
                accs.append(correct / len(val_idx))
            cells.append(GridCell(length_frac=frac, ell=ell, nu=nu,
                                  sigma=sigma,
                                  mean_accuracy=float(np.mean(accs)),
                                  fold_accuracies=accs))
    best = max(cells, key=lambda c: (c.mean_accuracy, -c.ell, c.nu))
    return GridResult(cells=cells, best_ell=best.ell, best_nu=best.nu,
                      best_sigma=best.sigma)


def fit_dataset(ds: Dataset, ell: int, nu: float, lam: float = 1.0,
                max_rounds: int = 100, stop_eps: float = 1e-4,
                dc_max_iter: int = 10, dc_eps: float = 1e-6,
                kernel: str = "gaussian", sigma: float | None = None,
                sigma_grid=DEFAULT_SIGMA_GRID, seed: int = 0,
                created_at: str = ""):
    """Train on the full dataset and freeze the result into a model file."""
    bank = extract_patterns(ds.instances, ell)
    if kernel == "gaussian" and sigma is None:
        sigma = select_sigma(bank, sigma_grid, seed=seed)
    spec = (KernelSpec("gaussian", sigma=sigma) if kernel == "gaussian"
            else KernelSpec("linear"))
    gram = gram_bank(spec, bank)
    cfg = _boost_config(nu, lam, max_rounds, stop_eps, dc_max_iter, dc_eps, seed)
    ensemble, trace = train(ds.labels, bank, gram, cfg)
    model = model_from_ensemble(ensemble, bank, label_map=ds.label_map,
                                dataset_name=ds.name, seed=seed,
                                created_at=created_at)
    return model, trace


def evaluate_model(model: ModelFile, ds: Dataset) -> float:
    """Fraction of instances whose predicted sign matches the label."""
    correct = sum(model.predict(inst.series) == inst.label
                  for inst in ds.instances)
    return correct / len(ds)
