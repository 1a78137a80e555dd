"""Domain types: series, pattern banks, hypotheses and ensembles.

Patterns are length-``ell`` contiguous windows of a series; a series of
length L yields Q = L - ell + 1 of them.  A base hypothesis scores a
series by the maximum, over its windows, of a kernel expansion over the
training pattern bank.  Indices are 0-based internally and 1-based in
serialized formats.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .exceptions import (
    InvalidInputError,
    InvalidModelError,
    InvalidParameterError,
)
from .kernels import KernelSpec, gram_values


@dataclass(frozen=True)
class TimeSeries:
    """A univariate real-valued sequence with an opaque id."""

    values: np.ndarray
    id: str = ""

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or len(values) < 2:
            raise InvalidInputError(
                f"series must be 1-d with length >= 2, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidInputError(f"series {self.id!r} has non-finite values")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class LabeledInstance:
    series: TimeSeries
    label: int

    def __post_init__(self):
        if self.label not in (-1, 1):
            raise InvalidInputError(f"label must be -1 or +1, got {self.label}")


@dataclass(frozen=True)
class PatternBank:
    """All length-``ell`` windows of every training series.

    ``patterns`` has shape (m, Q, ell); entry (i, k) is the window of
    series i starting at offset k.  ``bank_id`` ties hypotheses to the
    bank they were trained on.
    """

    pattern_length: int
    patterns_per_instance: int
    patterns: np.ndarray
    bank_id: str = field(default_factory=lambda: uuid.uuid4().hex)

    @property
    def n_instances(self) -> int:
        return self.patterns.shape[0]

    @property
    def size(self) -> int:
        return self.patterns.shape[0] * self.patterns.shape[1]

    @property
    def flat_patterns(self) -> np.ndarray:
        """View of shape (m * Q, ell); flat index a = i * Q + k."""
        m, Q, ell = self.patterns.shape
        return self.patterns.reshape(m * Q, ell)

    def flat_index(self, i: int, k: int) -> int:
        return i * self.patterns_per_instance + k


def extract_patterns(instances, ell: int) -> PatternBank:
    """Slide a length-``ell`` window over every series of the sample.

    All series must share one length L; each contributes Q = L - ell + 1
    patterns.
    """
    if not instances:
        raise InvalidInputError("empty sample")
    if int(ell) != ell or ell < 1:
        raise InvalidParameterError(f"pattern length must be a positive integer, got {ell}")
    ell = int(ell)
    lengths = {len(inst.series) for inst in instances}
    if len(lengths) != 1:
        raise InvalidInputError(f"ragged series lengths {sorted(lengths)}; "
                                "all series must have equal length")
    L = lengths.pop()
    if ell > L:
        raise InvalidParameterError(f"pattern length {ell} exceeds series length {L}")
    rows = np.stack([inst.series.values for inst in instances])
    windows = sliding_window_view(rows, ell, axis=1)  # (m, Q, ell)
    return PatternBank(
        pattern_length=ell,
        patterns_per_instance=L - ell + 1,
        patterns=np.ascontiguousarray(windows, dtype=float),
    )


@dataclass
class BaseHypothesis:
    """Kernel expansion over a pattern bank.

    ``alpha`` is a dense vector over the flat (i, k) index space; most
    entries are zero in practice.  The hypothesis value on a series x is
    max over windows x^(j) of sum_a alpha_a K(pattern_a, x^(j)).
    """

    alpha: np.ndarray
    bank_ref: str
    kernel: KernelSpec

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float).ravel()

    def nonzero_entries(self, bank: PatternBank) -> dict[tuple[int, int], float]:
        """Sparse view {(i, k): alpha_ik} over the nonzero support."""
        Q = bank.patterns_per_instance
        return {(a // Q, a % Q): float(v)
                for a, v in zip(*_nonzero(self.alpha))}


def _nonzero(alpha):
    idx = np.flatnonzero(alpha)
    return idx, alpha[idx]


@dataclass
class Ensemble:
    """Convex combination of base hypotheses sharing one pattern bank."""

    terms: list[tuple[float, BaseHypothesis]]
    hyper_params: dict


@dataclass
class Distribution:
    """Dual weights over training examples, box-capped at 1/(nu*m)."""

    weights: np.ndarray
    nu: float

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).ravel()

    def validate(self, tol: float = 1e-8) -> None:
        m = len(self.weights)
        cap = 1.0 / (self.nu * m)
        if np.any(self.weights < -tol) or np.any(self.weights > cap + tol):
            raise InvalidInputError("distribution violates box constraints")
        if abs(self.weights.sum() - 1.0) > tol:
            raise InvalidInputError("distribution weights must sum to 1")


def series_windows(x, ell: int) -> np.ndarray:
    """Length-``ell`` windows of a single series, shape (Q_x, ell)."""
    values = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    if len(values) < ell:
        raise InvalidInputError(
            f"series of length {len(values)} shorter than pattern length {ell}")
    return sliding_window_view(values, ell)


def eval_base(h: BaseHypothesis, bank: PatternBank, x) -> float:
    """Score of a base hypothesis on one series.

    Returns max over windows j of sum_a alpha_a K(pattern_a, x^(j)).
    The zero expansion scores 0 on every input.
    """
    if h.bank_ref != bank.bank_id:
        raise InvalidInputError("hypothesis is bound to a different pattern bank")
    idx, coef = _nonzero(h.alpha)
    if len(idx) == 0:
        return 0.0
    windows = series_windows(x, bank.pattern_length)
    K = gram_values(h.kernel, bank.flat_patterns[idx], windows)
    return float(np.max(coef @ K))


def eval_ensemble(g: Ensemble, bank: PatternBank, x) -> tuple[float, int]:
    """Weighted ensemble score and the sign prediction (sign(0) = +1)."""
    if not g.terms:
        raise InvalidModelError("empty ensemble")
    score = sum(w * eval_base(h, bank, x) for w, h in g.terms)
    return float(score), (1 if score >= 0 else -1)
