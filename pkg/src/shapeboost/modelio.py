"""Self-contained JSON model files, sparsity statistics and pattern reports.

A model file stores everything prediction needs: hyper-parameters, the
weighted sparse coefficient entries of each ensemble term, and the raw
pattern vectors referenced by any nonzero coefficient.  Indices (i, k)
are serialized 1-based.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import TimeSeries, series_windows
from .exceptions import InvalidInputError, InvalidModelError
from .kernels import KernelSpec, gram_values

MODEL_FORMAT_VERSION = 1


@dataclass
class ModelFile:
    """Serialized ensemble: hyper-parameters, terms, and pattern payload."""

    ell: int
    nu: float
    lam: float
    kernel: KernelSpec
    n_train: int                 # m of the training sample
    patterns_per_instance: int   # Q of the training sample
    train_length: int            # L of the training series
    terms: list                  # [{"weight": w, "entries": [[i, k, alpha], ...]}]
    patterns: dict               # {"i,k": [floats]} for every referenced (i, k)
    label_map: dict = field(default_factory=dict)
    dataset_name: str = ""
    seed: int = 0
    created_at: str = ""         # informational only; excluded from identity

    def validate(self) -> None:
        if not self.terms:
            raise InvalidModelError("model has no terms")
        for term in self.terms:
            for i, k, _ in term["entries"]:
                if _pattern_key(i, k) not in self.patterns:
                    raise InvalidModelError(
                        f"model is not self-contained: pattern ({i},{k}) missing")

    # -- prediction ---------------------------------------------------

    def decision_function(self, x) -> float:
        """Ensemble score of one series from the stored expansion."""
        values = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
        if len(values) < self.ell:
            raise InvalidInputError(
                f"series length {len(values)} < pattern length {self.ell}")
        windows = series_windows(values, self.ell)
        score = 0.0
        for term in self.terms:
            if not term["entries"]:
                continue
            pats = np.array([self.patterns[_pattern_key(i, k)]
                             for i, k, _ in term["entries"]])
            coef = np.array([a for _, _, a in term["entries"]])
            K = gram_values(self.kernel, pats, windows)
            score += term["weight"] * float(np.max(coef @ K))
        return score

    def predict(self, x) -> int:
        return 1 if self.decision_function(x) >= 0 else -1


def _pattern_key(i: int, k: int) -> str:
    return f"{i},{k}"


def model_from_ensemble(ensemble, bank, label_map=None, dataset_name="",
                        seed=0, created_at="") -> ModelFile:
    """Freeze a trained ensemble into a self-contained model object."""
    Q = bank.patterns_per_instance
    terms = []
    patterns = {}
    for w, h in ensemble.terms:
        entries = []
        for (i, k), a in sorted(h.nonzero_entries(bank).items()):
            i, k = int(i), int(k)
            entries.append([i + 1, k + 1, float(a)])  # 1-based on disk
            patterns.setdefault(_pattern_key(i + 1, k + 1),
                                [float(v) for v in bank.patterns[i, k]])
        terms.append({"weight": float(w), "entries": entries})
    hp = ensemble.hyper_params
    kernel = (KernelSpec("gaussian", sigma=hp["sigma"])
              if hp["kernel"] == "gaussian" else KernelSpec("linear"))
    model = ModelFile(
        ell=bank.pattern_length, nu=hp["nu"], lam=hp["lam"], kernel=kernel,
        n_train=bank.n_instances, patterns_per_instance=Q,
        train_length=bank.pattern_length + Q - 1,
        terms=terms, patterns=patterns,
        label_map=dict(label_map or {}), dataset_name=dataset_name,
        seed=seed, created_at=created_at)
    model.validate()
    return model


def save_model(model: ModelFile, path) -> None:
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "hyper_params": {
            "ell": model.ell, "nu": model.nu, "lam": model.lam,
            "kernel": model.kernel.kind, "sigma": model.kernel.sigma,
        },
        "shape": {
            "n_train": model.n_train,
            "patterns_per_instance": model.patterns_per_instance,
            "train_length": model.train_length,
        },
        "terms": model.terms,
        "patterns": model.patterns,
        "provenance": {
            "dataset": model.dataset_name,
            "label_map": model.label_map,
            "seed": model.seed,
            "created_at": model.created_at,
        },
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path) -> ModelFile:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise InvalidModelError(
            f"unsupported model format version {payload.get('format_version')}")
    hp = payload["hyper_params"]
    kernel = (KernelSpec("gaussian", sigma=hp["sigma"])
              if hp["kernel"] == "gaussian" else KernelSpec("linear"))
    shape = payload["shape"]
    prov = payload.get("provenance", {})
    model = ModelFile(
        ell=int(hp["ell"]), nu=hp["nu"], lam=hp["lam"], kernel=kernel,
        n_train=int(shape["n_train"]),
        patterns_per_instance=int(shape["patterns_per_instance"]),
        train_length=int(shape["train_length"]),
        terms=payload["terms"], patterns=payload["patterns"],
        label_map=prov.get("label_map", {}),
        dataset_name=prov.get("dataset", ""),
        seed=prov.get("seed", 0),
        created_at=prov.get("created_at", ""))
    model.validate()
    return model


@dataclass
class SparsityReport:
    active_terms: int
    nonzero_alpha: int
    denominator: int
    percent: float


def sparsity_report(model: ModelFile) -> SparsityReport:
    """Count active terms and nonzero coefficients of a model."""
    active = [t for t in model.terms if t["weight"] != 0.0]
    if not active:
        raise InvalidModelError("model has no active terms")
    nonzero = sum(sum(1 for _, _, a in t["entries"] if a != 0.0) for t in active)
    denom = len(active) * model.n_train * model.patterns_per_instance
    return SparsityReport(
        active_terms=len(active), nonzero_alpha=nonzero, denominator=denom,
        percent=100.0 * nonzero / denom)


@dataclass
class PatternRecord:
    term_index: int
    pattern_key: tuple[int, int]   # 1-based (i, k)
    contribution: float            # w_t * alpha_ik
    pattern: list[float]
    best_match_offset: int         # 1-based window index in the queried series


def pattern_report(model: ModelFile, x) -> list[PatternRecord]:
    """Per-coefficient records locating each pattern on a query series.

    The placement is the offset minimizing the Euclidean distance between
    the stored pattern and the series window (ties toward the smaller
    offset).
    """
    values = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    windows = series_windows(values, model.ell)
    records = []
    for t_idx, term in enumerate(model.terms):
        for i, k, a in term["entries"]:
            if a == 0.0:
                continue
            pat = np.array(model.patterns[_pattern_key(i, k)])
            dists = np.linalg.norm(windows - pat, axis=1)
            records.append(PatternRecord(
                term_index=t_idx + 1, pattern_key=(i, k),
                contribution=term["weight"] * a,
                pattern=[float(v) for v in pat],
                best_match_offset=int(np.argmin(dists)) + 1))
    return records


def pattern_report_csv(records: list[PatternRecord], path) -> None:
    with open(path, "w") as fh:
        fh.write("term,instance,offset,contribution,best_match_offset\n")
        for r in records:
            fh.write(f"{r.term_index},{r.pattern_key[0]},{r.pattern_key[1]},"
                     f"{r.contribution!r},{r.best_match_offset}\n")


def pattern_report_svg(records: list[PatternRecord], x, path) -> None:
    """Static overlay: the series in black, matched patterns colored by
    the sign of their contribution (warm positive, cool negative)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    values = x.values if isinstance(x, TimeSeries) else np.asarray(x, dtype=float)
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.plot(np.arange(1, len(values) + 1), values, color="black", lw=1.5,
            label="series")
    if records:
        max_abs = max(abs(r.contribution) for r in records) or 1.0
        for r in records:
            start = r.best_match_offset
            xs = np.arange(start, start + len(r.pattern))
            strength = 0.35 + 0.65 * abs(r.contribution) / max_abs
            color = ((1.0, 1.0 - 0.8 * strength, 0.0) if r.contribution >= 0
                     else (0.4 * (1 - strength), 0.6, 1.0))
            ax.plot(xs, r.pattern, color=color, lw=2.0, alpha=0.9)
    ax.set_xlabel("time index")
    ax.set_ylabel("value")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
