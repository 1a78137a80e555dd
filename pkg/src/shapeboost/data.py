"""UCR-format ingestion, normalization, and stratified folds."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import LabeledInstance, TimeSeries
from .exceptions import (
    InvalidInputError,
    InvalidParameterError,
    ParseError,
    UnsupportedError,
)


@dataclass
class Dataset:
    """A binary-labeled, uniform-length sample.

    ``label_map`` records the original file labels mapped onto {+1, -1}
    (the lexicographically smaller original label becomes +1).
    """

    instances: list[LabeledInstance]
    name: str = ""
    label_map: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.instances)

    @property
    def labels(self) -> np.ndarray:
        return np.array([inst.label for inst in self.instances], dtype=int)

    @property
    def series_matrix(self) -> np.ndarray:
        return np.stack([inst.series.values for inst in self.instances])

    @property
    def series_length(self) -> int:
        return len(self.instances[0].series)

    def subset(self, indices, suffix="") -> "Dataset":
        return Dataset(instances=[self.instances[i] for i in indices],
                       name=self.name + suffix, label_map=dict(self.label_map))


def _parse_rows(path):
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = line.split(",") if "," in line else line.split()
            try:
                rows.append((lineno, [float(v) for v in fields]))
            except ValueError as exc:
                raise ParseError(f"{path}: line {lineno}: {exc}", lineno) from exc
    return rows


def load_ucr(path, name: str | None = None) -> Dataset:
    """Load a UCR-style text file: label first, values after.

    Comma and whitespace delimiters are both accepted.  The two observed
    class labels are mapped to {+1, -1}; the smaller one becomes +1.
    """
    path = Path(path)
    rows = _parse_rows(path)
    if not rows:
        raise InvalidInputError(f"{path}: empty dataset")
    lengths = {len(vals) - 1 for _, vals in rows}
    if len(lengths) != 1:
        raise InvalidInputError(f"{path}: ragged rows of lengths {sorted(lengths)}")
    raw_labels = sorted({vals[0] for _, vals in rows})
    if len(raw_labels) != 2:
        raise UnsupportedError(
            f"{path}: expected exactly 2 classes, found {len(raw_labels)}")
    label_map = {raw_labels[0]: 1, raw_labels[1]: -1}
    instances = [
        LabeledInstance(TimeSeries(np.array(vals[1:]), id=f"{path.stem}:{lineno}"),
                        label_map[vals[0]])
        for lineno, vals in rows
    ]
    return Dataset(instances=instances, name=name or path.stem,
                   label_map={str(k): v for k, v in label_map.items()})


def znormalize(ds: Dataset) -> Dataset:
    """Shift/scale each series to mean 0, stddev 1 (constants map to zero)."""
    out = []
    for inst in ds.instances:
        v = inst.series.values
        std = v.std()
        if std < 1e-12:
            z = np.zeros_like(v)
        else:
            z = (v - v.mean()) / std
        out.append(LabeledInstance(TimeSeries(z, id=inst.series.id), inst.label))
    return Dataset(instances=out, name=ds.name, label_map=dict(ds.label_map))


def stratified_kfold(ds: Dataset, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic stratified folds as (train, validation) index pairs.

    Per-class validation counts across folds differ by at most 1.  A
    class with fewer than k members is still spread round-robin, with a
    warning.
    """
    m = len(ds)
    if k < 2:
        raise InvalidParameterError("k must be >= 2")
    if k > m:
        raise InvalidParameterError(f"k={k} exceeds sample size {m}")
    labels = ds.labels
    rng = np.random.default_rng(seed)
    fold_of = np.empty(m, dtype=int)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        if len(idx) < k:
            warnings.warn(
                f"class {cls} has only {len(idx)} members for {k} folds; "
                "some validation folds will miss it")
        idx = rng.permutation(idx)
        fold_of[idx] = np.arange(len(idx)) % k
    folds = []
    for f in range(k):
        val = np.flatnonzero(fold_of == f)
        train = np.flatnonzero(fold_of != f)
        folds.append((train, val))
    return folds


def save_dataset(ds: Dataset, path) -> None:
    """Write the internal save format: UCR-style CSV plus a JSON sidecar."""
    path = Path(path)
    inverse = {v: k for k, v in ds.label_map.items()}
    with open(path, "w") as fh:
        for inst in ds.instances:
            raw = inverse.get(inst.label, inst.label)
            fh.write(",".join([repr(float(raw))]
                              + [repr(float(v)) for v in inst.series.values]) + "\n")
    sidecar = {"name": ds.name, "labelMap": ds.label_map}
    with open(path.with_suffix(path.suffix + ".json"), "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)


def load_dataset(path) -> Dataset:
    """Load the internal save format written by :func:`save_dataset`."""
    path = Path(path)
    ds = load_ucr(path)
    sidecar = path.with_suffix(path.suffix + ".json")
    if sidecar.exists():
        with open(sidecar) as fh:
            meta = json.load(fh)
        ds.name = meta.get("name", ds.name)
        ds.label_map = meta.get("labelMap", ds.label_map)
    return ds
