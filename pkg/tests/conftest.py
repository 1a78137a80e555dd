"""Shared fixtures: small synthetic datasets and bank/gram helpers."""

import numpy as np
import pytest

from shapeboost.core import LabeledInstance, TimeSeries, extract_patterns
from shapeboost.data import Dataset
from shapeboost.kernels import KernelSpec, gram_bank


def make_separable(m=16, L=30, seed=0, noise=0.3):
    """Binary sample where each class carries a bump at a fixed location."""
    rng = np.random.default_rng(seed)
    bump = np.sin(np.linspace(0, np.pi, 6)) * 3
    instances = []
    for i in range(m):
        label = 1 if i % 2 == 0 else -1
        x = rng.normal(0, noise, L)
        if label == 1:
            x[8:14] += bump
        else:
            x[18:24] -= bump
        instances.append(LabeledInstance(TimeSeries(x, id=str(i)), label))
    return instances


def make_dataset(m=16, L=30, seed=0) -> Dataset:
    return Dataset(instances=make_separable(m, L, seed), name="toy",
                   label_map={"1.0": 1, "2.0": -1})


def write_ucr(path, instances):
    """Write instances in the UCR text format (labels 1/2)."""
    with open(path, "w") as fh:
        for inst in instances:
            raw = 1 if inst.label == 1 else 2
            fh.write(",".join([str(raw)] + [repr(float(v))
                                            for v in inst.series.values]) + "\n")


@pytest.fixture
def toy_instances():
    return make_separable()


@pytest.fixture
def toy_setup(toy_instances):
    """(instances, labels, bank, gram) on a small separable sample."""
    bank = extract_patterns(toy_instances, 6)
    labels = np.array([inst.label for inst in toy_instances])
    gram = gram_bank(KernelSpec("gaussian", sigma=0.1), bank)
    return toy_instances, labels, bank, gram


def make_toy_problem(seed):
    """Random small weak-learning instance: (labels, d, bank, gram)."""
    from shapeboost.core import Distribution, PatternBank

    rng = np.random.default_rng(seed)
    m = int(rng.integers(2, 7))
    Q = int(rng.integers(1, 5))
    labels = np.ones(m, dtype=int)
    labels[rng.permutation(m)[: int(rng.integers(1, m))] ] = -1
    if labels.min() == labels.max():  # both labels must be present
        labels[0] = -labels[0]
    bank = PatternBank(pattern_length=2, patterns_per_instance=Q,
                       patterns=rng.normal(size=(m, Q, 2)))
    gram = gram_bank(KernelSpec("gaussian", sigma=0.5), bank)
    w = rng.uniform(0.5, 1.5, size=m)
    d = Distribution(weights=w / w.sum(), nu=0.5)
    return labels, d, bank, gram


def true_objective(alpha, gram, d, labels, Q):
    """Weak-learning objective: sum_q d_q h(x_q) - sum_p d_p h(x_p)."""
    m = len(labels)
    h = (np.asarray(alpha) @ gram.values).reshape(m, Q).max(axis=1)
    return float(-(labels * d.weights) @ h)
