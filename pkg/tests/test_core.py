import numpy as np
import pytest

from shapeboost.core import (
    BaseHypothesis,
    Distribution,
    Ensemble,
    LabeledInstance,
    TimeSeries,
    eval_base,
    eval_ensemble,
    extract_patterns,
    series_windows,
)
from shapeboost.exceptions import (
    InvalidInputError,
    InvalidModelError,
    InvalidParameterError,
)
from shapeboost.kernels import KernelSpec

from conftest import make_separable


def _instances(*rows):
    return [LabeledInstance(TimeSeries(np.array(r, dtype=float)),
                            1 if i % 2 == 0 else -1)
            for i, r in enumerate(rows)]


class TestTypes:
    def test_series_requires_length_two(self):
        with pytest.raises(InvalidInputError):
            TimeSeries(np.array([1.0]))

    def test_series_rejects_nonfinite(self):
        with pytest.raises(InvalidInputError):
            TimeSeries(np.array([1.0, np.nan]))

    def test_label_must_be_pm1(self):
        with pytest.raises(InvalidInputError):
            LabeledInstance(TimeSeries(np.array([0.0, 1.0])), 2)

    def test_distribution_box_and_simplex(self):
        Distribution(np.array([0.5, 0.5]), nu=1.0).validate()
        with pytest.raises(InvalidInputError):
            Distribution(np.array([0.9, 0.1]), nu=1.0).validate()  # cap 1/2
        with pytest.raises(InvalidInputError):
            Distribution(np.array([0.3, 0.3]), nu=1.0).validate()  # sum != 1


class TestExtractPatterns:
    def test_direct_windowing(self):
        bank = extract_patterns(_instances([1, 2, 3, 4], [5, 6, 7, 8]), 2)
        assert bank.patterns_per_instance == 3
        assert np.array_equal(bank.patterns[0],
                              [[1, 2], [2, 3], [3, 4]])

    def test_full_length_window(self):
        bank = extract_patterns(_instances([1, 2, 3], [4, 5, 6]), 3)
        assert bank.patterns_per_instance == 1
        assert np.array_equal(bank.patterns[1, 0], [4, 5, 6])

    def test_pattern_count_identity(self):
        # |bank| = m * (L - ell + 1) on random samples
        rng = np.random.default_rng(0)
        for _ in range(5):
            m, L = rng.integers(2, 8), rng.integers(5, 20)
            ell = int(rng.integers(2, L + 1))
            insts = _instances(*rng.normal(size=(m, L)))
            bank = extract_patterns(insts, ell)
            assert bank.size == m * (L - ell + 1)

    def test_length_fraction_window_count(self):
        # L=150, ell=15 -> 136 windows per instance
        insts = _instances(np.zeros(150), np.ones(150))
        assert extract_patterns(insts, 15).patterns_per_instance == 136

    def test_ragged_rejected(self):
        with pytest.raises(InvalidInputError):
            extract_patterns(_instances([1, 2, 3], [1, 2]), 2)

    def test_too_long_window_rejected(self):
        with pytest.raises(InvalidParameterError):
            extract_patterns(_instances([1, 2, 3], [4, 5, 6]), 4)


class TestEvalBase:
    def _bank(self):
        return extract_patterns(
            _instances([0.0, 1.0, 2.0, 3.0], [5.0, 4.0, 3.0, 2.0]), 2)

    def test_identical_pattern_scores_one(self):
        bank = self._bank()
        alpha = np.zeros(bank.size)
        alpha[bank.flat_index(0, 1)] = 1.0  # pattern (1, 2)
        h = BaseHypothesis(alpha, bank.bank_id, KernelSpec("gaussian", 1.0))
        x = TimeSeries(np.array([1.0, 2.0, 9.0]))  # first window == pattern
        assert eval_base(h, bank, x) == pytest.approx(1.0)

    def test_zero_alpha_scores_zero(self):
        bank = self._bank()
        h = BaseHypothesis(np.zeros(bank.size), bank.bank_id,
                           KernelSpec("gaussian", 1.0))
        assert eval_base(h, bank, TimeSeries(np.array([7.0, 8.0]))) == 0.0

    def test_positive_homogeneity(self):
        bank = self._bank()
        rng = np.random.default_rng(1)
        alpha = rng.normal(size=bank.size)
        x = TimeSeries(rng.normal(size=5))
        base = eval_base(BaseHypothesis(alpha, bank.bank_id,
                                        KernelSpec("gaussian", 0.5)), bank, x)
        for c in (0.0, 0.25, 3.0):
            scaled = eval_base(BaseHypothesis(c * alpha, bank.bank_id,
                                              KernelSpec("gaussian", 0.5)),
                               bank, x)
            assert scaled == pytest.approx(c * base, rel=1e-10, abs=1e-12)

    def test_max_monotone_in_windows(self):
        # appending values to the test series can only add candidate windows
        bank = self._bank()
        rng = np.random.default_rng(2)
        alpha = rng.normal(size=bank.size)
        h = BaseHypothesis(alpha, bank.bank_id, KernelSpec("gaussian", 0.5))
        short = rng.normal(size=5)
        longer = np.concatenate([short, rng.normal(size=3)])
        assert eval_base(h, bank, TimeSeries(longer)) >= \
            eval_base(h, bank, TimeSeries(short)) - 1e-12

    def test_wrong_bank_rejected(self):
        bank, other = self._bank(), self._bank()
        h = BaseHypothesis(np.zeros(bank.size), other.bank_id,
                           KernelSpec("linear"))
        with pytest.raises(InvalidInputError):
            eval_base(h, bank, TimeSeries(np.array([1.0, 2.0])))

    def test_window_permutation_invariance(self):
        # the max over windows does not depend on their order
        bank = self._bank()
        rng = np.random.default_rng(3)
        alpha = rng.normal(size=bank.size)
        x = rng.normal(size=6)
        windows = series_windows(x, bank.pattern_length)
        from shapeboost.kernels import gram_values
        K = gram_values(KernelSpec("gaussian", 0.5), bank.flat_patterns, windows)
        scores = alpha @ K
        perm = rng.permutation(len(scores))
        assert np.max(scores[perm]) == np.max(scores)


class TestEvalEnsemble:
    def _setup(self):
        bank = extract_patterns(
            _instances([0.0, 1.0, 2.0], [3.0, 2.0, 1.0]), 2)
        rng = np.random.default_rng(4)
        h = BaseHypothesis(rng.normal(size=bank.size), bank.bank_id,
                           KernelSpec("gaussian", 1.0))
        return bank, h

    def test_singleton_matches_base(self):
        bank, h = self._setup()
        x = TimeSeries(np.array([1.0, 2.0, 3.0]))
        g = Ensemble(terms=[(1.0, h)], hyper_params={})
        score, _ = eval_ensemble(g, bank, x)
        assert score == pytest.approx(eval_base(h, bank, x))

    def test_split_weights_match_single(self):
        bank, h = self._setup()
        x = TimeSeries(np.array([1.0, 2.0, 3.0]))
        split = Ensemble(terms=[(0.5, h), (0.5, h)], hyper_params={})
        single = Ensemble(terms=[(1.0, h)], hyper_params={})
        assert eval_ensemble(split, bank, x)[0] == \
            pytest.approx(eval_ensemble(single, bank, x)[0])

    def test_zero_score_predicts_positive(self):
        bank, _ = self._setup()
        h0 = BaseHypothesis(np.zeros(bank.size), bank.bank_id,
                            KernelSpec("linear"))
        g = Ensemble(terms=[(1.0, h0)], hyper_params={})
        score, pred = eval_ensemble(g, bank, TimeSeries(np.array([1.0, 2.0])))
        assert score == 0.0 and pred == 1

    def test_empty_ensemble_rejected(self):
        bank, _ = self._setup()
        with pytest.raises(InvalidModelError):
            eval_ensemble(Ensemble(terms=[], hyper_params={}), bank,
                          TimeSeries(np.array([1.0, 2.0])))


def test_separable_fixture_is_balanced():
    labels = [inst.label for inst in make_separable()]
    assert labels.count(1) == labels.count(-1)
