import math

import numpy as np
import pytest

from shapeboost.core import PatternBank
from shapeboost.exceptions import InvalidParameterError, UnsupportedError
from shapeboost.kernels import KernelSpec
from shapeboost.theory import (
    ComplexityParams,
    count_theta_2d,
    count_theta_sampled,
    gaussian_complexity_bound,
    gaussian_complexity_mc,
    unit_circle_grid,
)


def _bank(patterns):
    patterns = np.asarray(patterns, dtype=float)
    m, Q, ell = patterns.shape
    return PatternBank(pattern_length=ell, patterns_per_instance=Q,
                       patterns=patterns)


def random_bank(rng, max_m=4, max_q=5):
    m = int(rng.integers(1, max_m + 1))
    Q = int(rng.integers(1, max_q + 1))
    return _bank(rng.normal(size=(m, Q, 2)))


class TestExactCount:
    def test_single_pattern(self):
        assert count_theta_2d(_bank([[[1.0, 0.0]]])).count == 1

    def test_two_orthogonal_patterns(self):
        # one flip line through the origin splits directions into 2 sectors
        result = count_theta_2d(_bank([[[1.0, 0.0], [0.0, 1.0]]]))
        assert result.count == 2 and result.method == "exact-2d"

    def test_duplicate_patterns_collapse(self):
        assert count_theta_2d(_bank([[[2.0, 1.0], [2.0, 1.0]]])).count == 1

    def test_sector_and_envelope_bounds(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            bank = random_bank(rng)
            n = bank.size
            count = count_theta_2d(bank).count
            assert 1 <= count <= 2 * math.comb(n, 2) if n > 1 else count == 1
            assert count <= n ** 4  # (mQ)^(2*ell) with ell=2

    def test_higher_dimension_unsupported(self):
        with pytest.raises(UnsupportedError):
            count_theta_2d(_bank(np.zeros((1, 1, 3))))


class TestSampledCount:
    def test_single_direction(self):
        rng = np.random.default_rng(1)
        bank = random_bank(rng)
        result = count_theta_sampled(bank, KernelSpec("linear"), 1, seed=0)
        assert result.count == 1
        assert result.method == "sampled-lower-bound"

    def test_lower_bounds_exact_and_saturates(self):
        rng = np.random.default_rng(2)
        for seed in range(10):
            bank = random_bank(rng, max_m=3, max_q=3)
            exact = count_theta_2d(bank).count
            sampled = count_theta_sampled(
                bank, KernelSpec("linear"), 10 * exact + 50, seed=seed)
            assert sampled.count <= exact

    def test_dense_sampling_reaches_exact(self):
        rng = np.random.default_rng(3)
        bank = random_bank(rng, max_m=2, max_q=3)
        exact = count_theta_2d(bank).count
        sampled = count_theta_sampled(
            bank, KernelSpec("linear"), max(2000, 50 * exact), seed=0)
        assert sampled.count == exact

    def test_gaussian_case_within_envelope(self):
        rng = np.random.default_rng(4)
        bank = random_bank(rng)
        sampled = count_theta_sampled(
            bank, KernelSpec("gaussian", 1.0), 500, seed=0)
        assert 1 <= sampled.count <= bank.size ** 4

    def test_zero_directions_rejected(self):
        bank = _bank([[[1.0, 0.0]]])
        with pytest.raises(InvalidParameterError):
            count_theta_sampled(bank, KernelSpec("linear"), 0)


class TestBound:
    def test_single_assignment(self):
        p = ComplexityParams(R=2.0, lam=3.0, m=4, Q=1, ell=2)
        expected = 2.0 * 3.0 * math.sqrt(math.sqrt(2) - 1) / 2.0
        assert gaussian_complexity_bound(p, 1) == pytest.approx(expected)

    def test_unit_params_at_e(self):
        # R = lam = m = 1 with count e gives sqrt(sqrt(2) + 1)
        p = ComplexityParams(R=1.0, lam=1.0, m=1, Q=1, ell=2)
        value = gaussian_complexity_bound(p, math.e)
        assert value == pytest.approx(math.sqrt(math.sqrt(2) + 1))
        assert value == pytest.approx(1.5537739740, abs=1e-9)

    def test_monotone_in_count(self):
        p = ComplexityParams(R=1.0, lam=1.0, m=2, Q=2, ell=2)
        values = [gaussian_complexity_bound(p, k) for k in (1, 2, 5, 50)]
        assert values == sorted(values)

    def test_invalid_count_rejected(self):
        p = ComplexityParams(R=1.0, lam=1.0, m=1, Q=1, ell=2)
        with pytest.raises(InvalidParameterError):
            gaussian_complexity_bound(p, 0)


class TestMonteCarlo:
    def test_single_sample_closed_form(self):
        # one instance, one pattern: the supremum over the dense circle is
        # lam * R * |sigma|, whose mean is lam * R * sqrt(2/pi)
        R, lam = 1.7, 0.8
        patterns = np.array([[[R, 0.0]]])
        grid = unit_circle_grid(2000, lam=lam)
        estimate, stderr = gaussian_complexity_mc(patterns, grid, 100_000,
                                                  seed=0)
        expected = lam * R * math.sqrt(2 / math.pi)
        assert abs(estimate - expected) <= 0.05 * expected

    def test_zero_budget(self):
        patterns = np.array([[[1.0, 0.0]]])
        grid = unit_circle_grid(100, lam=0.0)
        estimate, _ = gaussian_complexity_mc(patterns, grid, 100, seed=0)
        assert estimate == 0.0

    def test_estimate_below_bound(self):
        # The bound only holds once there are at least two distinct
        # assignment maps; random banks with Q >= 2 guarantee that.
        rng = np.random.default_rng(5)
        for seed in range(10):
            bank = random_bank(rng)
            if bank.patterns_per_instance < 2:
                continue
            R = float(np.linalg.norm(bank.flat_patterns, axis=1).max())
            grid = unit_circle_grid(720)
            estimate, stderr = gaussian_complexity_mc(
                bank.patterns, grid, 10_000, seed=seed)
            params = ComplexityParams(R=R, lam=1.0, m=bank.n_instances,
                                      Q=bank.patterns_per_instance, ell=2)
            bound = gaussian_complexity_bound(
                params, count_theta_2d(bank).count)
            assert estimate <= bound + 3 * stderr

    def test_bound_violated_for_single_assignment_bank(self):
        # With one pattern per instance there is a single assignment map,
        # and the bound factor sqrt(sqrt(2)-1) ~= 0.6436 falls below the
        # exact single-sample complexity factor sqrt(2/pi) ~= 0.7979.
        # This documents a real limitation of the closed-form bound.
        R, lam = 1.0, 1.0
        params = ComplexityParams(R=R, lam=lam, m=1, Q=1, ell=2)
        bound = gaussian_complexity_bound(params, theta_count=1)
        exact_complexity = lam * R * math.sqrt(2 / math.pi)
        assert bound < exact_complexity
        estimate, stderr = gaussian_complexity_mc(
            np.array([[[R, 0.0]]]), unit_circle_grid(2000, lam=lam),
            50_000, seed=3)
        assert estimate > bound + 3 * stderr

    def test_deterministic_given_seed(self):
        patterns = np.random.default_rng(6).normal(size=(2, 3, 2))
        grid = unit_circle_grid(64)
        a = gaussian_complexity_mc(patterns, grid, 500, seed=11)
        b = gaussian_complexity_mc(patterns, grid, 500, seed=11)
        assert a == b
