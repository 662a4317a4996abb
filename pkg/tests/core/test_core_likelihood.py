'''Tests for cluster_cpd.core.likelihood module'''

import math

import numpy as np
import pytest

from cluster_cpd.core import (
    InputError,
    ParameterError,
    init_sigma2,
    negative_log_likelihood
)


def _nll_oracle(x, t, sigma2, omega):
    n, d = x.shape
    m = t.shape[0]
    total = 0.0
    for xn in x:
        gauss = sum(
            math.exp(-float(np.sum((xn - tm) ** 2)) / (2.0 * sigma2)) for tm in t
        ) / (m * (2.0 * math.pi * sigma2) ** (d / 2.0))
        total -= math.log(omega / n + (1.0 - omega) * gauss)
    return total


class TestInitSigma2:
    '''Test cases for init_sigma2'''

    def test_single_pair(self):
        '''Test one point each: 25 / (2 * 1 * 1)'''
        assert init_sigma2([[0.0, 0.0]], [[3.0, 4.0]]) == 12.5

    def test_identical_points(self):
        '''Test coincident sets give zero'''
        assert init_sigma2([[1.0, 2.0]], [[1.0, 2.0]]) == 0.0

    def test_two_data_points(self):
        '''Test (0 + 1) / (2 * 1 * 2)'''
        assert init_sigma2([[0.0, 0.0], [1.0, 0.0]], [[0.0, 0.0]]) == pytest.approx(0.25)

    def test_pairwise_oracle(self, rng):
        '''Test against the mean over all pairs'''
        x = rng.normal(size=(7, 3))
        y = rng.normal(loc=1.0, size=(4, 3))
        expected = sum(float(np.sum((a - b) ** 2)) for a in x for b in y) / (3 * 7 * 4)
        assert init_sigma2(x, y) == pytest.approx(expected, rel=1e-12)

    def test_symmetric(self, rng):
        '''Test swapping the arguments gives exactly the same value'''
        for _ in range(20):
            x = rng.normal(size=(rng.integers(1, 30), 2))
            y = rng.normal(loc=2.0, size=(rng.integers(1, 30), 2))
            assert init_sigma2(x, y) == init_sigma2(y, x)

    def test_dimension_mismatch(self):
        '''Test different D raises InputError'''
        with pytest.raises(InputError):
            init_sigma2([[0.0, 0.0]], [[0.0, 0.0, 0.0]])


class TestNegativeLogLikelihood:
    '''Test cases for negative_log_likelihood'''

    def test_closed_form(self):
        '''Test one coincident pair in 2-D: log(2 pi)'''
        value = negative_log_likelihood([[0.0, 0.0]], [[0.0, 0.0]], 1.0, 0.0)
        assert value == pytest.approx(math.log(2.0 * math.pi), rel=1e-14)

    @pytest.mark.parametrize('omega', [0.0, 0.1, 0.7])
    def test_summation_oracle(self, rng, omega):
        '''Test against direct summation of the mixture'''
        x = rng.normal(size=(3, 3))
        t = rng.normal(size=(3, 3))
        value = negative_log_likelihood(x, t, 0.8, omega)
        assert value == pytest.approx(_nll_oracle(x, t, 0.8, omega), rel=1e-12)

    def test_far_points_stay_finite(self):
        '''Test distant points do not underflow to infinity'''
        value = negative_log_likelihood([[1e4, 0.0]], [[0.0, 0.0]], 1e-3, 0.0)
        assert math.isfinite(value)

    def test_large_variance_limit(self, rng):
        '''Test NLL approaches N D / 2 log(2 pi sigma^2) as sigma^2 grows'''
        x = rng.normal(size=(6, 2))
        t = rng.normal(size=(5, 2))
        sigma2 = 1e6
        limit = 6 * 2 / 2 * math.log(2.0 * math.pi * sigma2)
        assert negative_log_likelihood(x, t, sigma2, 0.0) == pytest.approx(limit, rel=1e-3)

    def test_outlier_term_bounds_nll(self):
        '''Test the uniform term caps each point's NLL at -log(omega / N)'''
        value = negative_log_likelihood([[1e3, 0.0]], [[0.0, 0.0]], 1.0, 0.2)
        assert value <= -math.log(0.2) + 1e-12

    @pytest.mark.parametrize('sigma2,omega', [(0.0, 0.1), (-1.0, 0.1), (1.0, 1.0)])
    def test_bad_parameters(self, sigma2, omega):
        '''Test invalid sigma^2 or omega raise ParameterError'''
        with pytest.raises(ParameterError):
            negative_log_likelihood([[0.0]], [[0.0]], sigma2, omega)
