'''Tests for cluster_cpd.core.kernel module'''

import math

import numpy as np
import pytest

from cluster_cpd.core import (
    DisplacementField,
    InputError,
    ParameterError,
    PointSet,
    apply_displacement,
    gaussian_kernel,
    squared_distances
)


class TestGaussianKernel:
    '''Test cases for gaussian_kernel'''

    def test_coincident_points(self):
        '''Test zero distances give an all-ones kernel'''
        kernel = gaussian_kernel([[0.0, 0.0], [0.0, 0.0]], 2.0)
        assert np.array_equal(kernel.g, np.ones((2, 2)))

    def test_closed_form(self):
        '''Test a distance of 2 with beta^2 = 2 gives e^-1'''
        kernel = gaussian_kernel([[0.0, 0.0], [2.0, 0.0]], 2.0)
        assert kernel.g[0, 1] == pytest.approx(math.exp(-1.0), rel=1e-15)
        assert kernel.size == 2

    def test_double_loop_oracle(self, rng):
        '''Test every entry against a direct evaluation'''
        y = rng.normal(size=(5, 3))
        kernel = gaussian_kernel(y, 1.5)
        for i in range(5):
            for j in range(5):
                expected = math.exp(-float(np.sum((y[i] - y[j]) ** 2)) / 3.0)
                assert kernel.g[i, j] == pytest.approx(expected, rel=1e-12)

    def test_symmetric_unit_diagonal(self, rng):
        '''Test exact symmetry, unit diagonal and entries in (0, 1]'''
        g = gaussian_kernel(rng.normal(size=(30, 2)), 2.0).g
        assert np.array_equal(g, g.T)
        assert np.all(np.diag(g) == 1.0)
        assert np.all((g > 0.0) & (g <= 1.0))

    def test_positive_semidefinite(self, rng):
        '''Test the smallest eigenvalue is non-negative up to round-off'''
        for _ in range(5):
            g = gaussian_kernel(rng.uniform(-3, 3, size=(50, 3)), 2.0).g
            assert np.linalg.eigvalsh(g).min() >= -1e-10

    @pytest.mark.parametrize('beta_sq', [0.0, -1.0, float('nan')])
    def test_bad_width(self, beta_sq):
        '''Test non-positive widths raise ParameterError'''
        with pytest.raises(ParameterError):
            gaussian_kernel([[0.0, 0.0]], beta_sq)

    def test_non_finite_template(self):
        '''Test non-finite coordinates raise InputError'''
        with pytest.raises(InputError):
            gaussian_kernel([[np.nan, 0.0]], 2.0)


class TestApplyDisplacement:
    '''Test cases for apply_displacement'''

    def test_zero_field(self, rng):
        '''Test W = 0 leaves the query unchanged'''
        template = PointSet(rng.normal(size=(4, 2)))
        field = DisplacementField(np.zeros((4, 2)), template, 2.0)
        query = rng.normal(size=(6, 2))
        assert np.array_equal(apply_displacement(field, query).points, query)

    def test_closed_form(self):
        '''Test one anchor at the origin moving a point at (2, 0)'''
        field = DisplacementField([[1.0, 0.0]], PointSet([[0.0, 0.0]]), 2.0)
        moved = apply_displacement(field, [[2.0, 0.0]]).points
        assert moved[0, 0] == pytest.approx(2.0 + math.exp(-1.0), rel=1e-15)
        assert moved[0, 1] == 0.0

    def test_template_reproduces_gw(self, rng):
        '''Test applying the field to its template gives Y + G W'''
        y = rng.normal(size=(5, 3))
        w = rng.normal(size=(5, 3))
        field = DisplacementField(w, PointSet(y), 2.0)
        expected = y + gaussian_kernel(y, 2.0).g @ w
        assert np.allclose(apply_displacement(field, y).points, expected, rtol=1e-12, atol=1e-12)

    def test_linear_in_coefficients(self, rng):
        '''Test scaling W by s scales every displacement by s'''
        y = PointSet(rng.normal(size=(4, 2)))
        w = rng.normal(size=(4, 2))
        query = rng.normal(size=(7, 2))
        base = apply_displacement(DisplacementField(w, y, 2.0), query).points - query
        scaled = apply_displacement(DisplacementField(3.0 * w, y, 2.0), query).points - query
        assert np.allclose(scaled, 3.0 * base, rtol=1e-12, atol=1e-14)

    def test_dimension_mismatch(self):
        '''Test a query of the wrong dimension raises InputError'''
        field = DisplacementField([[0.0, 0.0]], PointSet([[0.0, 0.0]]), 2.0)
        with pytest.raises(InputError):
            apply_displacement(field, [[0.0, 0.0, 0.0]])


class TestSquaredDistances:
    '''Test cases for squared_distances'''

    def test_values(self):
        '''Test a 3-4-5 triangle'''
        d = squared_distances(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0], [0.0, 0.0]]))
        assert d.tolist() == [[25.0, 0.0]]

    def test_symmetric_with_zero_diagonal(self, rng):
        '''Test a set against itself'''
        y = rng.normal(size=(6, 3))
        d = squared_distances(y, y)
        assert np.array_equal(d, d.T)
        assert np.all(np.diag(d) == 0.0)
