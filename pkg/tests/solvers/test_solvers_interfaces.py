'''Tests for cluster_cpd.solvers.interfaces module'''

import numpy as np
import pytest

from cluster_cpd.core import (
    ClusterAssignment,
    ClusterWeighting,
    DegenerateClusterError,
    InputError,
    ParameterError
)
from cluster_cpd.solvers import (
    DEFAULT_ALPHA_SQ,
    ClusterPriorModel,
    CorrespondencePriors,
    PosteriorMatrix
)


class TestPosteriorMatrix:
    '''Test cases for PosteriorMatrix'''

    def test_row_sums(self):
        '''Test the per-centroid posterior mass'''
        post = PosteriorMatrix([[0.5, 0.25], [0.5, 0.0]], 1.25, 4)
        assert np.allclose(post.row_sums(), [0.75, 0.5])

    def test_read_only(self):
        '''Test the matrix cannot be modified'''
        post = PosteriorMatrix([[1.0]], 1.0, 1)
        with pytest.raises(ValueError):
            post.p[0, 0] = 0.0


class TestCorrespondencePriors:
    '''Test cases for CorrespondencePriors'''

    def test_sorted_storage(self):
        '''Test pairs are stored ordered by data then template index'''
        priors = CorrespondencePriors.from_pairs([(2, 0), (0, 3), (0, 1)], 1.0)
        assert priors.pairs == [(0, 1), (0, 3), (2, 0)]

    def test_order_independent_equality(self):
        '''Test the same set in a different order compares equal'''
        a = CorrespondencePriors.from_pairs([(0, 1), (2, 2), (1, 0)], 0.5)
        b = CorrespondencePriors.from_pairs([(1, 0), (0, 1), (2, 2)], 0.5)
        assert a == b

    def test_alpha_in_equality(self):
        '''Test different reliabilities compare unequal'''
        a = CorrespondencePriors.from_pairs([(0, 0)], 0.5)
        b = CorrespondencePriors.from_pairs([(0, 0)], 1.0)
        assert a != b

    def test_duplicate_pair(self):
        '''Test a repeated pair is rejected'''
        with pytest.raises(InputError, match='Duplicate'):
            CorrespondencePriors.from_pairs([(0, 1), (0, 1)], 1.0)

    def test_negative_index(self):
        '''Test negative indices are rejected'''
        with pytest.raises(InputError):
            CorrespondencePriors.from_pairs([(-1, 0)], 1.0)

    @pytest.mark.parametrize('alpha_sq', [0.0, -1.0, float('inf'), float('nan')])
    def test_bad_alpha(self, alpha_sq):
        '''Test alpha^2 must be finite and positive'''
        with pytest.raises(ParameterError):
            CorrespondencePriors.from_pairs([(0, 0)], alpha_sq)

    def test_empty(self):
        '''Test the empty prior set'''
        priors = CorrespondencePriors.empty()
        assert len(priors) == 0
        assert priors.alpha_sq == DEFAULT_ALPHA_SQ
        assert np.array_equal(priors.row_sums(3), np.zeros(3))

    def test_validate_for(self):
        '''Test pairs outside the point sets are rejected'''
        priors = CorrespondencePriors.from_pairs([(0, 4)], 1.0)
        priors.validate_for(1, 5)
        with pytest.raises(InputError):
            priors.validate_for(1, 4)

    def test_row_sums_and_data(self):
        '''Test P~1 and P~X for a small set of pairs'''
        priors = CorrespondencePriors.from_pairs([(0, 0), (1, 0), (1, 2)], 1.0)
        x = np.array([[1.0, 0.0], [0.0, 2.0]])
        assert np.array_equal(priors.row_sums(3), [2.0, 0.0, 1.0])
        assert np.array_equal(priors.weighted_data(x, 3), [[1.0, 2.0], [0.0, 0.0], [0.0, 2.0]])


class TestClusterPriorModel:
    '''Test cases for ClusterPriorModel'''

    def test_data_fraction_weights(self):
        '''Test P(c) follows the data cluster sizes'''
        data = ClusterAssignment([1, 1, 1, 2])
        template = ClusterAssignment([1, 2])
        model = ClusterPriorModel.from_labels(data, template)
        assert np.allclose(model.cluster_weights, [0.75, 0.25])
        assert model.n_clusters == 2

    def test_unassigned_excluded_from_weights(self):
        '''Test label 0 points do not count towards P(c)'''
        data = ClusterAssignment([1, 0, 2, 0])
        model = ClusterPriorModel.from_labels(data, ClusterAssignment([1, 2]))
        assert np.allclose(model.cluster_weights, [0.5, 0.5])

    def test_uniform_weights(self):
        '''Test the uniform weighting'''
        data = ClusterAssignment([1, 1, 1, 2, 3])
        template = ClusterAssignment([1, 2, 3])
        model = ClusterPriorModel.from_labels(data, template, ClusterWeighting.UNIFORM)
        assert np.allclose(model.cluster_weights, np.full(3, 1.0 / 3.0))

    def test_block_weights_data_fraction(self):
        '''Test data-fraction weighting leaves every cluster block at full weight'''
        data = ClusterAssignment([1, 1, 1, 2, 0])
        model = ClusterPriorModel.from_labels(data, ClusterAssignment([1, 2]))
        assert np.allclose(model.block_weights, [1.0, 1.0], rtol=0.0, atol=1e-15)

    def test_block_weights_uniform(self):
        '''Test uniform weighting rescales blocks by the labelled share'''
        data = ClusterAssignment([1, 1, 1, 2])
        template = ClusterAssignment([1, 2])
        model = ClusterPriorModel.from_labels(data, template, ClusterWeighting.UNIFORM)
        assert np.allclose(model.block_weights, [0.5 * 4 / 3, 0.5 * 4 / 1])

    def test_missing_template_cluster(self):
        '''Test a data cluster without template points is degenerate'''
        with pytest.raises(DegenerateClusterError) as info:
            ClusterPriorModel.from_labels(ClusterAssignment([1, 1, 2]), ClusterAssignment([1, 1]))
        assert info.value.cluster == 2

    def test_extra_template_cluster(self):
        '''Test a template cluster absent from the data is rejected'''
        with pytest.raises(InputError):
            ClusterPriorModel.from_labels(ClusterAssignment([1, 1]), ClusterAssignment([1, 2]))

    @pytest.mark.parametrize('weights', [[0.5, 0.6], [1.5, -0.5]])
    def test_bad_weights(self, weights):
        '''Test weights must be non-negative and sum to one'''
        labels = ClusterAssignment([1, 2])
        with pytest.raises(ParameterError):
            ClusterPriorModel(labels, labels, np.array(weights))

    def test_weight_count(self):
        '''Test one weight per cluster is required'''
        labels = ClusterAssignment([1, 2])
        with pytest.raises(InputError):
            ClusterPriorModel(labels, labels, np.array([1.0]))
