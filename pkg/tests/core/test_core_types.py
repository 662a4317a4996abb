'''Tests for cluster_cpd.core value types and configuration'''

import numpy as np
import pytest
from pydantic import ValidationError

from cluster_cpd.core import (
    ClusterAssignment,
    DisplacementField,
    InputError,
    IterationRecord,
    KernelMatrix,
    ParameterError,
    PointSet,
    RegistrationConfig,
    RegistrationResult,
    TerminationReason
)


class TestPointSet:
    '''Test cases for PointSet'''

    def test_shape_properties(self):
        '''Test N and D are derived from the array'''
        points = PointSet([[0.0, 1.0, 2.0], [3.0, 4.0, 5.0]])
        assert points.n_points == 2
        assert points.dim == 3
        assert len(points) == 2

    def test_copy_is_read_only(self):
        '''Test the stored array is a private read-only copy'''
        raw = np.zeros((2, 2))
        points = PointSet(raw)
        raw[0, 0] = 5.0
        assert points.points[0, 0] == 0.0
        with pytest.raises(ValueError):
            points.points[0, 0] = 1.0

    @pytest.mark.parametrize('bad', [[[np.nan, 0.0]], [[np.inf, 0.0]]])
    def test_non_finite_rejected(self, bad):
        '''Test NaN and Inf coordinates raise InputError'''
        with pytest.raises(InputError):
            PointSet(bad)

    def test_empty_rejected(self):
        '''Test an empty set raises InputError'''
        with pytest.raises(InputError):
            PointSet(np.empty((0, 2)))

    def test_subset_preserves_order(self):
        '''Test subset returns rows in the requested order'''
        points = PointSet([[0.0], [1.0], [2.0]])
        assert points.subset([2, 0]).points[:, 0].tolist() == [2.0, 0.0]


class TestClusterAssignment:
    '''Test cases for ClusterAssignment'''

    def test_dense_reindexing(self):
        '''Test labels are re-indexed by first appearance'''
        assert ClusterAssignment.from_raw([7, 7, 3]).labels.tolist() == [1, 1, 2]

    def test_reindexing_is_idempotent(self):
        '''Test re-indexing dense labels changes nothing'''
        once = ClusterAssignment.from_raw([5, 2, 5, 9])
        twice = ClusterAssignment.from_raw(once.labels)
        assert twice.labels.tolist() == once.labels.tolist()

    def test_unassigned_kept(self):
        '''Test label 0 survives re-indexing and is excluded from clusters'''
        labels = ClusterAssignment.from_raw([0, 4, 0, 4])
        assert labels.labels.tolist() == [0, 1, 0, 1]
        assert labels.n_clusters == 1
        assert labels.assigned.tolist() == [False, True, False, True]

    def test_counts_and_members(self):
        '''Test per-cluster counts and member indices'''
        labels = ClusterAssignment([1, 2, 2, 1, 2])
        assert labels.counts().tolist() == [2, 3]
        assert labels.members(2).tolist() == [1, 2, 4]

    def test_empty_declared_cluster(self):
        '''Test a declared cluster without members raises InputError'''
        with pytest.raises(InputError):
            ClusterAssignment([1, 1], n_clusters=2)

    def test_negative_label(self):
        '''Test negative labels raise InputError'''
        with pytest.raises(InputError):
            ClusterAssignment([1, -1])

    def test_single(self):
        '''Test the one-cluster assignment'''
        labels = ClusterAssignment.single(3)
        assert labels.n_clusters == 1
        assert labels.labels.tolist() == [1, 1, 1]


class TestRegistrationConfig:
    '''Test cases for RegistrationConfig'''

    def test_defaults(self):
        '''Test the default solver settings'''
        config = RegistrationConfig()
        assert (config.beta_sq, config.lambda_, config.omega) == (2.0, 2.0, 0.1)
        assert (config.max_iters, config.rel_tol, config.sigma2_floor) == (150, 1e-5, 1e-8)

    def test_lambda_alias(self):
        '''Test lambda can be given under its public name'''
        assert RegistrationConfig.model_validate({'lambda': 3.0}).lambda_ == 3.0

    @pytest.mark.parametrize('field,value', [
        ('beta_sq', 0.0),
        ('lambda_', -1.0),
        ('omega', 1.0),
        ('omega', -0.1),
        ('max_iters', 0),
        ('rel_tol', 0.0),
        ('sigma2_floor', 0.0)
    ])
    def test_out_of_range(self, field, value):
        '''Test each parameter domain is enforced'''
        with pytest.raises(ParameterError):
            RegistrationConfig(**{field: value})

    def test_unknown_field(self):
        '''Test unknown fields are rejected'''
        with pytest.raises(ValidationError):
            RegistrationConfig(gamma=1.0)

    def test_frozen(self):
        '''Test the configuration cannot be mutated'''
        config = RegistrationConfig()
        with pytest.raises(ValidationError):
            config.omega = 0.5


class TestContainers:
    '''Test cases for KernelMatrix, DisplacementField and RegistrationResult'''

    def test_kernel_must_be_square(self):
        '''Test a non-square kernel raises InputError'''
        with pytest.raises(InputError):
            KernelMatrix(np.ones((2, 3)))

    def test_field_shape_must_match_template(self):
        '''Test coefficient shape is checked against the template'''
        with pytest.raises(InputError):
            DisplacementField(np.zeros((3, 2)), PointSet(np.zeros((2, 2))), 2.0)

    def test_result_trace_length(self):
        '''Test the trace must hold one record per iteration'''
        template = PointSet(np.zeros((1, 2)))
        field = DisplacementField(np.zeros((1, 2)), template, 2.0)
        record = IterationRecord(1, 1.0, 0.0, 0.0, 0.0, 0.1)
        with pytest.raises(InputError):
            RegistrationResult(field, template, 1.0, 2, (record,), TerminationReason.TOLERANCE)

    def test_converged_flag(self):
        '''Test only max-iters termination counts as not converged'''
        template = PointSet(np.zeros((1, 2)))
        field = DisplacementField(np.zeros((1, 2)), template, 2.0)
        record = IterationRecord(1, 1.0, 0.0, 0.0, 0.0, 0.1)
        for reason, expected in [
            (TerminationReason.TOLERANCE, True),
            (TerminationReason.SIGMA2_FLOOR, True),
            (TerminationReason.MAX_ITERS, False)
        ]:
            result = RegistrationResult(field, template, 1.0, 1, (record,), reason)
            assert result.converged is expected
