'''Tests for cluster_cpd.solvers.ecpd module'''

import dataclasses

import numpy as np
import pytest

from cluster_cpd.bench import generate_scene
from cluster_cpd.core import (
    ClusterAssignment,
    InputError,
    RegistrationConfig,
    gaussian_kernel
)
from cluster_cpd.solvers import (
    CorrespondencePriors,
    estep,
    mstep_solve,
    mstep_solve_ecpd,
    priors_from_clusters,
    register_cpd,
    register_ecpd
)


def _without_wall(trace):
    return [dataclasses.replace(record, wall_ms=0.0) for record in trace]


@pytest.fixture
def instance(rng):
    x = rng.normal(size=(6, 2))
    y = rng.normal(size=(4, 2))
    kernel = gaussian_kernel(y, 2.0)
    post = estep(x, y, 0.9, 0.1)
    return x, y, kernel, post


class TestPriorsFromClusters:
    '''Test cases for priors_from_clusters'''

    def test_single_cluster(self):
        '''Test one shared cluster pairs every point with every point'''
        priors = priors_from_clusters(ClusterAssignment.single(3), ClusterAssignment.single(4))
        assert len(priors) == 12

    def test_two_clusters(self):
        '''Test sizes (2, 1) against (1, 2) give four pairs'''
        priors = priors_from_clusters(
            ClusterAssignment([1, 1, 2]),
            ClusterAssignment([1, 2, 2]),
            alpha_sq=4.0
        )
        assert priors.pairs == [(0, 0), (1, 0), (2, 1), (2, 2)]
        assert priors.alpha_sq == 4.0

    def test_unassigned_points(self):
        '''Test label 0 points take part in no pair'''
        priors = priors_from_clusters(ClusterAssignment([1, 0, 0]), ClusterAssignment([0, 0, 1]))
        assert priors.pairs == [(0, 2)]

    def test_cluster_count_mismatch(self):
        '''Test assignments must declare the same clusters'''
        with pytest.raises(InputError):
            priors_from_clusters(ClusterAssignment([1, 2]), ClusterAssignment([1, 1]))


class TestMstepSolveEcpd:
    '''Test cases for mstep_solve_ecpd'''

    def test_empty_priors_match_cpd(self, instance):
        '''Test no pairs gives exactly the CPD solution'''
        x, y, kernel, post = instance
        w_cpd = mstep_solve(kernel, post, x, y, 2.0, 0.9)
        w_ecpd = mstep_solve_ecpd(kernel, post, CorrespondencePriors.empty(), x, y, 2.0, 0.9)
        assert np.array_equal(w_cpd, w_ecpd)

    def test_weak_priors_approach_cpd(self, instance):
        '''Test a huge alpha^2 makes the priors negligible'''
        x, y, kernel, post = instance
        priors = CorrespondencePriors.from_pairs([(0, 0), (3, 2)], 1e20)
        w_cpd = mstep_solve(kernel, post, x, y, 2.0, 0.9)
        w_ecpd = mstep_solve_ecpd(kernel, post, priors, x, y, 2.0, 0.9)
        assert np.allclose(w_ecpd, w_cpd, rtol=0.0, atol=1e-8)

    def test_dense_oracle(self, instance):
        '''Test against an explicitly assembled system'''
        x, y, kernel, post = instance
        alpha_sq, sigma2, lambda_ = 0.25, 0.9, 2.0
        priors = CorrespondencePriors.from_pairs([(0, 0), (1, 0), (5, 3)], alpha_sq)
        w = mstep_solve_ecpd(kernel, post, priors, x, y, lambda_, sigma2)

        p_tilde = np.zeros((4, 6))
        for n, m in priors.pairs:
            p_tilde[m, n] = 1.0
        kappa = sigma2 / alpha_sq
        d_p = np.diag(post.p.sum(axis=1))
        d_pt = np.diag(p_tilde.sum(axis=1))
        a = d_p @ kernel.g + kappa * d_pt @ kernel.g + lambda_ * sigma2 * np.eye(4)
        b = post.p @ x - d_p @ y + kappa * (p_tilde @ x - d_pt @ y)
        assert np.allclose(w, np.linalg.solve(a, b), rtol=1e-10, atol=1e-12)

    def test_pair_order_irrelevant(self, instance):
        '''Test permuted pair lists produce identical coefficients'''
        x, y, kernel, post = instance
        a = CorrespondencePriors.from_pairs([(0, 0), (4, 1), (2, 3)], 0.5)
        b = CorrespondencePriors.from_pairs([(2, 3), (0, 0), (4, 1)], 0.5)
        w_a = mstep_solve_ecpd(kernel, post, a, x, y, 2.0, 0.9)
        w_b = mstep_solve_ecpd(kernel, post, b, x, y, 2.0, 0.9)
        assert np.array_equal(w_a, w_b)

    def test_pair_out_of_range(self, instance):
        '''Test pairs must index into the point sets'''
        x, y, kernel, post = instance
        priors = CorrespondencePriors.from_pairs([(6, 0)], 1.0)
        with pytest.raises(InputError):
            mstep_solve_ecpd(kernel, post, priors, x, y, 2.0, 0.9)


class TestRegisterEcpd:
    '''Test cases for register_ecpd'''

    def test_empty_priors_match_cpd(self, rng):
        '''Test no pairs reproduces the CPD run'''
        x = rng.normal(size=(12, 2))
        y = rng.normal(size=(10, 2))
        cpd = register_cpd(x, y)
        ecpd = register_ecpd(x, y, CorrespondencePriors.empty())
        assert np.array_equal(cpd.w, ecpd.w)
        assert _without_wall(cpd.trace) == _without_wall(ecpd.trace)

    def test_pinned_pair_is_pulled(self):
        '''Test a reliable pair ends closer than plain CPD puts it'''
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        y = np.array([[0.5, 1.0]])
        config = RegistrationConfig(omega=0.0)
        cpd = register_cpd(x, y, config)
        ecpd = register_ecpd(x, y, CorrespondencePriors.from_pairs([(0, 0)], 1e-2), config)
        cpd_gap = np.linalg.norm(cpd.transformed.points[0] - x[0])
        ecpd_gap = np.linalg.norm(ecpd.transformed.points[0] - x[0])
        assert ecpd_gap < cpd_gap

    def test_continuous_in_alpha(self):
        '''Test a 1% change of alpha^2 moves the field by under 1%'''
        x = np.array([[0.0, 0.0], [1.0, 0.0]])
        y = np.array([[0.5, 1.0]])
        config = RegistrationConfig(omega=0.0)
        w1 = register_ecpd(x, y, CorrespondencePriors.from_pairs([(0, 0)], 1e-2), config).w
        w2 = register_ecpd(x, y, CorrespondencePriors.from_pairs([(0, 0)], 1.01e-2), config).w
        assert np.linalg.norm(w1 - w2) <= 0.01 * np.linalg.norm(w1)

    def test_correct_pairs_recover_deformation(self, recovery_spec):
        '''Test reliable true correspondences still reach the data'''
        scene = generate_scene(recovery_spec)
        priors = CorrespondencePriors.from_pairs([(m, m) for m in range(0, scene.n_inliers, 4)], 1.0)
        result = register_ecpd(
            scene.data, scene.template, priors, RegistrationConfig(omega=0.0, max_iters=300)
        )
        error = np.linalg.norm(result.transformed.points - scene.inliers.points, axis=1)
        assert float(np.mean(error)) < 0.05 * recovery_spec.cluster_spread

    def test_prior_energy_in_objective(self, rng):
        '''Test the objective includes the prior term'''
        x = rng.normal(size=(5, 2))
        y = rng.normal(size=(5, 2))
        result = register_ecpd(x, y, CorrespondencePriors.from_pairs([(0, 0)], 0.5))
        record = result.trace[0]
        assert record.objective > record.nll
