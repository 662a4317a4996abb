'''
**solvers.ccpd**
Cluster coherent point drift: a two-level mixture in which a data point
is explained only by template points of its own cluster, and the M-step
blends the per-cluster systems by the block weights w_c = P(c) N_lab / N_c.
'''
from __future__ import annotations

import numpy as np

from cluster_cpd.core import (
    DegenerateClusterError,
    InputError,
    KernelMatrix,
    Method,
    PointSet,
    RegistrationConfig,
    RegistrationResult,
    as_point_set,
    log_mixture_density,
    squared_distances
)
from cluster_cpd.core.internals.utils import (
    require_omega,
    require_positive,
    require_same_dim
)
from cluster_cpd.corelib.types.core import ArrayLike, FloatArray
from .base import EMStepper, prune_row_mass, run_em, sigma2_from_sse, solve_weighted
from .cpd import responsibilities
from .interfaces import ClusterBlock, ClusterPosteriors, ClusterPriorModel

__all__ = [
    'estep_ccpd',
    'mstep_solve_ccpd',
    'update_sigma2_ccpd',
    'register_ccpd',
    'CcpdStepper'
]


def cluster_members(prior_model: ClusterPriorModel) -> list[tuple[int, np.ndarray, np.ndarray]]:
    '''
    ``(c, data_index, template_index)`` for every cluster, in cluster order.

    Raises
    ------
    DegenerateClusterError
        If a cluster has data points but no template points.
    '''
    members = []
    for c in range(1, prior_model.n_clusters + 1):
        data_index = prior_model.data_labels.members(c)
        template_index = prior_model.template_labels.members(c)
        if data_index.size and not template_index.size:
            raise DegenerateClusterError(cluster=c, reason='no template points carry this label')
        members.append((c, data_index, template_index))
    return members


def _check_sizes(x: FloatArray, y: FloatArray, prior_model: ClusterPriorModel) -> None:
    if len(prior_model.data_labels) != x.shape[0]:
        raise InputError(
            f'{len(prior_model.data_labels)} data labels for {x.shape[0]} data points'
        )
    if len(prior_model.template_labels) != y.shape[0]:
        raise InputError(
            f'{len(prior_model.template_labels)} template labels for {y.shape[0]} template points'
        )


def cluster_posteriors(
    x: FloatArray,
    t: FloatArray,
    sigma2: float,
    omega: float,
    prior_model: ClusterPriorModel,
    members: list[tuple[int, np.ndarray, np.ndarray]]
) -> ClusterPosteriors:
    blocks = []
    np_bar = 0.0
    n_evaluations = 0
    for (c, data_index, template_index), weight in zip(members, prior_model.block_weights):
        p = responsibilities(x[data_index], t[template_index], sigma2, omega)
        p.setflags(write=False)
        blocks.append(ClusterBlock(c, data_index, template_index, p))
        np_bar += weight * float(p.sum())
        n_evaluations += p.size
    return ClusterPosteriors(
        blocks=tuple(blocks),
        block_weights=prior_model.block_weights,
        np_bar=np_bar,
        n_data=x.shape[0],
        n_template=t.shape[0],
        n_evaluations=n_evaluations
    )


def ccpd_system(
    posteriors: ClusterPosteriors,
    x: FloatArray,
    y: FloatArray
) -> tuple[FloatArray, FloatArray]:
    '''
    Row weights sum_c w_c P(c)1 and right-hand side
    sum_c w_c (P(c) X - d(P(c)1) Y).
    '''
    row_mass = prune_row_mass(posteriors.weighted_row_sums())
    rhs = posteriors.weighted_data(x) - row_mass[:, None] * y
    rhs[row_mass == 0.0] = 0.0
    return row_mass, rhs


def cluster_sse(x: FloatArray, t: FloatArray, posteriors: ClusterPosteriors) -> float:
    '''sum_c w_c sum_mn P(m | x_n, c) |x_n - t_m|^2.'''
    total = 0.0
    for block, weight in zip(posteriors.blocks, posteriors.block_weights):
        sqd = squared_distances(t[block.template_index], x[block.data_index])
        total += weight * float(np.sum(block.p * sqd))
    return total


def cluster_nll(
    x: FloatArray,
    t: FloatArray,
    sigma2: float,
    omega: float,
    prior_model: ClusterPriorModel,
    members: list[tuple[int, np.ndarray, np.ndarray]]
) -> float:
    '''
    Block-weighted negative log-likelihood sum_c w_c (-sum_n log p_c(x_n)),
    p_c being the per-cluster mixture with its own outlier term. With the
    default weighting every w_c is 1 and this is -sum_n log p(x_n | c_n).
    '''
    total = 0.0
    for (_, data_index, template_index), weight in zip(members, prior_model.block_weights):
        if not data_index.size:
            continue
        log_p = log_mixture_density(x[data_index], t[template_index], sigma2, omega)
        total += weight * -float(np.sum(log_p))
    return total


def estep_ccpd(
    data: PointSet | ArrayLike,
    transformed: PointSet | ArrayLike,
    sigma2: float,
    omega: float,
    prior_model: ClusterPriorModel
) -> ClusterPosteriors:
    '''
    Per-cluster posteriors P(m | x_n, c).

    Within cluster c the responsibilities are those of CPD restricted to the
    cluster's members, with the outlier constant scaled by M_c / N_c.
    Pairs that share no cluster are never evaluated.

    Raises
    ------
    ParameterError
        If ``sigma2 <= 0`` or omega is out of range.
    DegenerateClusterError
        If a cluster has data points but no template points.
    '''
    sigma2 = require_positive(sigma2, name='sigma2')
    omega = require_omega(omega)
    x = as_point_set(data).points
    t = as_point_set(transformed).points
    require_same_dim(x, t)
    _check_sizes(x, t, prior_model)
    return cluster_posteriors(x, t, sigma2, omega, prior_model, cluster_members(prior_model))


def mstep_solve_ccpd(
    kernel: KernelMatrix,
    posteriors: ClusterPosteriors,
    prior_model: ClusterPriorModel,
    data: PointSet | ArrayLike,
    template: PointSet | ArrayLike,
    lambda_: float,
    sigma2: float,
    *,
    iteration: int | None = None
) -> FloatArray:
    '''
    Solve (sum_c w_c d(P(c)1) G + lambda sigma^2 I) W
    = sum_c w_c (P(c) X - d(P(c)1) Y).

    ``posteriors`` carries the block weights it was computed with; ``prior_model``
    is checked against the point sets.
    '''
    lambda_ = require_positive(lambda_, name='lambda')
    sigma2 = require_positive(sigma2, name='sigma2')
    x = as_point_set(data).points
    y = as_point_set(template).points
    require_same_dim(x, y)
    _check_sizes(x, y, prior_model)

    row_mass, rhs = ccpd_system(posteriors, x, y)
    return solve_weighted(kernel.g, row_mass, rhs, lambda_, sigma2, iteration=iteration)


def update_sigma2_ccpd(
    data: PointSet | ArrayLike,
    template: PointSet | ArrayLike,
    kernel: KernelMatrix,
    w: ArrayLike,
    posteriors: ClusterPosteriors,
    prior_model: ClusterPriorModel
) -> float:
    '''
    sigma^2 for T = Y + G W under cluster-blended posteriors.

    Equal to the trace form over the blended matrices divided by
    ``N_p_bar * D``; evaluated block by block as
    ``sum_c w_c sum_mn P(m | x_n, c) |x_n - t_m|^2``.

    Raises
    ------
    DegeneratePosteriorError
        If the blended posterior mass is zero.
    '''
    x = as_point_set(data).points
    y = as_point_set(template).points
    require_same_dim(x, y)
    _check_sizes(x, y, prior_model)
    t = y + kernel.g @ np.asarray(w, dtype=np.float64)
    return sigma2_from_sse(cluster_sse(x, t, posteriors), posteriors.np_bar, x.shape[1])


class CcpdStepper(EMStepper):
    method = Method.CCPD

    def __init__(
        self,
        data: PointSet,
        template: PointSet,
        prior_model: ClusterPriorModel,
        config: RegistrationConfig
    ) -> None:
        super().__init__(data, template, config)
        _check_sizes(data.points, template.points, prior_model)
        self.prior_model = prior_model
        self.members = cluster_members(prior_model)

    def estep(self, t: FloatArray, sigma2: float) -> ClusterPosteriors:
        return cluster_posteriors(
            self.data.points, t, sigma2, self.config.omega, self.prior_model, self.members
        )

    def mstep(self, posterior: ClusterPosteriors, sigma2: float, *, iteration: int) -> FloatArray:
        row_mass, rhs = ccpd_system(posterior, self.data.points, self.template.points)
        return solve_weighted(
            self.g, row_mass, rhs, self.config.lambda_, sigma2, iteration=iteration
        )

    def weighted_sse(self, t: FloatArray, posterior: ClusterPosteriors) -> tuple[float, float]:
        return cluster_sse(self.data.points, t, posterior), posterior.np_bar

    def nll(self, t: FloatArray, sigma2: float) -> float:
        return cluster_nll(
            self.data.points, t, sigma2, self.config.omega, self.prior_model, self.members
        )


def register_ccpd(
    data: PointSet | ArrayLike,
    template: PointSet | ArrayLike,
    prior_model: ClusterPriorModel,
    config: RegistrationConfig | None = None
) -> RegistrationResult:
    '''
    Register ``template`` onto ``data`` using cluster labels on both sets.

    Parameters
    ----------
    data, template : PointSet | ArrayLike
        Fixed set X and moving set Y.
    prior_model : ClusterPriorModel
        Labels for both sets and the cluster probabilities P(c).
    config : RegistrationConfig | None
        Solver parameters, defaults when omitted.

    Raises
    ------
    DegenerateClusterError
        If a cluster has data points but no template points.
    NumericalError
        If an M-step system cannot be solved.

    Examples
    --------
    >>> from cluster_cpd.core import ClusterAssignment
    >>> labels = ClusterAssignment([1, 1, 2])
    >>> model = ClusterPriorModel.from_labels(labels, labels)
    >>> pts = [[0.0, 0.0], [1.0, 0.0], [5.0, 5.0]]
    >>> register_ccpd(pts, pts, model).method.value
    'ccpd'
    '''
    stepper = CcpdStepper(
        as_point_set(data),
        as_point_set(template),
        prior_model,
        config or RegistrationConfig()
    )
    return run_em(stepper)
