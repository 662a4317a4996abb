'''
**solvers.ecpd**
CPD extended with sparse correspondence priors of a shared reliability.
'''
from __future__ import annotations

import numpy as np

from cluster_cpd.core import (
    ClusterAssignment,
    InputError,
    KernelMatrix,
    Method,
    PointSet,
    RegistrationConfig,
    RegistrationResult,
    as_point_set
)
from cluster_cpd.core.internals.utils import require_positive, require_same_dim
from cluster_cpd.corelib.types.core import ArrayLike, FloatArray, UNASSIGNED_LABEL
from .base import run_em, solve_weighted
from .cpd import CpdStepper, cpd_system
from .interfaces import DEFAULT_ALPHA_SQ, CorrespondencePriors, PosteriorMatrix

__all__ = [
    'priors_from_clusters',
    'mstep_solve_ecpd',
    'register_ecpd',
    'EcpdStepper'
]


def priors_from_clusters(
    data_labels: ClusterAssignment,
    template_labels: ClusterAssignment,
    *,
    alpha_sq: float = DEFAULT_ALPHA_SQ
) -> CorrespondencePriors:
    '''
    Every (x_n, y_m) pair sharing a cluster label becomes a correspondence.

    Unassigned points (label 0) take part in no pair.

    Raises
    ------
    InputError
        If the two assignments declare a different number of clusters.

    Examples
    --------
    >>> a = ClusterAssignment([1, 1, 2])
    >>> b = ClusterAssignment([1, 2, 2])
    >>> len(priors_from_clusters(a, b))
    4
    '''
    if data_labels.n_clusters != template_labels.n_clusters:
        raise InputError(
            f'Data declares {data_labels.n_clusters} clusters but template declares '
            f'{template_labels.n_clusters}'
        )
    same = (
        (data_labels.labels[:, None] == template_labels.labels[None, :])
        & (data_labels.labels[:, None] != UNASSIGNED_LABEL)
    )
    n_idx, m_idx = np.nonzero(same)
    return CorrespondencePriors(n_idx, m_idx, alpha_sq)


def ecpd_system(
    posterior: PosteriorMatrix,
    x: FloatArray,
    y: FloatArray,
    prior_rows: FloatArray,
    prior_data: FloatArray,
    kappa: float
) -> tuple[FloatArray, FloatArray]:
    '''
    Row weights P1 + k P~1 and right-hand side
    PX - d(P1) Y + k (P~X - d(P~1) Y), with k = sigma^2 / alpha^2.
    '''
    row_mass, rhs = cpd_system(posterior, x, y)
    weights = row_mass + kappa * prior_rows
    rhs = rhs + kappa * (prior_data - prior_rows[:, None] * y)
    return weights, rhs


def mstep_solve_ecpd(
    kernel: KernelMatrix,
    posterior: PosteriorMatrix,
    priors: CorrespondencePriors,
    data: PointSet | ArrayLike,
    template: PointSet | ArrayLike,
    lambda_: float,
    sigma2: float,
    *,
    iteration: int | None = None
) -> FloatArray:
    '''
    Solve (d(P1) G + k d(P~1) G + lambda sigma^2 I) W
    = PX - d(P1) Y + k (P~X - d(P~1) Y) with k = sigma^2 / alpha^2.

    With no pairs this is exactly the CPD M-step.
    '''
    lambda_ = require_positive(lambda_, name='lambda')
    sigma2 = require_positive(sigma2, name='sigma2')
    x = as_point_set(data).points
    y = as_point_set(template).points
    require_same_dim(x, y)
    priors.validate_for(x.shape[0], y.shape[0])

    if len(priors) == 0:
        row_mass, rhs = cpd_system(posterior, x, y)
    else:
        m = y.shape[0]
        row_mass, rhs = ecpd_system(
            posterior, x, y,
            priors.row_sums(m),
            priors.weighted_data(x, m),
            sigma2 / priors.alpha_sq
        )
    return solve_weighted(kernel.g, row_mass, rhs, lambda_, sigma2, iteration=iteration)


class EcpdStepper(CpdStepper):
    '''
    CPD stepper whose M-step also pulls paired template points towards
    their data partners. The sigma^2 update is the CPD one.
    '''
    method = Method.ECPD

    def __init__(
        self,
        data: PointSet,
        template: PointSet,
        priors: CorrespondencePriors,
        config: RegistrationConfig
    ) -> None:
        super().__init__(data, template, config)
        priors.validate_for(data.n_points, template.n_points)
        self.priors = priors
        m = template.n_points
        self._prior_rows = priors.row_sums(m)
        self._prior_data = priors.weighted_data(data.points, m)

    def mstep(self, posterior: PosteriorMatrix, sigma2: float, *, iteration: int) -> FloatArray:
        if len(self.priors) == 0:
            return super().mstep(posterior, sigma2, iteration=iteration)
        row_mass, rhs = ecpd_system(
            posterior,
            self.data.points,
            self.template.points,
            self._prior_rows,
            self._prior_data,
            sigma2 / self.priors.alpha_sq
        )
        return solve_weighted(
            self.g, row_mass, rhs, self.config.lambda_, sigma2, iteration=iteration
        )

    def prior_energy(self, t: FloatArray) -> float:
        '''(1 / (2 alpha^2)) sum over pairs of |x_n - t_m|^2.'''
        if len(self.priors) == 0:
            return 0.0
        diff = self.data.points[self.priors.data_index] - t[self.priors.template_index]
        return float(np.sum(diff * diff)) / (2.0 * self.priors.alpha_sq)


def register_ecpd(
    data: PointSet | ArrayLike,
    template: PointSet | ArrayLike,
    priors: CorrespondencePriors,
    config: RegistrationConfig | None = None
) -> RegistrationResult:
    '''
    Register ``template`` onto ``data`` with correspondence priors.

    Parameters
    ----------
    data, template : PointSet | ArrayLike
        Fixed set X and moving set Y.
    priors : CorrespondencePriors
        Known pairs and their reliability alpha^2 (smaller is stronger).
    config : RegistrationConfig | None
        Solver parameters, defaults when omitted.

    Raises
    ------
    InputError
        If a pair indexes outside the point sets.
    NumericalError
        If an M-step system cannot be solved.
    '''
    stepper = EcpdStepper(
        as_point_set(data),
        as_point_set(template),
        priors,
        config or RegistrationConfig()
    )
    return run_em(stepper)
