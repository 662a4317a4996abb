'''
**solvers.cpd**
Non-rigid coherent point drift: Gaussian-mixture EM with a motion
coherence penalty on the displacement field.
'''
from __future__ import annotations

import math

import numpy as np

from cluster_cpd.core import (
    KernelMatrix,
    PointSet,
    RegistrationConfig,
    RegistrationResult,
    Method,
    as_point_set,
    log_mixture_density,
    squared_distances
)
from cluster_cpd.core.internals.utils import require_omega, require_positive, require_same_dim
from cluster_cpd.corelib.types.core import ArrayLike, FloatArray
from .base import EMStepper, prune_row_mass, run_em, sigma2_from_sse, solve_weighted
from .interfaces import PosteriorMatrix

__all__ = [
    'estep',
    'mstep_solve',
    'update_sigma2_cpd',
    'register_cpd',
    'CpdStepper'
]


def responsibilities(x: FloatArray, t: FloatArray, sigma2: float, omega: float) -> FloatArray:
    '''
    M x N posteriors of the centroids ``t`` for the points ``x``.

    Exponents are shifted by their column maximum before exponentiating,
    and the outlier constant is added in the same shifted domain.
    '''
    n, d = x.shape
    m = t.shape[0]
    exponents = -squared_distances(t, x) / (2.0 * sigma2)
    col_max = exponents.max(axis=0)
    kernel = np.exp(exponents - col_max)
    denom = kernel.sum(axis=0)
    if omega > 0.0:
        log_c = (
            0.5 * d * math.log(2.0 * math.pi * sigma2)
            + math.log(omega) - math.log1p(-omega)
            + math.log(m) - math.log(n)
        )
        with np.errstate(over='ignore'):
            denom = denom + np.exp(log_c - col_max)
    return kernel / denom


def weighted_sse(x: FloatArray, t: FloatArray, p: FloatArray) -> float:
    '''sum_mn p_mn |x_n - t_m|^2, the numerator of the sigma^2 rule.'''
    return float(np.sum(p * squared_distances(t, x)))


def cpd_system(
    posterior: PosteriorMatrix,
    x: FloatArray,
    y: FloatArray
) -> tuple[FloatArray, FloatArray]:
    '''Row weights P1 and right-hand side PX - d(P1) Y of the CPD M-step.'''
    row_mass = prune_row_mass(posterior.row_sums())
    rhs = posterior.p @ x - row_mass[:, None] * y
    rhs[row_mass == 0.0] = 0.0
    return row_mass, rhs


def estep(
    data: PointSet | ArrayLike,
    transformed: PointSet | ArrayLike,
    sigma2: float,
    omega: float
) -> PosteriorMatrix:
    '''
    Posterior probabilities p_mn of centroid m having generated x_n.

    Parameters
    ----------
    data : PointSet | ArrayLike
        N x D data set X.
    transformed : PointSet | ArrayLike
        M x D current centroids T.
    sigma2 : float
        Isotropic variance, strictly positive.
    omega : float
        Outlier weight in [0, 1).

    Returns
    -------
    PosteriorMatrix
        With ``omega == 0`` every column sums to 1.

    Raises
    ------
    ParameterError
        If ``sigma2 <= 0`` or omega is out of range.

    Examples
    --------
    >>> post = estep([[0.0]], [[0.0], [1.0]], 0.5, 0.0)
    >>> [round(float(v), 6) for v in post.p[:, 0]]
    [0.731059, 0.268941]
    '''
    sigma2 = require_positive(sigma2, name='sigma2')
    omega = require_omega(omega)
    x = as_point_set(data).points
    t = as_point_set(transformed).points
    require_same_dim(x, t)

    p = responsibilities(x, t, sigma2, omega)
    return PosteriorMatrix(p, float(p.sum()), p.size)


def mstep_solve(
    kernel: KernelMatrix,
    posterior: PosteriorMatrix,
    data: PointSet | ArrayLike,
    template: PointSet | ArrayLike,
    lambda_: float,
    sigma2: float,
    *,
    iteration: int | None = None
) -> FloatArray:
    '''
    Solve (d(P1) G + lambda sigma^2 I) W = PX - d(P1) Y.

    This is the CPD stationarity condition multiplied through by d(P1), so
    centroids with no posterior mass simply contribute an empty row.

    Examples
    --------
    >>> from cluster_cpd.solvers.interfaces import PosteriorMatrix
    >>> w = mstep_solve(KernelMatrix([[1.0]]), PosteriorMatrix([[1.0]], 1.0, 1), [[1.0]], [[0.0]], 2.0, 0.5)
    >>> float(w[0, 0])
    0.5
    '''
    lambda_ = require_positive(lambda_, name='lambda')
    sigma2 = require_positive(sigma2, name='sigma2')
    x = as_point_set(data).points
    y = as_point_set(template).points
    require_same_dim(x, y)

    row_mass, rhs = cpd_system(posterior, x, y)
    return solve_weighted(kernel.g, row_mass, rhs, lambda_, sigma2, iteration=iteration)


def update_sigma2_cpd(
    data: PointSet | ArrayLike,
    transformed: PointSet | ArrayLike,
    posterior: PosteriorMatrix
) -> float:
    '''
    Posterior-weighted mean squared residual per dimension.

    Equal to the trace expression
    ``(tr(X^T d(P^T 1) X) - 2 tr((PX)^T T) + tr(T^T d(P1) T)) / (N_p D)``,
    evaluated as ``sum_mn p_mn |x_n - t_m|^2 / (N_p D)`` so that nearly
    aligned sets do not lose the residual to cancellation.

    Raises
    ------
    DegeneratePosteriorError
        If the posterior carries no mass.
    '''
    x = as_point_set(data).points
    t = as_point_set(transformed).points
    require_same_dim(x, t)
    return sigma2_from_sse(weighted_sse(x, t, posterior.p), posterior.n_p, x.shape[1])


class CpdStepper(EMStepper):
    method = Method.CPD

    def estep(self, t: FloatArray, sigma2: float) -> PosteriorMatrix:
        p = responsibilities(self.data.points, t, sigma2, self.config.omega)
        return PosteriorMatrix(p, float(p.sum()), p.size)

    def mstep(self, posterior: PosteriorMatrix, sigma2: float, *, iteration: int) -> FloatArray:
        row_mass, rhs = cpd_system(posterior, self.data.points, self.template.points)
        return solve_weighted(
            self.g, row_mass, rhs, self.config.lambda_, sigma2, iteration=iteration
        )

    def weighted_sse(self, t: FloatArray, posterior: PosteriorMatrix) -> tuple[float, float]:
        return weighted_sse(self.data.points, t, posterior.p), posterior.n_p

    def nll(self, t: FloatArray, sigma2: float) -> float:
        return -float(np.sum(log_mixture_density(self.data.points, t, sigma2, self.config.omega)))


def register_cpd(
    data: PointSet | ArrayLike,
    template: PointSet | ArrayLike,
    config: RegistrationConfig | None = None
) -> RegistrationResult:
    '''
    Register ``template`` onto ``data`` with non-rigid CPD.

    Parameters
    ----------
    data : PointSet | ArrayLike
        The fixed set X.
    template : PointSet | ArrayLike
        The moving set Y; the result moves it towards X.
    config : RegistrationConfig | None
        Solver parameters, defaults when omitted.

    Returns
    -------
    RegistrationResult

    Raises
    ------
    InputError
        On malformed or mismatched inputs.
    NumericalError
        If an M-step system cannot be solved.
    '''
    stepper = CpdStepper(as_point_set(data), as_point_set(template), config or RegistrationConfig())
    return run_em(stepper)
