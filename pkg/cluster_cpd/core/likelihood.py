'''
**core.likelihood**
Variance initialization and the Gaussian-mixture likelihood with a
uniform outlier component.
'''
from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from cluster_cpd.corelib.types.core import ArrayLike, FloatArray
from .internals.interfaces import PointSet, as_point_set
from .internals.utils import require_omega, require_positive, require_same_dim, squared_distances

__all__ = [
    'init_sigma2',
    'log_mixture_density',
    'negative_log_likelihood'
]


def init_sigma2(data: PointSet | ArrayLike, template: PointSet | ArrayLike) -> float:
    '''
    Initial variance: mean squared distance over all (x_n, y_m) pairs, over D.

    The pair sum is evaluated through the centroid decomposition
    ``M*Sx + N*Sy + N*M*|x_bar - y_bar|^2``, which avoids forming the N x M
    distance matrix and is exactly symmetric in its two arguments.

    Raises
    ------
    InputError
        On a dimension mismatch.

    Examples
    --------
    >>> init_sigma2([[0.0, 0.0]], [[3.0, 4.0]])
    12.5
    '''
    x = as_point_set(data).points
    y = as_point_set(template).points
    require_same_dim(x, y)

    n, d = x.shape
    m = y.shape[0]
    x_bar = x.mean(axis=0)
    y_bar = y.mean(axis=0)
    spread_x = float(np.sum((x - x_bar) ** 2))
    spread_y = float(np.sum((y - y_bar) ** 2))
    offset = float(np.sum((x_bar - y_bar) ** 2))

    total = m * spread_x + n * spread_y + n * m * offset
    return total / (d * m * n)


def log_mixture_density(
    x: FloatArray,
    t: FloatArray,
    sigma2: float,
    omega: float
) -> FloatArray:
    '''
    log p(x_n) for every data point under
    ``p(x) = omega/N + (1 - omega)/M * sum_m N(x; t_m, sigma^2 I)``.

    Evaluated with log-sum-exp so distant points never underflow to log(0).
    '''
    n, d = x.shape
    m = t.shape[0]
    exponents = -squared_distances(t, x) / (2.0 * sigma2)
    log_gauss = (
        logsumexp(exponents, axis=0)
        - math.log(m)
        - 0.5 * d * math.log(2.0 * math.pi * sigma2)
    )
    if omega == 0.0:
        return log_gauss
    return np.logaddexp(math.log(omega / n), math.log1p(-omega) + log_gauss)


def negative_log_likelihood(
    data: PointSet | ArrayLike,
    transformed: PointSet | ArrayLike,
    sigma2: float,
    omega: float
) -> float:
    '''
    E = -sum_n log p(x_n) for the current centroids and variance.

    Parameters
    ----------
    data : PointSet | ArrayLike
        The fixed set X.
    transformed : PointSet | ArrayLike
        The moved centroids T.
    sigma2 : float
        Isotropic variance, strictly positive.
    omega : float
        Outlier weight in [0, 1).

    Raises
    ------
    ParameterError
        If ``sigma2 <= 0`` or omega is out of range.

    Examples
    --------
    >>> round(negative_log_likelihood([[0.0, 0.0]], [[0.0, 0.0]], 1.0, 0.0), 6)
    1.837877
    '''
    sigma2 = require_positive(sigma2, name='sigma2')
    omega = require_omega(omega)
    x = as_point_set(data).points
    t = as_point_set(transformed).points
    require_same_dim(x, t)
    return -float(np.sum(log_mixture_density(x, t, sigma2, omega)))
