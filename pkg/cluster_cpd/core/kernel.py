'''
**core.kernel**
The Gaussian kernel governing motion coherence and the displacement
field built on it.
'''
from __future__ import annotations

import numpy as np

from cluster_cpd.corelib.types.core import ArrayLike, FloatArray
from .internals.interfaces import DisplacementField, KernelMatrix, PointSet, as_point_set
from .internals.utils import require_positive, require_same_dim, squared_distances

__all__ = [
    'gaussian_kernel',
    'kernel_between',
    'apply_displacement'
]


def kernel_between(query: FloatArray, anchors: FloatArray, beta_sq: float) -> FloatArray:
    '''
    Gaussian affinities exp(-|q - a|^2 / (2 beta^2)), shape ``len(query) x len(anchors)``.
    '''
    return np.exp(-squared_distances(query, anchors) / (2.0 * beta_sq))


def gaussian_kernel(template: PointSet | ArrayLike, beta_sq: float) -> KernelMatrix:
    '''
    Build the M x M kernel G with g_ij = exp(-|y_i - y_j|^2 / (2 beta^2)).

    Parameters
    ----------
    template : PointSet | ArrayLike
        The template set Y.
    beta_sq : float
        Kernel width beta^2, strictly positive.

    Returns
    -------
    KernelMatrix
        Symmetric with unit diagonal and entries in (0, 1].

    Raises
    ------
    ParameterError
        If ``beta_sq`` is not positive.
    InputError
        If the template holds non-finite coordinates.

    Examples
    --------
    >>> float(gaussian_kernel([[0.0, 0.0], [2.0, 0.0]], 2.0).g[0, 1])  # e^-1
    0.36787944117144233
    '''
    beta_sq = require_positive(beta_sq, name='beta_sq')
    y = as_point_set(template).points
    return KernelMatrix(kernel_between(y, y, beta_sq))


def apply_displacement(field: DisplacementField, query: PointSet | ArrayLike) -> PointSet:
    '''
    Move arbitrary points with a learned field: z' = z + v(z).

    Applying the field to its own template reproduces ``Y + G W``, which is
    how a full template is personalized from the registered subset.

    Parameters
    ----------
    field : DisplacementField
        Coefficients W with their template anchors and beta^2.
    query : PointSet | ArrayLike
        Points to move, same dimension as the template.

    Returns
    -------
    PointSet
        The displaced points, in query order.
    '''
    z = as_point_set(query).points
    anchors = field.template.points
    require_same_dim(z, anchors, what='query and template')
    return PointSet(z + kernel_between(z, anchors, field.beta_sq) @ field.w)
