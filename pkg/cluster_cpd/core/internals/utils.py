'''
**core.internals.utils**
Array coercion and validation helpers shared by the value types and
operations of the core package.
'''
from __future__ import annotations

import math

import numpy as np
from scipy.spatial.distance import cdist

from cluster_cpd.corelib.types.core import ArrayLike, FloatArray
from .exceptions import InputError, ParameterError


def frozen_array(value: ArrayLike, *, dtype: type = np.float64, ndim: int, name: str) -> np.ndarray:
    '''
    Copy ``value`` into a read-only array of the given dtype and rank.

    Parameters
    ----------
    value : ArrayLike
        Anything ``numpy.array`` accepts.
    dtype : type
        Target dtype, float64 unless stated.
    ndim : int
        Required number of dimensions.
    name : str
        Field name used in error messages.

    Raises
    ------
    InputError
        If the value cannot be converted or has the wrong rank.
    '''
    try:
        arr = np.array(value, dtype=dtype, copy=True)
    except (TypeError, ValueError) as e:
        raise InputError(f'{name} cannot be converted to {np.dtype(dtype).name}', cause=e) from e

    if arr.ndim != ndim:
        raise InputError(f'{name} must be {ndim}-dimensional, got shape {arr.shape}')

    arr.setflags(write=False)
    return arr


def require_finite(arr: np.ndarray, *, name: str) -> None:
    '''Raise InputError if ``arr`` holds NaN or Inf.'''
    if not np.all(np.isfinite(arr)):
        raise InputError(f'{name} contains non-finite values')


def require_positive(value: float, *, name: str) -> float:
    '''Return ``value`` as float if it is finite and strictly positive.'''
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(name=name, value=value, reason='Must be finite and > 0')
    return value


def require_omega(omega: float) -> float:
    '''Validate the outlier weight, which must lie in [0, 1).'''
    omega = float(omega)
    if not math.isfinite(omega) or not 0.0 <= omega < 1.0:
        raise ParameterError(
            name='omega',
            value=omega,
            reason='Outlier fraction must satisfy 0 <= omega < 1'
        )
    return omega


def require_same_dim(a: np.ndarray, b: np.ndarray, *, what: str = 'point sets') -> None:
    '''Raise InputError when two N x D arrays disagree on D.'''
    if a.shape[1] != b.shape[1]:
        raise InputError(
            f'Dimension mismatch between {what}: {a.shape[1]} != {b.shape[1]}'
        )


def squared_distances(a: FloatArray, b: FloatArray) -> FloatArray:
    '''
    Pairwise squared Euclidean distances, shape ``len(a) x len(b)``.

    Every entry is computed independently from its two points, so
    ``squared_distances(y, y)`` is exactly symmetric with a zero diagonal.
    '''
    return cdist(a, b, metric='sqeuclidean')
