'''
**core.internals.interfaces** module
Value types, enums and configuration for the registration toolkit.

All value types are frozen; their arrays are private read-only copies, so
instances can be shared freely between threads.
'''

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from cluster_cpd.corelib.types.core import ArrayLike, FloatArray, IntArray, UNASSIGNED_LABEL
from .exceptions import InputError, ParameterError
from .utils import frozen_array, require_finite, require_omega, require_positive


class Method(StrEnum):
    '''
    Registration algorithms provided by the toolkit.
    '''
    CPD = 'cpd'
    ECPD = 'ecpd'
    CCPD = 'ccpd'


class ClusterWeighting(StrEnum):
    '''
    How cluster probabilities P(c) are derived from labels.
    '''
    DATA_FRACTION = 'data-fraction'
    UNIFORM = 'uniform'


class TerminationReason(StrEnum):
    '''
    Why an EM loop stopped.
    '''
    TOLERANCE = 'tolerance'
    SIGMA2_FLOOR = 'sigma2-floor'
    MAX_ITERS = 'max-iters'


@dataclass(frozen=True, slots=True, eq=False)
class PointSet:
    '''
    An ordered set of N points in D dimensions.

    Attributes
    ----------
    points : FloatArray
        N x D float64 coordinates, read-only.
    '''
    points: FloatArray

    def __post_init__(self) -> None:
        arr = frozen_array(self.points, ndim=2, name='points')
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InputError(f'A point set needs N >= 1 and D >= 1, got shape {arr.shape}')
        require_finite(arr, name='points')
        object.__setattr__(self, 'points', arr)

    @property
    def n_points(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.n_points

    def subset(self, indices: ArrayLike) -> PointSet:
        '''Points at ``indices`` (0-based), order preserved.'''
        return PointSet(self.points[np.asarray(indices, dtype=np.int64)])


@dataclass(frozen=True, slots=True, eq=False)
class ClusterAssignment:
    '''
    Per-point cluster labels in ``1..C``.

    Label ``0`` marks an unassigned point (it shares no cluster with
    anything). Every declared cluster ``1..C`` has at least one member.

    Attributes
    ----------
    labels : IntArray
        Length-N int64 labels, read-only.
    n_clusters : int
        C, the number of declared clusters. Derived from ``labels``
        when omitted.
    '''
    labels: IntArray
    n_clusters: int = 0

    def __post_init__(self) -> None:
        raw = np.asarray(self.labels)
        if raw.dtype.kind == 'f':
            if not np.all(np.isfinite(raw)) or not np.all(raw == np.round(raw)):
                raise InputError('Cluster labels must be integers')
        arr = frozen_array(raw, dtype=np.int64, ndim=1, name='labels')
        if arr.size == 0:
            raise InputError('Cluster labels must not be empty')
        if np.any(arr < UNASSIGNED_LABEL):
            raise InputError('Cluster labels must be >= 0')

        n_clusters = int(self.n_clusters) or int(arr.max())
        if n_clusters < 1:
            raise InputError('At least one point must carry a cluster label')
        if arr.max() > n_clusters:
            raise InputError(f'Label {int(arr.max())} exceeds the declared {n_clusters} clusters')

        present = np.unique(arr[arr != UNASSIGNED_LABEL])
        if present.size != n_clusters:
            missing = sorted(set(range(1, n_clusters + 1)) - set(present.tolist()))
            raise InputError(f'Declared clusters {missing} have no members')

        object.__setattr__(self, 'labels', arr)
        object.__setattr__(self, 'n_clusters', n_clusters)

    @classmethod
    def from_raw(cls, raw: ArrayLike) -> Self:
        '''
        Build an assignment from arbitrary non-negative integer labels.

        Positive labels are re-indexed densely to ``1..C`` in order of
        first appearance; ``0`` stays unassigned.

        Examples
        --------
        >>> ClusterAssignment.from_raw([7, 7, 3]).labels.tolist()
        [1, 1, 2]
        '''
        values = np.asarray(raw)
        if values.ndim != 1:
            raise InputError('Cluster labels must be one-dimensional')
        if values.dtype.kind == 'f' and not np.all(values == np.round(values)):
            raise InputError('Cluster labels must be integers')
        values = values.astype(np.int64)
        if np.any(values < UNASSIGNED_LABEL):
            raise InputError('Cluster labels must be >= 0')

        mapping: dict[int, int] = {}
        dense = np.zeros_like(values)
        for i, label in enumerate(values.tolist()):
            if label == UNASSIGNED_LABEL:
                continue
            dense[i] = mapping.setdefault(label, len(mapping) + 1)
        return cls(dense, len(mapping))

    @classmethod
    def single(cls, n_points: int) -> Self:
        '''Every one of ``n_points`` points in cluster 1.'''
        return cls(np.ones(n_points, dtype=np.int64), 1)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    def members(self, cluster: int) -> IntArray:
        '''0-based indices of the points labelled ``cluster``.'''
        return np.flatnonzero(self.labels == cluster)

    def counts(self) -> IntArray:
        '''Member count per cluster, index ``c - 1`` for cluster ``c``.'''
        return np.bincount(self.labels, minlength=self.n_clusters + 1)[1:]

    @property
    def assigned(self) -> np.ndarray:
        '''Boolean mask of points carrying a real cluster label.'''
        return self.labels != UNASSIGNED_LABEL


class RegistrationConfig(BaseModel):
    '''
    Parameters shared by the three EM solvers.

    Defaults: beta^2 = 2, lambda = 2, omega = 0.1.
    '''
    model_config = ConfigDict(frozen=True, extra='forbid', populate_by_name=True)

    beta_sq: float = 2.0
    lambda_: float = Field(default=2.0, alias='lambda')
    omega: float = 0.1
    max_iters: int = 150
    rel_tol: float = 1e-5
    sigma2_floor: float = 1e-8
    cluster_weighting: ClusterWeighting = ClusterWeighting.DATA_FRACTION

    @model_validator(mode='after')
    def _check_ranges(self) -> Self:
        require_positive(self.beta_sq, name='beta_sq')
        require_positive(self.lambda_, name='lambda')
        require_omega(self.omega)
        require_positive(self.rel_tol, name='rel_tol')
        require_positive(self.sigma2_floor, name='sigma2_floor')
        if self.max_iters < 1:
            raise ParameterError(name='max_iters', value=self.max_iters, reason='Must be >= 1')
        return self


@dataclass(frozen=True, slots=True, eq=False)
class KernelMatrix:
    '''
    The M x M Gaussian kernel over the template points.
    '''
    g: FloatArray

    def __post_init__(self) -> None:
        arr = frozen_array(self.g, ndim=2, name='g')
        if arr.shape[0] != arr.shape[1]:
            raise InputError(f'Kernel matrix must be square, got shape {arr.shape}')
        require_finite(arr, name='g')
        object.__setattr__(self, 'g', arr)

    @property
    def size(self) -> int:
        return int(self.g.shape[0])


@dataclass(frozen=True, slots=True, eq=False)
class DisplacementField:
    '''
    v(z) = sum_m w_m exp(-|z - y_m|^2 / (2 beta^2)) anchored on a template.

    Attributes
    ----------
    w : FloatArray
        M x D coefficients.
    template : PointSet
        The M anchor points y_m.
    beta_sq : float
        Kernel width beta^2.
    '''
    w: FloatArray
    template: PointSet
    beta_sq: float

    def __post_init__(self) -> None:
        arr = frozen_array(self.w, ndim=2, name='w')
        if arr.shape != self.template.points.shape:
            raise InputError(
                f'Coefficients shape {arr.shape} does not match template shape '
                f'{self.template.points.shape}'
            )
        require_finite(arr, name='w')
        object.__setattr__(self, 'w', arr)
        object.__setattr__(self, 'beta_sq', require_positive(self.beta_sq, name='beta_sq'))


@dataclass(frozen=True, slots=True)
class IterationRecord:
    '''
    Diagnostics of one EM iteration, evaluated after the sigma^2 update.

    Attributes
    ----------
    iteration : int
        1-based iteration index.
    sigma2 : float
        sigma^2 at the end of the iteration.
    nll : float
        Negative log-likelihood (cluster weighted for CCPD).
    q_value : float
        Upper bound Q at the new parameters under the iteration's posteriors.
    objective : float
        ``nll`` plus the coherence penalty (and the ECPD prior term), the
        quantity EM never increases.
    wall_ms : float
        Wall-clock time of the iteration in milliseconds.
    '''
    iteration: int
    sigma2: float
    nll: float
    q_value: float
    objective: float
    wall_ms: float


@dataclass(frozen=True, slots=True, eq=False)
class RegistrationResult:
    '''
    Outcome of a registration: the learned field and the aligned template.
    '''
    field: DisplacementField
    transformed: PointSet
    sigma2_final: float
    iterations: int
    trace: tuple[IterationRecord, ...]
    termination: TerminationReason
    method: Method = Method.CPD

    def __post_init__(self) -> None:
        if len(self.trace) != self.iterations:
            raise InputError(
                f'Trace holds {len(self.trace)} records for {self.iterations} iterations'
            )
        if not math.isfinite(self.sigma2_final) or self.sigma2_final < 0.0:
            raise ParameterError(name='sigma2_final', value=self.sigma2_final, reason='Must be >= 0')

    @property
    def converged(self) -> bool:
        '''True unless the loop ran out of iterations.'''
        return self.termination is not TerminationReason.MAX_ITERS

    @property
    def w(self) -> FloatArray:
        return self.field.w


def as_point_set(value: PointSet | ArrayLike) -> PointSet:
    '''Return ``value`` unchanged if it is a PointSet, else wrap it.'''
    if isinstance(value, PointSet):
        return value
    return PointSet(np.asarray(value, dtype=np.float64))
