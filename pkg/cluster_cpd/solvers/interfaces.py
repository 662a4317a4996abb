'''
**solvers.interfaces**
Posterior containers and prior models consumed by the EM solvers.
'''
from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass
from typing import Final, Self

import numpy as np

from cluster_cpd.core import (
    ClusterAssignment,
    ClusterWeighting,
    DegenerateClusterError,
    InputError,
    ParameterError
)
from cluster_cpd.core.internals.utils import frozen_array
from cluster_cpd.corelib.types.core import FloatArray, IntArray

# alpha = 1e5
DEFAULT_ALPHA_SQ: Final[float] = 1e10

WEIGHT_SUM_TOL: Final[float] = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class PosteriorMatrix:
    '''
    E-step responsibilities of the M centroids for the N data points.

    Attributes
    ----------
    p : FloatArray
        M x N matrix, entry (m, n) is P(m | x_n).
    n_p : float
        Total posterior mass N_p = sum_mn p_mn, at most N.
    n_evaluations : int
        Number of pairwise Gaussian terms evaluated to build ``p``.
    '''
    p: FloatArray
    n_p: float
    n_evaluations: int

    def __post_init__(self) -> None:
        object.__setattr__(self, 'p', frozen_array(self.p, ndim=2, name='p'))

    def row_sums(self) -> FloatArray:
        '''P 1, the posterior mass of every centroid.'''
        return self.p.sum(axis=1)


@dataclass(frozen=True, slots=True, eq=False)
class CorrespondencePriors:
    '''
    Known (data, template) pairs with a shared reliability alpha^2.

    Pairs are 0-based and stored sorted by (data index, template index),
    so two priors holding the same set compare and assemble identically
    whatever order they were given in.

    Attributes
    ----------
    data_index : IntArray
        n of every pair.
    template_index : IntArray
        m of every pair.
    alpha_sq : float
        alpha^2, smaller means more reliable.
    '''
    data_index: IntArray
    template_index: IntArray
    alpha_sq: float = DEFAULT_ALPHA_SQ

    def __post_init__(self) -> None:
        n_idx = np.asarray(self.data_index, dtype=np.int64).reshape(-1)
        m_idx = np.asarray(self.template_index, dtype=np.int64).reshape(-1)
        if n_idx.shape != m_idx.shape:
            raise InputError('Pair index arrays must have the same length')
        if np.any(n_idx < 0) or np.any(m_idx < 0):
            raise InputError('Pair indices must be non-negative')

        order = np.lexsort((m_idx, n_idx))
        n_idx, m_idx = n_idx[order], m_idx[order]
        if n_idx.size > 1:
            dup = (np.diff(n_idx) == 0) & (np.diff(m_idx) == 0)
            if np.any(dup):
                first = int(np.flatnonzero(dup)[0])
                raise InputError(
                    f'Duplicate correspondence pair ({int(n_idx[first])}, {int(m_idx[first])})'
                )

        alpha_sq = float(self.alpha_sq)
        if not math.isfinite(alpha_sq) or alpha_sq <= 0.0:
            raise ParameterError(name='alpha_sq', value=alpha_sq, reason='Must be finite and > 0')

        n_idx.setflags(write=False)
        m_idx.setflags(write=False)
        object.__setattr__(self, 'data_index', n_idx)
        object.__setattr__(self, 'template_index', m_idx)
        object.__setattr__(self, 'alpha_sq', alpha_sq)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int]], alpha_sq: float = DEFAULT_ALPHA_SQ) -> Self:
        '''Build priors from 0-based ``(n, m)`` tuples.'''
        arr = np.array(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], alpha_sq)

    @classmethod
    def empty(cls, alpha_sq: float = DEFAULT_ALPHA_SQ) -> Self:
        return cls(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), alpha_sq)

    def __len__(self) -> int:
        return int(self.data_index.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CorrespondencePriors):
            return NotImplemented
        return (
            self.alpha_sq == other.alpha_sq
            and np.array_equal(self.data_index, other.data_index)
            and np.array_equal(self.template_index, other.template_index)
        )

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.data_index.tolist(), self.template_index.tolist()))

    def validate_for(self, n_data: int, n_template: int) -> None:
        '''Raise InputError if a pair points outside an N-point data set or M-point template.'''
        if len(self) == 0:
            return
        if int(self.data_index.max()) >= n_data:
            raise InputError(f'Data index {int(self.data_index.max())} out of range for N={n_data}')
        if int(self.template_index.max()) >= n_template:
            raise InputError(
                f'Template index {int(self.template_index.max())} out of range for M={n_template}'
            )

    def row_sums(self, n_template: int) -> FloatArray:
        '''P~ 1: number of pairs attached to each template point.'''
        return np.bincount(self.template_index, minlength=n_template).astype(np.float64)

    def weighted_data(self, x: FloatArray, n_template: int) -> FloatArray:
        '''P~ X: per template point, the sum of its paired data points.'''
        paired = x[self.data_index]
        return np.column_stack([
            np.bincount(self.template_index, weights=paired[:, k], minlength=n_template)
            for k in range(x.shape[1])
        ])


@dataclass(frozen=True, slots=True, eq=False)
class ClusterPriorModel:
    '''
    Hard cluster labels on both sets plus cluster probabilities P(c).

    P(c | x_n, m) is the indicator that x_n and y_m share cluster c; pairs
    sharing no cluster form the overflow cluster, which carries zero weight
    and is never materialized.
    '''
    data_labels: ClusterAssignment
    template_labels: ClusterAssignment
    cluster_weights: FloatArray

    def __post_init__(self) -> None:
        c = self.data_labels.n_clusters
        c_template = self.template_labels.n_clusters
        if c_template < c:
            raise DegenerateClusterError(
                cluster=c_template + 1,
                reason='no template points carry this label'
            )
        if c_template > c:
            raise InputError(
                f'Template declares {c_template} clusters but data declares only {c}'
            )
        weights = frozen_array(self.cluster_weights, ndim=1, name='cluster_weights')
        if weights.size != c:
            raise InputError(f'Expected {c} cluster weights, got {weights.size}')
        if np.any(weights < 0.0) or abs(float(weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ParameterError(
                name='cluster_weights',
                value=weights.tolist(),
                reason='Weights must be >= 0 and sum to 1'
            )
        object.__setattr__(self, 'cluster_weights', weights)

    @classmethod
    def from_labels(
        cls,
        data_labels: ClusterAssignment,
        template_labels: ClusterAssignment,
        weighting: ClusterWeighting = ClusterWeighting.DATA_FRACTION
    ) -> Self:
        '''
        Derive P(c) from the labels.

        ``data-fraction`` uses the share of labelled data points in each
        cluster, ``uniform`` uses 1/C.
        '''
        c = data_labels.n_clusters
        if weighting is ClusterWeighting.UNIFORM:
            weights = np.full(c, 1.0 / c)
        else:
            counts = data_labels.counts().astype(np.float64)
            weights = counts / counts.sum()
        return cls(data_labels, template_labels, weights)

    @property
    def n_clusters(self) -> int:
        return self.data_labels.n_clusters

    @property
    def block_weights(self) -> FloatArray:
        '''
        Weight of every cluster block, P(c) N_lab / N_c.

        The per-cluster sums already scale with N_c, so P(c) enters relative
        to the cluster's share of labelled data; the default data-fraction
        P(c) gives 1 for every cluster.
        '''
        counts = self.data_labels.counts().astype(np.float64)
        return self.cluster_weights * counts.sum() / counts


@dataclass(frozen=True, slots=True, eq=False)
class ClusterBlock:
    '''
    Responsibilities restricted to one cluster.

    Attributes
    ----------
    cluster : int
        Cluster id c.
    data_index : IntArray
        0-based indices of the cluster's data points (columns of ``p``).
    template_index : IntArray
        0-based indices of the cluster's template points (rows of ``p``).
    p : FloatArray
        M_c x N_c block of P(m | x_n, c).
    '''
    cluster: int
    data_index: IntArray
    template_index: IntArray
    p: FloatArray


@dataclass(frozen=True, slots=True, eq=False)
class ClusterPosteriors:
    '''
    Block-sparse CCPD responsibilities; cross-cluster entries are never stored.

    Attributes
    ----------
    blocks : tuple[ClusterBlock, ...]
        One block per cluster, in cluster order.
    block_weights : FloatArray
        w_c = P(c) N_lab / N_c used to blend the blocks.
    np_bar : float
        sum_c w_c sum_mn P(m | x_n, c).
    n_data, n_template : int
        Full sizes N and M.
    n_evaluations : int
        Pairwise Gaussian terms evaluated, sum_c N_c M_c.
    '''
    blocks: tuple[ClusterBlock, ...]
    block_weights: FloatArray
    np_bar: float
    n_data: int
    n_template: int
    n_evaluations: int

    def weighted_row_sums(self) -> FloatArray:
        '''sum_c w_c P(c)1 as a length-M vector.'''
        out = np.zeros(self.n_template)
        for block, weight in zip(self.blocks, self.block_weights):
            out[block.template_index] += weight * block.p.sum(axis=1)
        return out

    def weighted_data(self, x: FloatArray) -> FloatArray:
        '''sum_c w_c P(c) X as an M x D matrix.'''
        out = np.zeros((self.n_template, x.shape[1]))
        for block, weight in zip(self.blocks, self.block_weights):
            out[block.template_index] += weight * (block.p @ x[block.data_index])
        return out

    def to_dense(self) -> FloatArray:
        '''Unweighted M x N matrix with every block in place and zeros elsewhere.'''
        dense = np.zeros((self.n_template, self.n_data))
        for block in self.blocks:
            dense[np.ix_(block.template_index, block.data_index)] = block.p
        return dense
