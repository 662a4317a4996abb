'''
**metrics.hausdorff**
Hausdorff distance between point sets and its per-cluster mean.
'''
from __future__ import annotations

from dataclasses import dataclass
from typing import Final

import numpy as np
from scipy.spatial import cKDTree

from cluster_cpd.core import ClusterAssignment, InputError, PointSet, as_point_set
from cluster_cpd.core.internals.utils import require_same_dim
from cluster_cpd.corelib.types.core import ArrayLike, FloatArray

__all__ = [
    'MetricReport',
    'directed_hausdorff',
    'hausdorff',
    'cluster_hausdorff',
    'metric_report'
]

# sets at least this large are searched through a k-d tree
TREE_THRESHOLD: Final[int] = 1000

_BRUTE_CHUNK: Final[int] = 256

# widening of the tree radius so round-off never drops the true neighbour
_BALL_SLACK: Final[float] = 1e-9


@dataclass(frozen=True, slots=True)
class MetricReport:
    '''
    Attributes
    ----------
    hausdorff : float
        H(A, B) over all points.
    cluster_hausdorff : float
        Mean of ``per_cluster``.
    per_cluster : tuple[float, ...]
        H(A(c), B(c)) for c = 1..C.
    '''
    hausdorff: float
    cluster_hausdorff: float
    per_cluster: tuple[float, ...]


def _point_distances(a: FloatArray, b: FloatArray) -> FloatArray:
    return np.sqrt(np.sum((a - b) ** 2, axis=-1))


def _nearest_brute(a: FloatArray, b: FloatArray) -> FloatArray:
    out = np.empty(a.shape[0])
    for start in range(0, a.shape[0], _BRUTE_CHUNK):
        chunk = a[start:start + _BRUTE_CHUNK]
        out[start:start + chunk.shape[0]] = _point_distances(chunk[:, None, :], b[None, :, :]).min(axis=1)
    return out


def _nearest_tree(a: FloatArray, b: FloatArray) -> FloatArray:
    '''
    Nearest distances with a k-d tree used only to shortlist candidates; the
    value itself is recomputed with the brute-force formula.
    '''
    tree = cKDTree(b)
    approx, _ = tree.query(a, k=1)
    radii = approx * (1.0 + _BALL_SLACK) + _BALL_SLACK
    out = np.empty(a.shape[0])
    for i, candidates in enumerate(tree.query_ball_point(a, radii)):
        out[i] = _point_distances(a[i][None, :], b[candidates]).min()
    return out


def _nearest(a: FloatArray, b: FloatArray) -> FloatArray:
    if max(a.shape[0], b.shape[0]) < TREE_THRESHOLD:
        return _nearest_brute(a, b)
    return _nearest_tree(a, b)


def directed_hausdorff(a: PointSet | ArrayLike, b: PointSet | ArrayLike) -> float:
    '''
    h(A, B) = max over a in A of the distance to its nearest b in B.

    Examples
    --------
    >>> directed_hausdorff([[0.0, 0.0], [10.0, 0.0]], [[0.0, 0.0]])
    10.0
    '''
    pa = as_point_set(a).points
    pb = as_point_set(b).points
    require_same_dim(pa, pb)
    return float(_nearest(pa, pb).max())


def hausdorff(a: PointSet | ArrayLike, b: PointSet | ArrayLike) -> float:
    '''
    H(A, B) = max(h(A, B), h(B, A)).

    Raises
    ------
    InputError
        If either set is empty or the dimensions differ.

    Examples
    --------
    >>> hausdorff([[0.0, 0.0]], [[3.0, 4.0]])
    5.0
    '''
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def cluster_hausdorff(
    a: PointSet | ArrayLike,
    a_labels: ClusterAssignment,
    b: PointSet | ArrayLike,
    b_labels: ClusterAssignment
) -> MetricReport:
    '''
    Per-cluster Hausdorff distances and their mean.

    Points labelled 0 take part in ``hausdorff`` but in no cluster.

    Parameters
    ----------
    a, b : PointSet | ArrayLike
        The two point sets.
    a_labels, b_labels : ClusterAssignment
        Labels for ``a`` and ``b``.

    Returns
    -------
    MetricReport

    Raises
    ------
    InputError
        If a cluster is empty on one side or a label count does not match
        its point set.
    '''
    pa = as_point_set(a)
    pb = as_point_set(b)
    require_same_dim(pa.points, pb.points)
    for side, points, labels in (('a', pa, a_labels), ('b', pb, b_labels)):
        if len(labels) != points.n_points:
            raise InputError(f'{len(labels)} labels for {points.n_points} points in {side}')

    n_clusters = max(a_labels.n_clusters, b_labels.n_clusters)
    per_cluster = []
    for c in range(1, n_clusters + 1):
        a_idx = a_labels.members(c)
        b_idx = b_labels.members(c)
        if not a_idx.size or not b_idx.size:
            side = 'a' if not a_idx.size else 'b'
            raise InputError(f'Cluster {c} has no points in {side}')
        per_cluster.append(hausdorff(pa.points[a_idx], pb.points[b_idx]))

    return MetricReport(
        hausdorff=hausdorff(pa, pb),
        cluster_hausdorff=float(np.mean(per_cluster)),
        per_cluster=tuple(per_cluster)
    )


def metric_report(
    a: PointSet | ArrayLike,
    b: PointSet | ArrayLike,
    a_labels: ClusterAssignment | None = None,
    b_labels: ClusterAssignment | None = None
) -> MetricReport:
    '''Cluster report when both label sets are given, else the whole sets as one cluster.'''
    pa = as_point_set(a)
    pb = as_point_set(b)
    if a_labels is None or b_labels is None:
        a_labels = ClusterAssignment.single(pa.n_points)
        b_labels = ClusterAssignment.single(pb.n_points)
    return cluster_hausdorff(pa, a_labels, pb, b_labels)
