'''
**bench.scene**
Synthetic clustered scenes with a known ground-truth deformation.
'''
from __future__ import annotations

from dataclasses import dataclass
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from cluster_cpd.core import (
    ClusterAssignment,
    DisplacementField,
    ParameterError,
    PointSet,
    apply_displacement
)
from cluster_cpd.corelib.types.core import UNASSIGNED_LABEL

__all__ = [
    'SceneSpec',
    'Scene',
    'generate_scene',
    'ensemble'
]

# outliers are drawn from the inlier bounding box grown by this fraction
BOX_INFLATION = 0.2

DEFAULT_ENSEMBLE_SIZE = 20


class SceneSpec(BaseModel):
    '''
    Recipe for one synthetic scene. Identical specs give identical scenes.

    Attributes
    ----------
    n_clusters : int
        C, number of Gaussian blobs.
    points_per_cluster : int
        Template points per blob.
    cluster_centers : list[list[float]]
        C x D blob centres.
    cluster_spread : float
        Standard deviation of every blob.
    deform_magnitude : float
        Standard deviation of the ground-truth coefficients W*.
    noise_fraction : float
        Share of outliers in the data, in [0, 1).
    jitter : float
        Standard deviation of the Gaussian noise added to every data inlier.
    swap_clusters : list[tuple[int, int]]
        1-based cluster pairs whose positions are exchanged in the data.
    seed : int
        Seed of the random generator.
    beta_sq : float
        Kernel width of the ground-truth field.
    shared_shape : bool
        Reuse one blob shape for every cluster.
    '''
    model_config = ConfigDict(frozen=True, extra='forbid')

    n_clusters: int
    points_per_cluster: int
    cluster_centers: list[list[float]]
    cluster_spread: float
    deform_magnitude: float = 0.0
    noise_fraction: float = 0.0
    jitter: float = 0.0
    swap_clusters: list[tuple[int, int]] = []
    seed: int = 0
    beta_sq: float = 2.0
    shared_shape: bool = False

    @model_validator(mode='after')
    def _check_spec(self) -> Self:
        if self.n_clusters < 1:
            raise ParameterError(name='n_clusters', value=self.n_clusters, reason='Must be >= 1')
        if self.points_per_cluster < 1:
            raise ParameterError(
                name='points_per_cluster', value=self.points_per_cluster, reason='Must be >= 1'
            )
        if len(self.cluster_centers) != self.n_clusters:
            raise ParameterError(
                name='cluster_centers',
                value=len(self.cluster_centers),
                reason=f'Expected {self.n_clusters} centres'
            )
        dims = {len(center) for center in self.cluster_centers}
        if len(dims) != 1 or 0 in dims:
            raise ParameterError(
                name='cluster_centers', value=sorted(dims), reason='Centres need one common D >= 1'
            )
        if not self.cluster_spread > 0.0:
            raise ParameterError(name='cluster_spread', value=self.cluster_spread, reason='Must be > 0')
        if not self.deform_magnitude >= 0.0:
            raise ParameterError(name='deform_magnitude', value=self.deform_magnitude, reason='Must be >= 0')
        if not 0.0 <= self.noise_fraction < 1.0:
            raise ParameterError(name='noise_fraction', value=self.noise_fraction, reason='Must lie in [0, 1)')
        if not self.jitter >= 0.0:
            raise ParameterError(name='jitter', value=self.jitter, reason='Must be >= 0')
        if not self.beta_sq > 0.0:
            raise ParameterError(name='beta_sq', value=self.beta_sq, reason='Must be > 0')
        for a, b in self.swap_clusters:
            if not (1 <= a <= self.n_clusters and 1 <= b <= self.n_clusters) or a == b:
                raise ParameterError(
                    name='swap_clusters', value=(a, b), reason='Need two distinct clusters in 1..C'
                )
        return self

    @property
    def dim(self) -> int:
        return len(self.cluster_centers[0])


@dataclass(frozen=True, slots=True, eq=False)
class Scene:
    '''
    A generated scene: a labelled template, labelled data and the field
    that produced the data's inliers from the template, up to jitter.

    Data rows ``0..M-1`` are the displaced template points in template
    order; outliers (label 0) follow.
    '''
    spec: SceneSpec
    template: PointSet
    template_labels: ClusterAssignment
    data: PointSet
    data_labels: ClusterAssignment
    ground_truth: DisplacementField

    @property
    def n_inliers(self) -> int:
        return self.template.n_points

    @property
    def inliers(self) -> PointSet:
        return self.data.subset(np.arange(self.n_inliers))

    @property
    def inlier_labels(self) -> ClusterAssignment:
        return ClusterAssignment(self.data_labels.labels[:self.n_inliers], self.data_labels.n_clusters)


def _swap_offsets(spec: SceneSpec, centers: np.ndarray) -> np.ndarray:
    slots = list(range(spec.n_clusters))
    for a, b in spec.swap_clusters:
        slots[a - 1], slots[b - 1] = slots[b - 1], slots[a - 1]
    return centers[slots] - centers


def generate_scene(spec: SceneSpec) -> Scene:
    '''
    Sample a scene from its spec.

    The template is C Gaussian blobs; ground-truth coefficients W* are
    drawn from N(0, deform_magnitude^2); the data are the template moved
    by the field, each swapped cluster translated onto its partner's
    centre, optionally jittered, plus uniform outliers.

    Examples
    --------
    >>> spec = SceneSpec(n_clusters=1, points_per_cluster=3, cluster_centers=[[0.0, 0.0]], cluster_spread=1.0)
    >>> scene = generate_scene(spec)
    >>> bool(np.array_equal(scene.data.points, scene.template.points))
    True
    '''
    rng = np.random.default_rng(spec.seed)
    centers = np.asarray(spec.cluster_centers, dtype=np.float64)
    c, d, k = spec.n_clusters, spec.dim, spec.points_per_cluster

    if spec.shared_shape:
        shape = rng.normal(0.0, spec.cluster_spread, size=(k, d))
        blobs = [centers[i] + shape for i in range(c)]
    else:
        blobs = [centers[i] + rng.normal(0.0, spec.cluster_spread, size=(k, d)) for i in range(c)]
    template = PointSet(np.vstack(blobs))
    labels = np.repeat(np.arange(1, c + 1, dtype=np.int64), k)

    if spec.deform_magnitude > 0.0:
        w = rng.normal(0.0, spec.deform_magnitude, size=template.points.shape)
    else:
        w = np.zeros(template.points.shape)
    field = DisplacementField(w, template, spec.beta_sq)

    inliers = apply_displacement(field, template).points
    if spec.swap_clusters:
        inliers = inliers + _swap_offsets(spec, centers)[labels - 1]
    if spec.jitter > 0.0:
        inliers = inliers + rng.normal(0.0, spec.jitter, size=inliers.shape)

    data = inliers
    data_labels = labels
    n_out = int(round(inliers.shape[0] * spec.noise_fraction / (1.0 - spec.noise_fraction)))
    if n_out:
        lo = inliers.min(axis=0)
        hi = inliers.max(axis=0)
        margin = 0.5 * BOX_INFLATION * (hi - lo)
        outliers = rng.uniform(lo - margin, hi + margin, size=(n_out, d))
        data = np.vstack([inliers, outliers])
        data_labels = np.concatenate([labels, np.full(n_out, UNASSIGNED_LABEL, dtype=np.int64)])

    return Scene(
        spec=spec,
        template=template,
        template_labels=ClusterAssignment(labels, c),
        data=PointSet(data),
        data_labels=ClusterAssignment(data_labels, c),
        ground_truth=field
    )


def ensemble(base: SceneSpec, count: int = DEFAULT_ENSEMBLE_SIZE) -> list[SceneSpec]:
    '''``count`` copies of ``base`` with seeds ``base.seed + i``.'''
    if count < 1:
        raise ParameterError(name='count', value=count, reason='Must be >= 1')
    return [base.model_copy(update={'seed': base.seed + i}) for i in range(count)]
