'''Shared fixtures for the registration test suite'''

import numpy as np
import pytest

from cluster_cpd.bench import SceneSpec


@pytest.fixture
def rng() -> np.random.Generator:
    '''Seeded generator so every test sees the same numbers'''
    return np.random.default_rng(20240611)


@pytest.fixture
def swap_spec() -> SceneSpec:
    '''Two identical blobs whose positions are exchanged in the data'''
    return SceneSpec(
        n_clusters=2,
        points_per_cluster=12,
        cluster_centers=[[0.0, 0.0], [3.0, 0.0]],
        cluster_spread=0.3,
        deform_magnitude=0.0,
        noise_fraction=0.0,
        swap_clusters=[(1, 2)],
        seed=3,
        shared_shape=True
    )


@pytest.fixture
def noisy_swap_spec(swap_spec) -> SceneSpec:
    '''The swap scene with jittered data, so no fit is exact'''
    return swap_spec.model_copy(update={'jitter': 0.2})


@pytest.fixture
def recovery_spec() -> SceneSpec:
    '''Two separated blobs under a small smooth deformation'''
    return SceneSpec(
        n_clusters=2,
        points_per_cluster=20,
        cluster_centers=[[0.0, 0.0], [8.0, 0.0]],
        cluster_spread=1.0,
        deform_magnitude=0.02,
        noise_fraction=0.0,
        seed=11
    )
