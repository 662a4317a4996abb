from . import core

from . import solvers

from . import metrics

from . import dataio

from . import bench

__all__ = [
    'core',
    'solvers',
    'metrics',
    'dataio',
    'bench'
]
