from .scene import (
    SceneSpec,
    Scene,
    generate_scene,
    ensemble
)
from .runner import (
    BenchmarkRow,
    DEFAULT_ALPHA_GRID,
    run_scene,
    run_benchmark,
    run_benchmark_async,
    to_csv
)

__all__ = [
    'SceneSpec',
    'Scene',
    'generate_scene',
    'ensemble',
    'BenchmarkRow',
    'DEFAULT_ALPHA_GRID',
    'run_scene',
    'run_benchmark',
    'run_benchmark_async',
    'to_csv'
]
