'''
**bench.runner**
Runs the three registration methods over synthetic scenes and an alpha
grid, producing one table row per (scene, method, alpha).
'''
from __future__ import annotations

import asyncio
import csv
import io
import logging
import math
import time
from collections.abc import Callable, Sequence
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Final

from cluster_cpd.core import (
    Method,
    ParameterError,
    RegistrationConfig,
    RegistrationResult,
    TerminationReason
)
from cluster_cpd.corelib.exception import BaseRegistrationError
from cluster_cpd.corelib.types.core import OSFilePath
from cluster_cpd.corelib.utils.futures import asyncify, gather_bounded
from cluster_cpd.dataio import FileAccessError
from cluster_cpd.metrics import cluster_hausdorff
from cluster_cpd.solvers import (
    ClusterPriorModel,
    priors_from_clusters,
    register_ccpd,
    register_cpd,
    register_ecpd
)
from .scene import Scene, SceneSpec, generate_scene

__all__ = [
    'BenchmarkRow',
    'DEFAULT_ALPHA_GRID',
    'run_scene',
    'run_benchmark',
    'run_benchmark_async',
    'to_csv'
]

logger = logging.getLogger(__name__)

DEFAULT_ALPHA_GRID: Final[tuple[float, ...]] = (1.0, 1e1, 1e2, 1e5, 1e10)

STATUS_OK: Final[str] = 'ok'
STATUS_NOT_CONVERGED: Final[str] = 'not-converged'

_METHOD_ORDER: Final[tuple[Method, ...]] = (Method.CPD, Method.ECPD, Method.CCPD)


@dataclass(frozen=True, slots=True)
class BenchmarkRow:
    '''
    One line of the benchmark table.

    ``alpha`` is None for CPD and CCPD rows when the grid is empty; metrics
    are NaN when the run failed.
    '''
    scene_id: int
    method: Method
    alpha: float | None
    hausdorff: float
    cluster_hausdorff: float
    iterations: int
    wall_ms: float
    status: str


def _status(result: RegistrationResult) -> str:
    if result.termination is TerminationReason.MAX_ITERS:
        return STATUS_NOT_CONVERGED
    return STATUS_OK


def _row(
    scene: Scene,
    scene_id: int,
    method: Method,
    alpha: float | None,
    run: tuple[RegistrationResult | None, float, str]
) -> BenchmarkRow:
    result, wall_ms, status = run
    if result is None:
        return BenchmarkRow(scene_id, method, alpha, math.nan, math.nan, 0, wall_ms, status)
    report = cluster_hausdorff(
        result.transformed, scene.template_labels, scene.inliers, scene.inlier_labels
    )
    return BenchmarkRow(
        scene_id=scene_id,
        method=method,
        alpha=alpha,
        hausdorff=report.hausdorff,
        cluster_hausdorff=report.cluster_hausdorff,
        iterations=result.iterations,
        wall_ms=wall_ms,
        status=status
    )


def _timed(
    method: Method,
    scene_id: int,
    solve: Callable[[], RegistrationResult]
) -> tuple[RegistrationResult | None, float, str]:
    started = time.perf_counter()
    try:
        result = solve()
    except BaseRegistrationError as e:
        logger.warning('scene %d: %s failed: %s', scene_id, method, e)
        return None, (time.perf_counter() - started) * 1e3, f'failed:{e.__class__.__name__}'
    return result, (time.perf_counter() - started) * 1e3, _status(result)


def run_scene(
    spec: SceneSpec,
    scene_id: int,
    methods: Sequence[Method],
    config: RegistrationConfig,
    alpha_grid: Sequence[float]
) -> list[BenchmarkRow]:
    '''
    Generate one scene and register its template with every requested method.

    CPD and CCPD do not depend on alpha, so each runs once; when ECPD is
    part of the sweep their row is repeated for every alpha in the grid.
    ECPD runs once per alpha with priors linking every data and template
    point that share a cluster.
    '''
    scene = generate_scene(spec)
    rows: list[BenchmarkRow] = []
    sweep = Method.ECPD in methods and len(alpha_grid) > 0
    alphas: Sequence[float | None] = list(alpha_grid) if sweep else [None]

    for method in _METHOD_ORDER:
        if method not in methods:
            continue
        if method is Method.ECPD:
            for alpha in alpha_grid:
                priors = priors_from_clusters(
                    scene.data_labels, scene.template_labels, alpha_sq=alpha * alpha
                )
                run = _timed(
                    method, scene_id,
                    lambda: register_ecpd(scene.data, scene.template, priors, config)
                )
                rows.append(_row(scene, scene_id, method, alpha, run))
            continue

        if method is Method.CPD:
            run = _timed(method, scene_id, lambda: register_cpd(scene.data, scene.template, config))
        else:
            model = ClusterPriorModel.from_labels(
                scene.data_labels, scene.template_labels, config.cluster_weighting
            )
            run = _timed(
                method, scene_id,
                lambda: register_ccpd(scene.data, scene.template, model, config)
            )
        rows.extend(_row(scene, scene_id, method, alpha, run) for alpha in alphas)
    return rows


async def run_benchmark_async(
    scenes: Sequence[SceneSpec],
    methods: Sequence[Method],
    config: RegistrationConfig | None = None,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    *,
    workers: int = 1
) -> list[BenchmarkRow]:
    '''
    Run every scene in a worker thread, at most ``workers`` at a time.

    Rows are ordered by scene, then method (cpd, ecpd, ccpd), then alpha,
    whatever order the scenes finish in.

    Raises
    ------
    ParameterError
        If ``scenes`` or ``methods`` is empty, or ECPD is requested with an
        empty or non-positive alpha grid.
    '''
    if not scenes:
        raise ParameterError(name='scenes', value=0, reason='At least one scene is required')
    if not methods:
        raise ParameterError(name='methods', value=[], reason='At least one method is required')
    if Method.ECPD in methods:
        if not alpha_grid:
            raise ParameterError(name='alpha_grid', value=[], reason='ECPD needs at least one alpha')
        if any(not (a > 0.0 and math.isfinite(a)) for a in alpha_grid):
            raise ParameterError(name='alpha_grid', value=list(alpha_grid), reason='Alphas must be finite and > 0')

    config = config or RegistrationConfig()
    run_async = asyncify(run_scene)
    factories = [
        (lambda spec=spec, i=i: run_async(spec, i, methods, config, alpha_grid))
        for i, spec in enumerate(scenes)
    ]
    per_scene = await gather_bounded(factories, limit=workers)
    return [row for rows in per_scene for row in rows]


def run_benchmark(
    scenes: Sequence[SceneSpec],
    methods: Sequence[Method],
    config: RegistrationConfig | None = None,
    alpha_grid: Sequence[float] = DEFAULT_ALPHA_GRID,
    *,
    workers: int = 1
) -> list[BenchmarkRow]:
    '''Blocking wrapper around ``run_benchmark_async``.'''
    return asyncio.run(
        run_benchmark_async(scenes, methods, config, alpha_grid, workers=workers)
    )


def _cell(value: object) -> str:
    if value is None:
        return ''
    if isinstance(value, Method):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(rows: Sequence[BenchmarkRow], path: OSFilePath | None = None) -> str:
    '''
    Render rows as CSV with the columns scene_id, method, alpha, hausdorff,
    cluster_hausdorff, iterations, wall_ms, status. Also written to ``path``
    when given.
    '''
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow([f.name for f in fields(BenchmarkRow)])
    for row in rows:
        writer.writerow([_cell(getattr(row, f.name)) for f in fields(BenchmarkRow)])
    text = buffer.getvalue()

    if path is not None:
        try:
            Path(path).write_text(text, encoding='utf-8')
        except OSError as e:
            raise FileAccessError(path=path, action='write', cause=e) from e
    return text
