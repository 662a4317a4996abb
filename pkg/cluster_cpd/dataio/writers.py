'''
**dataio.writers**
Writers for point clouds and registration artifacts.

Floats are written with 17 significant digits so every value reads back
bit-identical.
'''
from __future__ import annotations

import json
import logging
from collections.abc import Mapping
from pathlib import Path
from typing import Any, Final

import numpy as np

from cluster_cpd.core import (
    ClusterAssignment,
    DisplacementField,
    InputError,
    PointSet,
    RegistrationResult,
    as_point_set
)
from cluster_cpd.corelib.types.core import ArrayLike, OSFilePath
from cluster_cpd.corelib.utils.dataclass_utils import dump_dataclass, to_builtin
from .exceptions import FileAccessError
from .interfaces import COEFFICIENTS_FILE, RUN_LOG_FILE, SUMMARY_FILE, TRANSFORMED_FILE

__all__ = [
    'write_point_set',
    'write_matrix',
    'write_result',
    'write_scene'
]

logger = logging.getLogger(__name__)

FLOAT_FMT: Final[str] = '%.17g'


def _coordinate_names(dim: int) -> list[str]:
    if dim <= len('xyz'):
        return list('xyz'[:dim])
    return [f'x{i}' for i in range(1, dim + 1)]


def _prepare_dir(out_dir: OSFilePath) -> Path:
    path = Path(out_dir)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise FileAccessError(path=path, action='create directory', cause=e) from e
    return path


def _write_text(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding='utf-8', newline='\n')
    except OSError as e:
        raise FileAccessError(path=path, action='write', cause=e) from e


def write_point_set(
    path: OSFilePath,
    points: PointSet | ArrayLike,
    labels: ClusterAssignment | None = None
) -> Path:
    '''
    Write a point cloud as CSV with a header row (``x,y,z[,label]``).

    Raises
    ------
    InputError
        If the label count differs from the point count.
    FileAccessError
        If the file cannot be written.
    '''
    pts = as_point_set(points).points
    names = _coordinate_names(pts.shape[1])
    fmt = [FLOAT_FMT] * pts.shape[1]
    table: np.ndarray = pts
    if labels is not None:
        if len(labels) != pts.shape[0]:
            raise InputError(f'{len(labels)} labels for {pts.shape[0]} points')
        names.append('label')
        fmt.append('%d')
        table = np.column_stack([pts, labels.labels])

    path = Path(path)
    try:
        np.savetxt(path, table, fmt=fmt, delimiter=',', header=','.join(names), comments='')
    except OSError as e:
        raise FileAccessError(path=path, action='write', cause=e) from e
    logger.debug('wrote %d points to %s', pts.shape[0], path)
    return path


def write_matrix(path: OSFilePath, matrix: ArrayLike) -> Path:
    '''Write a headerless comma-separated matrix.'''
    path = Path(path)
    try:
        np.savetxt(path, np.atleast_2d(np.asarray(matrix, dtype=np.float64)), fmt=FLOAT_FMT, delimiter=',')
    except OSError as e:
        raise FileAccessError(path=path, action='write', cause=e) from e
    return path


def write_result(
    result: RegistrationResult,
    out_dir: OSFilePath,
    *,
    labels: ClusterAssignment | None = None,
    extra: Mapping[str, Any] | None = None
) -> Path:
    '''
    Write the artifacts of one registration into ``out_dir``.

    Files written: ``transformed.csv`` (the aligned template, with
    ``labels`` when given), ``W.csv`` (coefficients, M rows by D columns),
    ``run_log.jsonl`` (one JSON object per iteration) and ``result.json``
    (method, final sigma^2, iterations, termination, beta^2 and ``extra``).

    Raises
    ------
    InputError
        If the result carries an empty trace.
    FileAccessError
        If a file cannot be written.
    '''
    if not result.trace:
        raise InputError('Refusing to write a result with an empty trace')

    out = _prepare_dir(out_dir)
    write_point_set(out / TRANSFORMED_FILE, result.transformed, labels)
    write_matrix(out / COEFFICIENTS_FILE, result.w)

    log_lines = [json.dumps(dump_dataclass(record)) for record in result.trace]
    _write_text(out / RUN_LOG_FILE, '\n'.join(log_lines) + '\n')

    summary = {
        'method': result.method.value,
        'sigma2_final': result.sigma2_final,
        'iterations': result.iterations,
        'termination': result.termination.value,
        'converged': result.converged,
        'beta_sq': result.field.beta_sq,
        'n_template': result.transformed.n_points,
        'dim': result.transformed.dim,
        **to_builtin(dict(extra or {}))
    }
    _write_text(out / SUMMARY_FILE, json.dumps(summary, indent=2) + '\n')
    logger.info('wrote %s result (%d iterations) to %s', result.method, result.iterations, out)
    return out


def write_scene(
    out_dir: OSFilePath,
    *,
    template: PointSet,
    template_labels: ClusterAssignment,
    data: PointSet,
    data_labels: ClusterAssignment,
    ground_truth: DisplacementField,
    metadata: Mapping[str, Any] | None = None
) -> Path:
    '''
    Write a synthetic scene: ``template.csv`` and ``data.csv`` with labels,
    ``ground_truth_W.csv`` and ``scene.json`` holding ``metadata``.
    '''
    out = _prepare_dir(out_dir)
    write_point_set(out / 'template.csv', template, template_labels)
    write_point_set(out / 'data.csv', data, data_labels)
    write_matrix(out / 'ground_truth_W.csv', ground_truth.w)
    payload = {'beta_sq': ground_truth.beta_sq, **to_builtin(dict(metadata or {}))}
    _write_text(out / 'scene.json', json.dumps(payload, indent=2) + '\n')
    return out
