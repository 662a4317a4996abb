'''
**dataio.readers**
Readers for point clouds, correspondence priors, matrices and run logs.

CSV is the canonical format: one point per row, D coordinates followed
by an optional integer cluster label, with an optional header row.
PLY vertex lists, ASCII or binary, are accepted for reading.
'''
from __future__ import annotations

import csv
import json
import logging
import math
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import IO

import numpy as np
from plyfile import PlyData, PlyParseError

from cluster_cpd.core import (
    ClusterAssignment,
    CoreRegistrationError,
    DisplacementField,
    IterationRecord,
    PointSet
)
from cluster_cpd.corelib.types.core import FloatArray, IntArray, OSFilePath, UNASSIGNED_LABEL
from cluster_cpd.solvers import CorrespondencePriors
from .exceptions import FileAccessError, ParseError
from .interfaces import COEFFICIENTS_FILE, LABEL_COLUMNS, SUMMARY_FILE, CloudFormat, LabeledCloudFile

__all__ = [
    'read_point_set',
    'read_point_pair',
    'read_priors',
    'read_matrix',
    'read_run_log',
    'read_field'
]

logger = logging.getLogger(__name__)

_PLY_COORDS = ('x', 'y', 'z')


@contextmanager
def _open_text(path: OSFilePath) -> Iterator[IO[str]]:
    try:
        fh = open(path, encoding='utf-8', newline='')
    except OSError as e:
        raise FileAccessError(path=path, action='read', cause=e) from e
    with fh:
        yield fh


def _as_file(file: LabeledCloudFile | OSFilePath, has_labels: bool | None) -> LabeledCloudFile:
    if isinstance(file, LabeledCloudFile):
        return file
    return LabeledCloudFile.from_path(file, has_labels=has_labels)


def _is_numeric(fields: list[str]) -> bool:
    try:
        for field in fields:
            float(field)
    except ValueError:
        return False
    return True


def _parse_coords(fields: list[str], *, path: Path, line: int) -> list[float]:
    try:
        coords = [float(f) for f in fields]
    except ValueError as e:
        raise ParseError(path=path, line=line, reason=f'Non-numeric coordinate in {fields}') from e
    if not all(math.isfinite(c) for c in coords):
        raise ParseError(path=path, line=line, reason='Coordinates must be finite')
    return coords


def _parse_label(field: str, *, path: Path, line: int) -> int:
    try:
        label = int(field)
    except ValueError as e:
        raise ParseError(path=path, line=line, reason=f'Label "{field}" is not an integer') from e
    if label < UNASSIGNED_LABEL:
        raise ParseError(path=path, line=line, reason=f'Negative label {label}')
    return label


def _read_csv(file: LabeledCloudFile) -> tuple[FloatArray, IntArray | None]:
    points: list[list[float]] = []
    labels: list[int] = []
    width: int | None = None
    has_labels = file.has_labels

    with _open_text(file.path) as fh:
        reader = csv.reader(fh)
        for row in reader:
            line = reader.line_num
            fields = [f.strip() for f in row]
            if not any(fields):
                continue

            if width is None:
                width = len(fields)
                if not _is_numeric(fields):
                    if has_labels is None:
                        has_labels = fields[-1].lower() in LABEL_COLUMNS
                    continue
                if has_labels is None:
                    has_labels = False

            if len(fields) != width:
                raise ParseError(
                    path=file.path,
                    line=line,
                    reason=f'Expected {width} columns, found {len(fields)}'
                )
            if has_labels:
                if width < 2:
                    raise ParseError(path=file.path, line=line, reason='A labelled row needs D >= 1 coordinates')
                labels.append(_parse_label(fields[-1], path=file.path, line=line))
                fields = fields[:-1]
            points.append(_parse_coords(fields, path=file.path, line=line))

    if not points:
        raise ParseError(path=file.path, reason='File holds no points')
    raw = np.array(labels, dtype=np.int64) if has_labels else None
    return np.array(points, dtype=np.float64), raw


def _read_ply(file: LabeledCloudFile) -> tuple[FloatArray, IntArray | None]:
    try:
        ply = PlyData.read(str(file.path))
    except OSError as e:
        raise FileAccessError(path=file.path, action='read', cause=e) from e
    except (PlyParseError, ValueError) as e:
        raise ParseError(path=file.path, reason=f'Malformed PLY ({e})') from e

    vertex = next((element for element in ply.elements if element.name == 'vertex'), None)
    if vertex is None:
        raise ParseError(path=file.path, reason='PLY file has no vertex element')
    names = vertex.data.dtype.names or ()
    coords = [name for name in _PLY_COORDS if name in names]
    if not coords:
        raise ParseError(path=file.path, reason='PLY vertices carry no x/y/z properties')
    label_name = next((name for name in ('cluster', 'label') if name in names), None)
    if file.has_labels is False:
        label_name = None
    elif file.has_labels and label_name is None:
        raise ParseError(path=file.path, reason='PLY vertices carry no cluster property')
    if vertex.count == 0:
        raise ParseError(path=file.path, reason='File holds no points')

    points = np.column_stack([np.asarray(vertex[name], dtype=np.float64) for name in coords])
    if not np.all(np.isfinite(points)):
        raise ParseError(path=file.path, reason='Coordinates must be finite')
    if label_name is None:
        return points, None

    values = np.asarray(vertex[label_name])
    if values.dtype.kind == 'f' and not np.all(values == np.round(values)):
        raise ParseError(path=file.path, reason=f'Property "{label_name}" is not integral')
    labels = values.astype(np.int64)
    if np.any(labels < UNASSIGNED_LABEL):
        raise ParseError(path=file.path, reason=f'Negative label {int(labels.min())}')
    return points, labels


def _read_raw(file: LabeledCloudFile) -> tuple[FloatArray, IntArray | None]:
    if file.format is CloudFormat.PLY:
        return _read_ply(file)
    return _read_csv(file)


def _assignment(path: Path, labels: IntArray, n_clusters: int = 0) -> ClusterAssignment:
    try:
        return ClusterAssignment(labels, n_clusters)
    except CoreRegistrationError as e:
        raise ParseError(path=path, reason=f'Invalid cluster labels ({e})') from e


def read_point_set(
    file: LabeledCloudFile | OSFilePath,
    *,
    has_labels: bool | None = None
) -> tuple[PointSet, ClusterAssignment | None]:
    '''
    Read a point cloud and its optional cluster labels.

    Positive labels are re-indexed to ``1..C`` in order of first
    appearance; label 0 (unassigned) is kept as is.

    Parameters
    ----------
    file : LabeledCloudFile | OSFilePath
        Descriptor or plain path; the format of a plain path follows its
        suffix.
    has_labels : bool | None
        Overrides label detection when ``file`` is a plain path.

    Returns
    -------
    tuple[PointSet, ClusterAssignment | None]

    Raises
    ------
    ParseError
        On ragged rows, non-numeric fields or negative labels, with the
        offending line number.
    FileAccessError
        If the file cannot be opened.
    '''
    file = _as_file(file, has_labels)
    points, raw = _read_raw(file)
    logger.debug('read %d points (D=%d) from %s', points.shape[0], points.shape[1], file.path)
    return PointSet(points), None if raw is None else _dense(file.path, raw)


def read_point_pair(
    data_file: LabeledCloudFile | OSFilePath,
    template_file: LabeledCloudFile | OSFilePath,
    *,
    has_labels: bool | None = None
) -> tuple[PointSet, ClusterAssignment | None, PointSet, ClusterAssignment | None]:
    '''
    Read a data cloud and a template cloud whose labels name the same clusters.

    When both files are labelled, one mapping re-indexes both: clusters
    are numbered by first appearance in the data, then in the template,
    so label 7 means the same cluster in both files.
    '''
    data_file = _as_file(data_file, has_labels)
    template_file = _as_file(template_file, has_labels)
    x, x_raw = _read_raw(data_file)
    y, y_raw = _read_raw(template_file)

    if x_raw is None or y_raw is None:
        x_labels = None if x_raw is None else _dense(data_file.path, x_raw)
        y_labels = None if y_raw is None else _dense(template_file.path, y_raw)
        return PointSet(x), x_labels, PointSet(y), y_labels

    mapping: dict[int, int] = {}
    for label in np.concatenate([x_raw, y_raw]).tolist():
        if label != UNASSIGNED_LABEL:
            mapping.setdefault(label, len(mapping) + 1)
    x_labels = _assignment(data_file.path, _relabel(x_raw, mapping))
    y_labels = _assignment(template_file.path, _relabel(y_raw, mapping))
    return PointSet(x), x_labels, PointSet(y), y_labels


def _relabel(raw: IntArray, mapping: dict[int, int]) -> IntArray:
    return np.array([mapping.get(v, UNASSIGNED_LABEL) for v in raw.tolist()], dtype=np.int64)


def _dense(path: Path, raw: IntArray) -> ClusterAssignment:
    try:
        return ClusterAssignment.from_raw(raw)
    except CoreRegistrationError as e:
        raise ParseError(path=path, reason=f'Invalid cluster labels ({e})') from e


def read_priors(
    path: OSFilePath,
    *,
    n_data: int | None = None,
    n_template: int | None = None
) -> CorrespondencePriors:
    '''
    Read correspondence priors.

    The first line is ``alpha_sq=<value>``; every following line is a
    1-based ``n,m`` pair. Pairs are returned 0-based.

    Parameters
    ----------
    path : OSFilePath
        The priors file.
    n_data, n_template : int | None
        When given, indices beyond N or M are rejected.

    Raises
    ------
    ParseError
        On a missing or non-positive alpha, a malformed or duplicate pair,
        or an out-of-range index.

    Examples
    --------
    A file holding ``alpha_sq=1e5`` and ``1,1`` gives one pair ``(0, 0)``
    with ``alpha_sq == 1e5``.
    '''
    path = Path(path)
    alpha_sq: float | None = None
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()

    with _open_text(path) as fh:
        for line, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            if alpha_sq is None:
                key, sep, value = text.partition('=')
                if not sep or key.strip() != 'alpha_sq':
                    raise ParseError(path=path, line=line, reason='Expected "alpha_sq=<value>" header')
                try:
                    alpha_sq = float(value)
                except ValueError as e:
                    raise ParseError(path=path, line=line, reason=f'alpha_sq "{value}" is not a number') from e
                if not math.isfinite(alpha_sq) or alpha_sq <= 0.0:
                    raise ParseError(path=path, line=line, reason='alpha_sq must be finite and > 0')
                continue

            fields = [f.strip() for f in text.split(',')]
            try:
                n, m = (int(f) for f in fields)
            except ValueError as e:
                raise ParseError(path=path, line=line, reason=f'Expected "n,m", got "{text}"') from e
            if n < 1 or m < 1:
                raise ParseError(path=path, line=line, reason='Pair indices are 1-based')
            if n_data is not None and n > n_data:
                raise ParseError(path=path, line=line, reason=f'Data index {n} exceeds N={n_data}')
            if n_template is not None and m > n_template:
                raise ParseError(path=path, line=line, reason=f'Template index {m} exceeds M={n_template}')
            if (n, m) in seen:
                raise ParseError(path=path, line=line, reason=f'Duplicate pair ({n}, {m})')
            seen.add((n, m))
            pairs.append((n - 1, m - 1))

    if alpha_sq is None:
        raise ParseError(path=path, reason='Missing "alpha_sq=<value>" header')
    return CorrespondencePriors.from_pairs(pairs, alpha_sq)


def read_matrix(path: OSFilePath) -> FloatArray:
    '''Read a headerless comma-separated matrix such as ``W.csv``.'''
    try:
        return np.loadtxt(path, delimiter=',', ndmin=2, dtype=np.float64)
    except OSError as e:
        raise FileAccessError(path=path, action='read', cause=e) from e
    except ValueError as e:
        raise ParseError(path=path, reason=str(e)) from e


def read_run_log(path: OSFilePath) -> list[IterationRecord]:
    '''
    Read a JSON-lines run log back into iteration records.

    Raises
    ------
    ParseError
        On malformed JSON, missing keys or non-increasing iteration indices.
    '''
    records: list[IterationRecord] = []
    with _open_text(path) as fh:
        for line, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                payload = json.loads(raw)
                record = IterationRecord(
                    iteration=int(payload['iteration']),
                    sigma2=float(payload['sigma2']),
                    nll=float(payload['nll']),
                    q_value=float(payload['q_value']),
                    objective=float(payload.get('objective', math.nan)),
                    wall_ms=float(payload['wall_ms'])
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
                raise ParseError(path=path, line=line, reason=f'Bad run-log record ({e})') from e
            if records and record.iteration <= records[-1].iteration:
                raise ParseError(path=path, line=line, reason='Iteration indices must increase')
            records.append(record)
    return records


def read_field(run_dir: OSFilePath, template: PointSet) -> DisplacementField:
    '''
    Rebuild the displacement field written by a registration run.

    ``W.csv`` gives the coefficients and ``result.json`` the beta^2 they
    were fitted with; ``template`` is the point set that was registered.

    Raises
    ------
    FileAccessError
        If either artifact is missing.
    ParseError
        If ``result.json`` has no usable ``beta_sq`` or W does not fit the
        template.
    '''
    run = Path(run_dir)
    w = read_matrix(run / COEFFICIENTS_FILE)
    summary_path = run / SUMMARY_FILE
    with _open_text(summary_path) as fh:
        try:
            beta_sq = float(json.load(fh)['beta_sq'])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise ParseError(path=summary_path, reason=f'No usable beta_sq ({e})') from e
    if w.shape != template.points.shape:
        raise ParseError(
            path=run / COEFFICIENTS_FILE,
            reason=f'Coefficients shape {w.shape} do not match template shape {template.points.shape}'
        )
    return DisplacementField(w, template, beta_sq)
