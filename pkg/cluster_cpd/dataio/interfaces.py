'''
**dataio.interfaces**
File descriptors for point clouds on disk.
'''
from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import Final, Self, TypeAlias

from cluster_cpd.core import IterationRecord
from cluster_cpd.corelib.types.core import OSFilePath

# one run-log line per EM iteration
RunLogRecord: TypeAlias = IterationRecord

LABEL_COLUMNS: Final[frozenset[str]] = frozenset({'label', 'cluster'})

# artifacts of one registration run
TRANSFORMED_FILE: Final[str] = 'transformed.csv'
COEFFICIENTS_FILE: Final[str] = 'W.csv'
RUN_LOG_FILE: Final[str] = 'run_log.jsonl'
SUMMARY_FILE: Final[str] = 'result.json'


class CloudFormat(StrEnum):
    CSV = 'csv'
    PLY = 'ply'

    @classmethod
    def from_suffix(cls, path: OSFilePath) -> CloudFormat:
        '''``.ply`` files are PLY, everything else is read as CSV.'''
        return cls.PLY if Path(path).suffix.lower() == '.ply' else cls.CSV


@dataclass(frozen=True, slots=True)
class LabeledCloudFile:
    '''
    A point cloud file and how to read it.

    Attributes
    ----------
    path : Path
        Location of the file.
    format : CloudFormat
        CSV or PLY.
    has_labels : bool | None
        Whether the last CSV column (or the PLY ``cluster``/``label``
        property) is a cluster label. ``None`` decides from the header.
    '''
    path: Path
    format: CloudFormat = CloudFormat.CSV
    has_labels: bool | None = None

    @classmethod
    def from_path(cls, path: OSFilePath, *, has_labels: bool | None = None) -> Self:
        return cls(Path(path), CloudFormat.from_suffix(path), has_labels)
