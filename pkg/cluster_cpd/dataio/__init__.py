from .exceptions import (
    DataIOError,
    ParseError,
    FileAccessError
)
from .interfaces import (
    CloudFormat,
    LabeledCloudFile,
    RunLogRecord
)
from .readers import (
    read_point_set,
    read_point_pair,
    read_priors,
    read_matrix,
    read_run_log,
    read_field
)
from .writers import (
    write_point_set,
    write_matrix,
    write_result,
    write_scene
)

__all__ = [
    'DataIOError',
    'ParseError',
    'FileAccessError',
    'CloudFormat',
    'LabeledCloudFile',
    'RunLogRecord',
    'read_point_set',
    'read_point_pair',
    'read_priors',
    'read_matrix',
    'read_run_log',
    'read_field',
    'write_point_set',
    'write_matrix',
    'write_result',
    'write_scene'
]
