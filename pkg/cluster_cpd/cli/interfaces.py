'''
**cli.interfaces**
'''
from __future__ import annotations

from enum import IntEnum, StrEnum
from typing import Final


class ExitCode(IntEnum):
    '''
    Process exit codes.

    0 means the run converged (or every benchmark row is ok), 1 an input,
    usage or numerical error, 2 a run that stopped at ``max_iters``.
    '''
    Success = 0
    Failure = 1
    NotConverged = 2


class Command(StrEnum):
    REGISTER = 'register'
    EVAL = 'eval'
    SYNTH = 'synth'
    BENCH = 'bench'
    APPLY = 'apply'


LOG_FORMAT: Final[str] = '%(asctime)s [%(levelname)8s] %(message)s (%(filename)s:%(lineno)s)'
LOG_DATE_FORMAT: Final[str] = '%Y-%m-%d %H:%M:%S'
