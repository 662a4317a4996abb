from .exceptions import UsageError
from .interfaces import ExitCode, Command
from .main import (
    main,
    build_parser,
    cmd_register,
    cmd_eval,
    cmd_synth,
    cmd_bench
)

__all__ = [
    'UsageError',
    'ExitCode',
    'Command',
    'main',
    'build_parser',
    'cmd_register',
    'cmd_eval',
    'cmd_synth',
    'cmd_bench'
]
