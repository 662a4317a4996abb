from cluster_cpd.corelib.exception import BaseRegistrationError
from cluster_cpd.corelib.types.core import OSFilePath


class DataIOError(BaseRegistrationError):
    '''
    Base exception for reading and writing point-set artifacts.
    '''
    pass


class ParseError(DataIOError):
    '''Exception raised when a file does not follow its format.'''

    def __init__(
        self,
        *,
        path: OSFilePath,
        reason: str,
        line: int | None = None
    ) -> None:
        self.path = str(path)
        self.line = line
        self.reason = reason
        where = f'{self.path}:{line}' if line is not None else self.path
        super().__init__(f'{where}: {reason}')


class FileAccessError(DataIOError):
    '''Exception raised when a file cannot be opened, read or written.'''

    def __init__(
        self,
        *,
        path: OSFilePath,
        action: str,
        cause: Exception | None = None
    ) -> None:
        self.path = str(path)
        self.action = action
        super().__init__(f'Could not {action} "{self.path}"', cause=cause)
