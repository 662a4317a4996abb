'''
**cluster_cpd.corelib.exception**
'''
EXC_FORMAT = 'ClusterCPD.{name}: {message}.\n<cause={cause}>'


class BaseRegistrationError(Exception):
    '''
    Root of every error raised by ``cluster_cpd``.

    The rendered message names the concrete subclass and, when one was
    given, the class of the exception that triggered it.
    '''

    def __init__(self, message: str, *, cause: Exception | None = None) -> None:
        '''
        Args:
            message: What went wrong, without a trailing period.
            cause: Lower-level exception being translated, if any.
        '''
        self.cause = cause
        cause_name = type(cause).__name__ if cause is not None else 'N/A'
        self.message = EXC_FORMAT.format(
            name=type(self).__name__,
            message=message,
            cause=cause_name
        )
        super().__init__(self.message)
