from cluster_cpd.corelib.exception import BaseRegistrationError


class UsageError(BaseRegistrationError):
    '''
    Exception raised for unknown flags, missing arguments or flag
    combinations a command cannot run with.
    '''
    pass
