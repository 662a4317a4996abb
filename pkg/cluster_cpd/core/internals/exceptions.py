'''
**core.internals.exceptions**
exceptions for the registration core and the solvers built on it.
'''
from cluster_cpd.corelib.exception import BaseRegistrationError

PARAMETER_EXC_FORMAT = 'Parameter "{name}" with value "{value}" is invalid. {reason}'


class CoreRegistrationError(BaseRegistrationError):
    '''
    Base exception for the core and solver packages.
    '''
    pass


class InputError(CoreRegistrationError):
    '''
    Exception raised for malformed or mismatched input data.

    Typically raised for non-finite coordinates, empty sets or
    dimension mismatches between point sets.
    '''
    pass


class ParameterError(CoreRegistrationError):
    '''
    Exception raised when a scalar parameter violates its domain.
    '''
    def __init__(
        self,
        *,
        name: str,
        value: object,
        reason: str = ''
    ) -> None:
        self.name = name
        self.value = value
        message = PARAMETER_EXC_FORMAT.format(
            name=name,
            value=value,
            reason=reason
        )
        super().__init__(message=message)


class NumericalError(CoreRegistrationError):
    '''
    Exception raised when the M-step linear system cannot be solved.
    '''
    def __init__(
        self,
        message: str,
        *,
        iteration: int | None = None,
        condition: float | None = None,
        cause: Exception | None = None
    ) -> None:
        self.iteration = iteration
        self.condition = condition
        details = f'{message} (iteration={iteration}, condition~{condition:.3e})' \
            if condition is not None else f'{message} (iteration={iteration})'
        super().__init__(details, cause=cause)


class DegeneratePosteriorError(CoreRegistrationError):
    '''
    Raised when the posterior mass N_p is zero, leaving sigma^2 undefined.
    '''
    pass


class DegenerateClusterError(CoreRegistrationError):
    '''
    Raised when a cluster has data points but no template points.
    '''
    def __init__(self, *, cluster: int, reason: str = '') -> None:
        self.cluster = cluster
        message = f'Cluster {cluster} is degenerate'
        if reason:
            message = f'{message}: {reason}'
        super().__init__(message)
