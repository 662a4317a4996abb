from .internals.exceptions import (
    CoreRegistrationError,
    InputError,
    ParameterError,
    NumericalError,
    DegeneratePosteriorError,
    DegenerateClusterError
)
from .internals.interfaces import (
    Method,
    ClusterWeighting,
    TerminationReason,
    PointSet,
    ClusterAssignment,
    RegistrationConfig,
    KernelMatrix,
    DisplacementField,
    IterationRecord,
    RegistrationResult,
    as_point_set
)
from .internals.utils import squared_distances
from .kernel import (
    gaussian_kernel,
    kernel_between,
    apply_displacement
)
from .likelihood import (
    init_sigma2,
    log_mixture_density,
    negative_log_likelihood
)
from .normalize import (
    Normalization,
    joint_normalization
)

__all__ = [
    'CoreRegistrationError',
    'InputError',
    'ParameterError',
    'NumericalError',
    'DegeneratePosteriorError',
    'DegenerateClusterError',
    'Method',
    'ClusterWeighting',
    'TerminationReason',
    'PointSet',
    'ClusterAssignment',
    'RegistrationConfig',
    'KernelMatrix',
    'DisplacementField',
    'IterationRecord',
    'RegistrationResult',
    'as_point_set',
    'squared_distances',
    'gaussian_kernel',
    'kernel_between',
    'apply_displacement',
    'init_sigma2',
    'log_mixture_density',
    'negative_log_likelihood',
    'Normalization',
    'joint_normalization'
]
