from .interfaces import (
    PosteriorMatrix,
    CorrespondencePriors,
    ClusterPriorModel,
    ClusterBlock,
    ClusterPosteriors,
    DEFAULT_ALPHA_SQ
)
from .base import (
    EMStepper,
    run_em,
    solve_weighted
)
from .cpd import (
    CpdStepper,
    estep,
    mstep_solve,
    update_sigma2_cpd,
    register_cpd
)
from .ecpd import (
    EcpdStepper,
    priors_from_clusters,
    mstep_solve_ecpd,
    register_ecpd
)
from .ccpd import (
    CcpdStepper,
    estep_ccpd,
    mstep_solve_ccpd,
    update_sigma2_ccpd,
    register_ccpd
)

__all__ = [
    'PosteriorMatrix',
    'CorrespondencePriors',
    'ClusterPriorModel',
    'ClusterBlock',
    'ClusterPosteriors',
    'DEFAULT_ALPHA_SQ',
    'EMStepper',
    'run_em',
    'solve_weighted',
    'CpdStepper',
    'estep',
    'mstep_solve',
    'update_sigma2_cpd',
    'register_cpd',
    'EcpdStepper',
    'priors_from_clusters',
    'mstep_solve_ecpd',
    'register_ecpd',
    'CcpdStepper',
    'estep_ccpd',
    'mstep_solve_ccpd',
    'update_sigma2_ccpd',
    'register_ccpd'
]
