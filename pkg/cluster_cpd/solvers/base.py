'''
**solvers.base**
The EM driver shared by CPD, ECPD and cluster CPD.

Each method supplies an ``EMStepper``; ``run_em`` owns the iteration,
termination rule and trace so the three solvers differ only in their
E-step, M-step system and likelihood.
'''
from __future__ import annotations

import logging
import math
import time
import warnings
from abc import ABC, abstractmethod
from typing import Any, ClassVar

import numpy as np
import scipy.linalg

from cluster_cpd.core import (
    DegeneratePosteriorError,
    DisplacementField,
    IterationRecord,
    Method,
    NumericalError,
    PointSet,
    RegistrationConfig,
    RegistrationResult,
    TerminationReason,
    gaussian_kernel,
    init_sigma2
)
from cluster_cpd.core.internals.utils import require_same_dim
from cluster_cpd.corelib.types.core import FloatArray, ROW_MASS_EPS, SOLVE_RESIDUAL_TOL

logger = logging.getLogger(__name__)


def solve_weighted(
    g: FloatArray,
    row_weights: FloatArray,
    rhs: FloatArray,
    lambda_: float,
    sigma2: float,
    *,
    iteration: int | None = None
) -> FloatArray:
    '''
    Solve (d(r) G + lambda sigma^2 I) W = B for W.

    Every M-step in the toolkit reduces to this form; only the row weights
    ``r`` and right-hand side ``B`` differ between methods.

    Raises
    ------
    NumericalError
        If the system is singular, yields non-finite values, or the
        normwise backward error exceeds ``SOLVE_RESIDUAL_TOL``.
    '''
    a = row_weights[:, None] * g
    a[np.diag_indices_from(a)] += lambda_ * sigma2

    try:
        w = scipy.linalg.solve(a, rhs, check_finite=False)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise NumericalError(
            'M-step system is singular',
            iteration=iteration,
            condition=_condition(a),
            cause=e
        ) from e

    if not np.all(np.isfinite(w)):
        raise NumericalError(
            'M-step solve produced non-finite coefficients',
            iteration=iteration,
            condition=_condition(a)
        )

    scale = np.linalg.norm(a) * np.linalg.norm(w) + np.linalg.norm(rhs)
    if scale > 0.0:
        backward = float(np.linalg.norm(a @ w - rhs) / scale)
        if backward > SOLVE_RESIDUAL_TOL:
            raise NumericalError(
                f'M-step residual {backward:.3e} exceeds {SOLVE_RESIDUAL_TOL:.0e}',
                iteration=iteration,
                condition=_condition(a)
            )
    return w


def _condition(a: FloatArray) -> float:
    with np.errstate(all='ignore'):
        try:
            return float(np.linalg.cond(a))
        except np.linalg.LinAlgError:
            return math.inf


def prune_row_mass(row_mass: FloatArray) -> FloatArray:
    '''Zero posterior rows whose mass is below ``ROW_MASS_EPS``.'''
    empty = row_mass < ROW_MASS_EPS
    if np.all(empty):
        warnings.warn(
            'Every posterior row is empty; the M-step reduces to W = 0',
            RuntimeWarning,
            stacklevel=3
        )
    return np.where(empty, 0.0, row_mass)


def sigma2_from_sse(sse: float, n_p: float, dim: int) -> float:
    '''sigma^2 = SSE / (N_p D), clamped at 0 from below.'''
    if not n_p > 0.0:
        raise DegeneratePosteriorError(
            f'Posterior mass N_p={n_p!r} leaves sigma^2 undefined'
        )
    return max(sse / (n_p * dim), 0.0)


class EMStepper(ABC):
    '''
    One registration method as seen by ``run_em``.

    Attributes
    ----------
    data : PointSet
        The fixed set X.
    template : PointSet
        The moving set Y.
    config : RegistrationConfig
        Solver parameters.
    g : FloatArray
        The M x M kernel over the template.
    '''
    method: ClassVar[Method]

    def __init__(self, data: PointSet, template: PointSet, config: RegistrationConfig) -> None:
        require_same_dim(data.points, template.points)
        self.data = data
        self.template = template
        self.config = config
        self.g = gaussian_kernel(template, config.beta_sq).g

    @abstractmethod
    def estep(self, t: FloatArray, sigma2: float) -> Any:
        '''Posteriors for the current centroids ``t``.'''

    @abstractmethod
    def mstep(self, posterior: Any, sigma2: float, *, iteration: int) -> FloatArray:
        '''Coefficients W minimizing the bound under ``posterior``.'''

    @abstractmethod
    def weighted_sse(self, t: FloatArray, posterior: Any) -> tuple[float, float]:
        '''(sum of posterior-weighted squared residuals, N_p).'''

    @abstractmethod
    def nll(self, t: FloatArray, sigma2: float) -> float:
        '''Negative log-likelihood of the data under centroids ``t``.'''

    def prior_energy(self, t: FloatArray) -> float:
        '''Additional term minimized alongside the likelihood; none by default.'''
        return 0.0

    def initial_sigma2(self) -> float:
        return init_sigma2(self.data, self.template)


def run_em(stepper: EMStepper) -> RegistrationResult:
    '''
    Alternate E-step, M-step and sigma^2 update until a stop rule fires.

    The loop stops when the relative NLL change falls below ``rel_tol``,
    when sigma^2 drops below ``sigma2_floor`` (it is clamped to the floor),
    or after ``max_iters`` iterations.

    Returns
    -------
    RegistrationResult
        Field, transformed template, final sigma^2 and the full trace.
    '''
    config = stepper.config
    y = stepper.template.points
    g = stepper.g
    dim = y.shape[1]

    sigma2 = max(stepper.initial_sigma2(), config.sigma2_floor)
    w = np.zeros_like(y)
    t = y.copy()
    trace: list[IterationRecord] = []
    termination = TerminationReason.MAX_ITERS
    prev_nll: float | None = None

    for iteration in range(1, config.max_iters + 1):
        started = time.perf_counter()

        posterior = stepper.estep(t, sigma2)
        w = stepper.mstep(posterior, sigma2, iteration=iteration)
        gw = g @ w
        t = y + gw

        sse, n_p = stepper.weighted_sse(t, posterior)
        updated = sigma2_from_sse(sse, n_p, dim)
        floor_hit = updated < config.sigma2_floor
        sigma2 = config.sigma2_floor if floor_hit else updated

        penalty = 0.5 * config.lambda_ * float(np.sum(w * gw))
        prior = stepper.prior_energy(t)
        nll = stepper.nll(t, sigma2)
        q_value = sse / (2.0 * sigma2) + 0.5 * n_p * dim * math.log(sigma2) + penalty + prior

        record = IterationRecord(
            iteration=iteration,
            sigma2=sigma2,
            nll=nll,
            q_value=q_value,
            objective=nll + penalty + prior,
            wall_ms=(time.perf_counter() - started) * 1e3
        )
        trace.append(record)
        logger.debug(
            '%s iter %d: sigma2=%.6g nll=%.10g objective=%.10g',
            stepper.method, iteration, sigma2, nll, record.objective
        )

        if floor_hit:
            termination = TerminationReason.SIGMA2_FLOOR
            break
        if prev_nll is not None:
            change = abs(nll - prev_nll) / max(abs(prev_nll), np.finfo(np.float64).tiny)
            if change < config.rel_tol:
                termination = TerminationReason.TOLERANCE
                break
        prev_nll = nll

    logger.info(
        '%s finished after %d iterations (%s), sigma2=%.6g',
        stepper.method, len(trace), termination, sigma2
    )
    return RegistrationResult(
        field=DisplacementField(w, stepper.template, config.beta_sq),
        transformed=PointSet(t),
        sigma2_final=sigma2,
        iterations=len(trace),
        trace=tuple(trace),
        termination=termination,
        method=stepper.method
    )
