'''
**core.normalize**
Joint zero-mean / unit-RMS scaling of a data/template pair.
'''
from __future__ import annotations

import dataclasses
import math

import numpy as np

from cluster_cpd.corelib.types.core import FloatArray
from .internals.exceptions import InputError
from .internals.interfaces import DisplacementField, PointSet, RegistrationResult
from .internals.utils import require_same_dim

__all__ = [
    'Normalization',
    'joint_normalization'
]


@dataclasses.dataclass(frozen=True, slots=True, eq=False)
class Normalization:
    '''
    Affine map p -> (p - center) / scale applied to both sets.

    The inverse maps a registration solved in normalized units back to raw
    units exactly: the field is rescaled (W*s, beta^2*s^2) rather than
    approximated.
    '''
    center: FloatArray
    scale: float

    def apply(self, points: PointSet) -> PointSet:
        return PointSet((points.points - self.center) / self.scale)

    def invert(self, points: PointSet) -> PointSet:
        return PointSet(points.points * self.scale + self.center)

    def invert_result(self, result: RegistrationResult, raw_template: PointSet) -> RegistrationResult:
        '''
        Express ``result`` in raw units. Likelihood values in the trace
        stay in normalized units; only sigma^2 is rescaled.

        Parameters
        ----------
        result : RegistrationResult
            Registration computed on normalized sets.
        raw_template : PointSet
            The template before normalization, anchoring the raw field.
        '''
        s2 = self.scale * self.scale
        field = DisplacementField(
            w=result.field.w * self.scale,
            template=raw_template,
            beta_sq=result.field.beta_sq * s2
        )
        trace = tuple(
            dataclasses.replace(record, sigma2=record.sigma2 * s2)
            for record in result.trace
        )
        return dataclasses.replace(
            result,
            field=field,
            transformed=self.invert(result.transformed),
            sigma2_final=result.sigma2_final * s2,
            trace=trace
        )


def joint_normalization(data: PointSet, template: PointSet) -> Normalization:
    '''
    Center both sets on their joint mean and scale to unit RMS radius.

    Raises
    ------
    InputError
        If all points coincide, leaving no scale to normalize by.
    '''
    require_same_dim(data.points, template.points)
    stacked = np.vstack([data.points, template.points])
    center = stacked.mean(axis=0)
    scale = math.sqrt(float(np.mean(np.sum((stacked - center) ** 2, axis=1))))
    if scale == 0.0:
        raise InputError('Cannot normalize point sets whose points all coincide')
    center.setflags(write=False)
    return Normalization(center=center, scale=scale)
