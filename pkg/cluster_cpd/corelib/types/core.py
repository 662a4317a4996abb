'''
**types.core**
Array and path aliases and numeric constants shared by every package.
'''
import os
from typing import Final, TypeAlias

import numpy as np
import numpy.typing as npt

FloatArray: TypeAlias = npt.NDArray[np.float64]
IntArray: TypeAlias = npt.NDArray[np.int64]
ArrayLike: TypeAlias = npt.ArrayLike
OSFilePath: TypeAlias = str | os.PathLike[str]

# posterior rows below this mass are treated as empty in the M-step
ROW_MASS_EPS: Final[float] = 1e-300

# normwise backward error accepted from the M-step solve
SOLVE_RESIDUAL_TOL: Final[float] = 1e-9

UNASSIGNED_LABEL: Final[int] = 0
