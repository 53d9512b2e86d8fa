from typing import Optional, Sequence

import numpy as np

from fairlie.config import lower_bound, settings, upper_bound
from fairlie.errors import RenormalizationError
from fairlie.models import Scenario


def renormalize_limited(
    values: Sequence[float],
    r: float,
    fixed: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """
    Rescale the free coordinates so the vector sums to r.

    Coordinates listed in ``fixed`` keep their value; the others absorb the
    deficit or surplus in proportion to their current values. Coordinates that
    hit a bound are frozen there and the remainder is spread over the rest,
    for at most one round per coordinate.
    """
    lo, hi = lower_bound(), upper_bound()
    x = np.clip(np.asarray(values, dtype=float), lo, hi)
    free = np.ones(x.shape[0], dtype=bool)
    if fixed is not None:
        free[list(fixed)] = False

    if abs(r - x.sum()) <= settings.SUM_TOLERANCE * 1e-3:
        return x

    for _ in range(x.shape[0] + 1):
        deficit = r - x.sum()
        active = free & (x < hi) if deficit > 0 else free & (x > lo)
        if not active.any():
            raise RenormalizationError(
                f"cannot reach sum {r:g}: every free coordinate is clamped (sum {x.sum():.6g})"
            )
        mass = x[active].sum()
        scaled = x[active] * ((mass + deficit) / mass)
        clipped = np.clip(scaled, lo, hi)
        x[active] = clipped
        if np.array_equal(scaled, clipped):
            break

    if abs(x.sum() - r) > settings.SUM_TOLERANCE:
        raise RenormalizationError(f"renormalisation left sum {x.sum()!r}, expected {r:g}")
    return x


def project_to_scenario(values: Sequence[float], scenario: Scenario) -> np.ndarray:
    x = np.clip(np.asarray(values, dtype=float), lower_bound(), upper_bound())
    if scenario.is_limited:
        x = renormalize_limited(x, scenario.r)
    return x
