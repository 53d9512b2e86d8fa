from typing import List, Optional, Sequence

import numpy as np

from fairlie.config import lower_bound, settings, upper_bound
from fairlie.errors import DimensionError, InstanceValidationError
from fairlie.models import (
    Allocation,
    PreferenceProfile,
    PreferenceVector,
    ProblemInstance,
    Scenario,
    Violation,
    ViolationKind,
    Welfare,
)


# Bundle sums add values strictly in resource order so that every code path
# (scalar, per-profile and the vectorised enumeration) yields identical doubles.

def bundle_utility(owner: Sequence[int], values: Sequence[float], agent: int) -> float:
    total = 0.0
    for j, a in enumerate(owner):
        if a == agent:
            total += float(values[j])
    return total


def utilities_of(owner: Sequence[int], matrix: np.ndarray) -> List[float]:
    n = matrix.shape[0]
    utils = [0.0] * n
    for j, a in enumerate(owner):
        utils[a] += float(matrix[a, j])
    return utils


def welfare_of(owner: Sequence[int], matrix: np.ndarray) -> float:
    return min(utilities_of(owner, matrix))


def agent_utility(alloc: Allocation, prefs: PreferenceVector, agent: int) -> float:
    if len(alloc) != len(prefs):
        raise DimensionError(
            f"allocation covers {len(alloc)} resources, preference vector has {len(prefs)}"
        )
    return bundle_utility(alloc.owner, prefs.values, agent)


def _check_allocation(alloc: Allocation, profile: PreferenceProfile) -> None:
    if len(alloc) != profile.n_resources:
        raise DimensionError(
            f"allocation covers {len(alloc)} resources, profile has {profile.n_resources}"
        )
    if max(alloc.owner) >= profile.n_agents:
        raise DimensionError(
            f"allocation names agent {max(alloc.owner) + 1}, profile has {profile.n_agents} agents"
        )


def agent_utilities(alloc: Allocation, profile: PreferenceProfile) -> List[float]:
    _check_allocation(alloc, profile)
    return utilities_of(alloc.owner, profile.matrix())


def egalitarian_welfare(alloc: Allocation, profile: PreferenceProfile) -> Welfare:
    _check_allocation(alloc, profile)
    return Welfare(value=welfare_of(alloc.owner, profile.matrix()))


def validate_vector(
    values: Sequence[float],
    scenario: Scenario,
    row: Optional[int] = None,
    tolerance: Optional[float] = None,
    label: str = "agent",
) -> List[Violation]:
    tol = settings.SUM_TOLERANCE if tolerance is None else tolerance
    lo, hi = lower_bound(), upper_bound()
    who = f"{label} {row + 1}" if row is not None else label
    violations: List[Violation] = []

    for j, v in enumerate(values):
        if not lo <= v <= hi:
            violations.append(Violation(
                kind=ViolationKind.RANGE,
                row=row,
                column=j,
                message=f"{who}, resource {j + 1}: value {v!r} outside [{lo:g}, {hi:g}]",
            ))

    if scenario.is_limited:
        total = float(np.sum(values))
        if abs(total - scenario.r) > tol:
            violations.append(Violation(
                kind=ViolationKind.SUM,
                row=row,
                message=f"{who}: values sum to {total!r}, expected {scenario.r:g} (tolerance {tol:g})",
            ))
    return violations


def validate_instance(inst: ProblemInstance, tolerance: Optional[float] = None) -> List[Violation]:
    """Every range/length/sum violation of the instance; an empty list means valid."""
    profile = inst.profile
    violations: List[Violation] = []
    m = profile.n_resources

    for i, row in enumerate(profile.rows):
        if len(row) != m:
            violations.append(Violation(
                kind=ViolationKind.LENGTH,
                row=i,
                message=f"agent {i + 1}: {len(row)} values, expected {m}",
            ))
            continue
        violations.extend(validate_vector(row.values, profile.scenario, row=i, tolerance=tolerance))

    if not 0 <= inst.liar < profile.n_agents:
        violations.append(Violation(
            kind=ViolationKind.INDEX,
            message=f"liar {inst.liar + 1} is not an agent of this profile",
        ))

    if len(inst.truth) != m:
        violations.append(Violation(
            kind=ViolationKind.LENGTH,
            row=inst.liar,
            message=f"truth: {len(inst.truth)} values, expected {m}",
        ))
    else:
        violations.extend(validate_vector(
            inst.truth.values, profile.scenario, row=inst.liar, tolerance=tolerance, label="truth of agent"
        ))
    return violations


def ensure_valid_lie(values: Sequence[float], scenario: Scenario, tolerance: Optional[float] = None) -> None:
    violations = validate_vector(values, scenario, tolerance=tolerance, label="lie")
    if violations:
        raise InstanceValidationError(violations)
