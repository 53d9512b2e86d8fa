import numpy as np

from fairlie.config import lower_bound, settings, upper_bound
from fairlie.models import PreferenceProfile, ProblemInstance, Scenario
from fairlie.tools.genetic import substream
from fairlie.tools.renormalize import renormalize_limited

DISTRIBUTION = "iid Uniform(EPSILON, UPPER_BOUND), rows renormalised to r in limited mode"


def random_matrix(n_agents: int, n_resources: int, scenario: Scenario, seed: int) -> np.ndarray:
    rng = substream(seed, 0)
    matrix = rng.uniform(settings.EPSILON, settings.UPPER_BOUND, size=(n_agents, n_resources))
    matrix = np.clip(matrix, lower_bound(), upper_bound())
    if scenario.is_limited:
        matrix = np.vstack([renormalize_limited(row, scenario.r) for row in matrix])
    return matrix


def random_instance(
    n_agents: int,
    n_resources: int,
    scenario: Scenario,
    seed: int,
    liar: int = 0,
) -> ProblemInstance:
    profile = PreferenceProfile.from_matrix(random_matrix(n_agents, n_resources, scenario, seed), scenario)
    return ProblemInstance.create(profile, liar=liar)
