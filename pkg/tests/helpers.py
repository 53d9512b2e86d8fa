import numpy as np

from fairlie.models import PreferenceProfile

# Published distributions (1-based owners) for the two instances in data/.
TABLE1_TRUTHFUL_LABELS = [4, 2, 1, 3, 2, 4, 1, 3, 4, 1]
TABLE2_TRUTHFUL_LABELS = [1, 3, 2, 2, 4, 3, 4, 3, 1, 4]
TABLE2_LYING_LABELS = [1, 3, 2, 2, 4, 3, 1, 3, 1, 4]
TABLE2_LIE = [13.53, 9.52, 14.35, 9.86, 6.1, 8.83, 9.03, 5.43, 12.2, 11.11]

TABLE1_TRUTHFUL_UTILITY = 221.08
TABLE1_BEST_ATTAINABLE = 434.94


def uniform_profile(rng: np.random.Generator, n: int, m: int, scenario=None) -> PreferenceProfile:
    return PreferenceProfile.from_matrix(rng.uniform(1.0, 99.0, size=(n, m)), scenario)
