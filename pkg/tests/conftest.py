import itertools
from pathlib import Path

import numpy as np
import pytest

from fairlie.models import ProblemInstance, Scenario
from fairlie.tools.generator import random_instance
from fairlie.tools.instance_format import load_instance

DATA_DIR = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def table1_path() -> str:
    return str(DATA_DIR / "table1_unlimited.inst")


@pytest.fixture
def table2_path() -> str:
    return str(DATA_DIR / "table2_limited.inst")


@pytest.fixture
def table1(table1_path) -> ProblemInstance:
    return load_instance(table1_path)


@pytest.fixture
def table2(table2_path) -> ProblemInstance:
    return load_instance(table2_path, lenient=True)


@pytest.fixture
def small_unlimited() -> ProblemInstance:
    return random_instance(3, 5, Scenario.unlimited(), seed=11)


@pytest.fixture
def small_limited() -> ProblemInstance:
    return random_instance(3, 5, Scenario.limited(100.0), seed=11)


@pytest.fixture
def brute_force():
    """Independent oracle: first (lexicographic) maximiser over itertools.product."""

    def solve(matrix):
        matrix = np.asarray(matrix, dtype=float)
        n, m = matrix.shape
        best, best_owner = None, None
        for owner in itertools.product(range(n), repeat=m):
            w = min(sum(matrix[i][j] for j in range(m) if owner[j] == i) for i in range(n))
            if best is None or w > best:
                best, best_owner = w, owner
        return best, best_owner

    return solve
