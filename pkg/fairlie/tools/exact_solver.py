"""
Exhaustive egalitarian solver.

Allocations are enumerated as mixed-radix numbers over owner sequences with
resource 0 as the most significant digit, so enumeration index order is the
lexicographic order of the owner sequence. The first maximiser found is the
lexicographically smallest one.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from fairlie.config import settings
from fairlie.errors import SearchSpaceTooLarge
from fairlie.models import Allocation, ExactSolution, PreferenceProfile, Welfare
from fairlie.tools.welfare import welfare_of

logger = logging.getLogger(__name__)

BlockResult = Tuple[float, int, int]


def search_space_size(n_agents: int, n_resources: int) -> int:
    return n_agents ** n_resources


def owners_block(start: int, stop: int, n_agents: int, n_resources: int) -> np.ndarray:
    k = np.arange(start, stop, dtype=np.int64)
    owners = np.empty((stop - start, n_resources), dtype=np.int64)
    for j in range(n_resources - 1, -1, -1):
        owners[:, j] = k % n_agents
        k //= n_agents
    return owners


def block_welfare(matrix: np.ndarray, owners: np.ndarray) -> np.ndarray:
    n, m = matrix.shape
    welfare = None
    for i in range(n):
        acc = np.zeros(owners.shape[0])
        for j in range(m):
            acc = acc + np.where(owners[:, j] == i, matrix[i, j], 0.0)
        welfare = acc if welfare is None else np.minimum(welfare, acc)
    return welfare


def _solve_block(matrix: np.ndarray, start: int, stop: int) -> BlockResult:
    n, m = matrix.shape
    welfare = block_welfare(matrix, owners_block(start, stop, n, m))
    offset = int(np.argmax(welfare))
    best = float(welfare[offset])
    return best, start + offset, int(np.count_nonzero(welfare == best))


def _reduce(results: List[BlockResult]) -> BlockResult:
    best_value = max(r[0] for r in results)
    best_index = min(r[1] for r in results if r[0] == best_value)
    count = sum(r[2] for r in results if r[0] == best_value)
    return best_value, best_index, count


def solve_exact(
    profile: PreferenceProfile,
    budget: Optional[int] = None,
    count_optimal: bool = False,
    workers: Optional[int] = None,
) -> ExactSolution:
    """Welfare-maximising allocation over all n^m candidates, ties to the lexicographically smallest."""
    budget = settings.EXACT_BUDGET if budget is None else budget
    workers = settings.WORKERS if workers is None else workers
    n, m = profile.n_agents, profile.n_resources
    size = search_space_size(n, m)
    if size > budget:
        raise SearchSpaceTooLarge(n, m, budget)

    matrix = profile.matrix()
    chunk = max(1, settings.EXACT_CHUNK)
    bounds = [(start, min(start + chunk, size)) for start in range(0, size, chunk)]

    logger.debug(f"[Exact] Enumerating {size} allocations ({n} agents, {m} resources) in {len(bounds)} blocks")

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _solve_block(matrix, *b), bounds))
    else:
        results = [_solve_block(matrix, start, stop) for start, stop in bounds]

    _, best_index, count = _reduce(results)
    owner = owners_block(best_index, best_index + 1, n, m)[0]
    best = Allocation.of(owner)

    return ExactSolution(
        best=best,
        welfare=Welfare(value=welfare_of(best.owner, matrix)),
        optimal_set_size=count if count_optimal else None,
        evaluated=size,
    )


def exists_positive_allocation(profile: PreferenceProfile, budget: Optional[int] = None) -> bool:
    matrix = profile.matrix()
    if np.all(matrix > 0):
        return profile.n_resources >= profile.n_agents
    if profile.n_resources < profile.n_agents:
        return False
    return solve_exact(profile, budget=budget).welfare.value > 0
