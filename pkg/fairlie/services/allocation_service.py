import logging
from typing import Optional

from fairlie.models import (
    Allocation,
    GAConfig,
    GARun,
    PreferenceProfile,
    SolverKind,
    SolverSpec,
    Welfare,
)
from fairlie.tools.exact_solver import solve_exact
from fairlie.tools.genetic import AllocationGenome, evolve_generic
from fairlie.tools.welfare import welfare_of

logger = logging.getLogger(__name__)


def solve_llga(profile: PreferenceProfile, cfg: GAConfig, workers: Optional[int] = None) -> GARun:
    """Approximate egalitarian optimum; fitness of an owner sequence is its welfare."""
    matrix = profile.matrix()
    genome = AllocationGenome(profile.n_agents, profile.n_resources)
    result = evolve_generic(lambda owner: welfare_of(owner, matrix), genome, cfg, workers=workers, tag="LLGA")
    return GARun(
        best=Allocation.of(result.best),
        welfare=Welfare(value=result.fitness),
        history=result.history,
    )


class AllocationService:
    """The auctioneer: turns a reported profile into an allocation with the configured solver."""

    def solve(self, profile: PreferenceProfile, solver: SolverSpec) -> Allocation:
        if solver.kind == SolverKind.EXACT:
            return solve_exact(profile, budget=solver.budget).best
        return solve_llga(profile, solver.llga).best

    def solve_with_welfare(self, profile: PreferenceProfile, solver: SolverSpec) -> tuple[Allocation, Welfare]:
        if solver.kind == SolverKind.EXACT:
            solution = solve_exact(profile, budget=solver.budget)
            return solution.best, solution.welfare
        run = solve_llga(profile, solver.llga)
        return run.best, run.welfare


allocation_service = AllocationService()
