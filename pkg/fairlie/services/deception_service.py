import logging
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from fairlie.config import lower_bound, upper_bound
from fairlie.errors import ParameterError, RenormalizationError, ScenarioMismatchError
from fairlie.models import (
    Allocation,
    Direction,
    GAConfig,
    LieEvaluation,
    LieSearchResult,
    LieVector,
    PreferenceProfile,
    PreferenceVector,
    ProblemInstance,
    Scenario,
    SolverSpec,
    Strategy,
    SweepPoint,
    SweepResult,
    Target,
)
from fairlie.services.allocation_service import allocation_service
from fairlie.tools.genetic import RealVectorGenome, evolve_generic, substream
from fairlie.tools.renormalize import project_to_scenario, renormalize_limited
from fairlie.tools.welfare import bundle_utility, ensure_valid_lie

logger = logging.getLogger(__name__)

# Scaled-truth seeds placed next to the truthful one in unlimited ULGA runs.
LADDER_RUNGS = 8


def select_targets(
    truth: Sequence[float],
    estimated_others: np.ndarray,
    strategy: Strategy,
    seed: int = 0,
) -> List[int]:
    """
    Resources a strategy modifies, identical for every lying level.

    Self rankings read the liar's true vector, rival rankings the column sums
    of the estimated rival rows; ties go to the lower resource index. Random
    targets are drawn from the substream (seed, strategy id).
    """
    values = np.asarray(truth, dtype=float)
    m = values.shape[0]
    k = min(strategy.top_k, m)

    if strategy.target == Target.ALL:
        return list(range(m))
    if strategy.target == Target.RANDOM:
        rng = substream(seed, strategy.id)
        return sorted(int(j) for j in rng.choice(m, size=k, replace=False))

    if strategy.target in (Target.MOST_SELF, Target.LEAST_SELF):
        ranking = values
    else:
        ranking = np.asarray(estimated_others, dtype=float).sum(axis=0)

    if strategy.target in (Target.MOST_SELF, Target.MOST_OTHERS):
        order = np.argsort(-ranking, kind="stable")
    else:
        order = np.argsort(ranking, kind="stable")
    return [int(j) for j in order[:k]]


def apply_strategy(
    truth: PreferenceVector,
    estimated_others: np.ndarray,
    strategy: Strategy,
    level: int,
    scenario: Scenario,
    seed: int = 0,
) -> LieVector:
    if not 1 <= level <= 100:
        raise ParameterError(f"lying level must be in 1..100, got {level}")

    targets = select_targets(truth.values, estimated_others, strategy, seed)
    step = level / 100.0
    factor = 1.0 - step if strategy.direction == Direction.DECREASE else 1.0 + step

    x = truth.as_array()
    x[targets] = x[targets] * factor
    x = np.clip(x, lower_bound(), upper_bound())

    if scenario.is_limited:
        fixed = None if strategy.target == Target.ALL else targets
        try:
            x = renormalize_limited(x, scenario.r, fixed=fixed)
        except RenormalizationError as e:
            logger.warning(
                f"[Sweep] Strategy {strategy.id} level {level}: {e}; rebalancing every resource instead"
            )
            x = renormalize_limited(x, scenario.r)
    return LieVector.of(x)


def optimal_lie_unlimited(
    truth: PreferenceVector,
    estimated_others: np.ndarray,
    scenario: Optional[Scenario] = None,
) -> LieVector:
    """
    Proportionally shrunk truth whose total stays below every positive rival value.

    Any such report makes the auctioneer hand the liar everything except one
    resource per rival, chosen among the ones the liar values least.
    """
    if scenario is not None and scenario.is_limited:
        raise ScenarioMismatchError("the closed-form optimal lie only exists in the unlimited scenario")
    values = truth.as_array()
    c = shrink_factor(values, estimated_others)
    return LieVector.of(np.maximum(c * values, lower_bound()))


def shrink_factor(values: np.ndarray, estimated_others: np.ndarray) -> float:
    others = np.asarray(estimated_others, dtype=float)
    positive = others[others > 0]
    return 0.5 * float(positive.min()) / float(np.asarray(values, dtype=float).sum())


def best_attainable_utility(truth: PreferenceVector, n_agents: int) -> float:
    """True utility of everything except the n-1 resources the liar values least."""
    values = sorted(truth.values)
    if len(values) < n_agents:
        return 0.0
    return float(sum(values[n_agents - 1:]))


class LieGenome(RealVectorGenome):
    """
    Candidate lies, always projected back onto the scenario constraints.

    Limited lies share a fixed budget and move by additive Gaussian steps.
    Unlimited lies have no budget, so their magnitude matters as much as their
    shape: they start log-uniform over [lower_bound, upper_bound] and mutate
    by multiplicative log-normal steps.
    """

    def __init__(self, scenario: Scenario, n_resources: int, scale: float, log_step: float):
        super().__init__(n_resources, lower_bound(), upper_bound(), scale)
        self.scenario = scenario
        self.log_step = log_step

    def random(self, rng):
        if self.scenario.is_limited:
            return super().random(rng)
        return self.repair(np.exp(rng.uniform(np.log(self.low), np.log(self.high), size=self.length)))

    def mutate(self, x, rng, rate):
        if self.scenario.is_limited:
            return super().mutate(x, rng, rate)
        x = x.astype(float)
        mask = rng.random(self.length) < rate
        x[mask] *= np.exp(rng.normal(0.0, self.log_step, size=int(mask.sum())))
        return self.repair(x)

    def repair(self, x):
        return project_to_scenario(x, self.scenario)


def scaled_truth_ladder(truth: PreferenceVector, estimated_others: np.ndarray, rungs: int) -> List[np.ndarray]:
    """
    Truth shrunk geometrically from full size down to the closed-form lie.

    The last rung is exactly ``optimal_lie_unlimited``.
    """
    if rungs < 1:
        return []
    closed_form = optimal_lie_unlimited(truth, estimated_others).as_array()
    values = truth.as_array()
    c = shrink_factor(values, estimated_others)
    ladder = [np.maximum(values * c ** (k / rungs), lower_bound()) for k in range(1, rungs)]
    ladder.append(closed_form)
    return ladder


class DeceptionService:
    def _liar_utility(self, inst: ProblemInstance, alloc: Allocation) -> float:
        return bundle_utility(alloc.owner, inst.truth.values, inst.liar)

    def evaluate_lie(
        self,
        inst: ProblemInstance,
        lie: LieVector,
        solver: SolverSpec,
        tolerance: Optional[float] = None,
    ) -> LieEvaluation:
        ensure_valid_lie(lie.reported.values, inst.scenario, tolerance)

        truthful, truthful_welfare = allocation_service.solve_with_welfare(inst.truthful_profile(), solver)
        lying, lying_welfare = allocation_service.solve_with_welfare(inst.profile_with(lie.reported), solver)

        return LieEvaluation(
            truthful_allocation=truthful,
            lying_allocation=lying,
            truthful_utility=self._liar_utility(inst, truthful),
            lying_utility=self._liar_utility(inst, lying),
            truthful_welfare=truthful_welfare,
            lying_welfare=lying_welfare,
        )

    def lie_profit(self, inst: ProblemInstance, lie: LieVector, solver: SolverSpec) -> float:
        return self.evaluate_lie(inst, lie, solver).profit

    def allocation_profit(self, inst: ProblemInstance, truthful: Allocation, lying: Allocation) -> float:
        """Profit implied by two given allocations, e.g. published distributions."""
        return self._liar_utility(inst, lying) - self._liar_utility(inst, truthful)

    def strategy_sweep(
        self,
        inst: ProblemInstance,
        solver: SolverSpec,
        levels: int = 100,
        strategies: Optional[Iterable[Strategy]] = None,
        seed: int = 0,
    ) -> SweepResult:
        strategies = list(strategies) if strategies is not None else Strategy.basic()
        others = inst.estimated_rivals()

        truthful = allocation_service.solve(inst.truthful_profile(), solver)
        truthful_utility = self._liar_utility(inst, truthful)
        logger.info(
            f"[Sweep] {len(strategies)} strategies x {levels} levels, solver {solver.label()}, "
            f"truthful utility {truthful_utility:.6g}"
        )

        cache: Dict[Tuple[float, ...], float] = {}
        result = SweepResult(truthful_utility=truthful_utility)
        for strategy in strategies:
            for level in range(1, levels + 1):
                lie = apply_strategy(inst.truth, others, strategy, level, inst.scenario, seed)
                key = lie.reported.values
                if key not in cache:
                    alloc = allocation_service.solve(inst.profile_with(lie.reported), solver)
                    cache[key] = self._liar_utility(inst, alloc)
                utility = cache[key]
                result.points.append(SweepPoint(
                    strategy=strategy.id,
                    level=level,
                    profit=utility - truthful_utility,
                    lying_utility=utility,
                ))
            logger.info(f"[Sweep] Strategy {strategy.id}: mean profit {result.mean_profit(strategy.id):.6g}")
        return result

    def optimal_lie_ulga(
        self,
        inst: ProblemInstance,
        ulga_cfg: GAConfig,
        inner: SolverSpec,
        workers: Optional[int] = None,
    ) -> LieSearchResult:
        """
        Bilevel search for the most profitable report.

        Fitness of a candidate lie is the liar's true utility in the allocation
        the inner solver picks for it; the allocation for the truthful report
        is fixed, so this ranks lies exactly as their profit does.
        """
        scenario = inst.scenario
        matrix = inst.profile.matrix()

        def fitness(candidate: np.ndarray) -> float:
            reported = matrix.copy()
            reported[inst.liar] = candidate
            alloc = allocation_service.solve(PreferenceProfile.from_matrix(reported, scenario), inner)
            return self._liar_utility(inst, alloc)

        genome = LieGenome(scenario, inst.profile.n_resources, ulga_cfg.mutation_scale, ulga_cfg.log_step)
        # Individual 0 is the truthful row exactly as the truthful baseline is solved.
        seeds = [inst.truth.as_array()]
        if not scenario.is_limited:
            rungs = min(LADDER_RUNGS, ulga_cfg.population_size - 1)
            seeds += scaled_truth_ladder(inst.truth, inst.estimated_rivals(), rungs)

        logger.info(
            f"[ULGA] Searching lies: population {ulga_cfg.population_size}, "
            f"{ulga_cfg.generations} generations, inner solver {inner.label()}"
        )
        result = evolve_generic(fitness, genome, ulga_cfg, seeds=seeds, workers=workers, tag="ULGA")

        truthful = allocation_service.solve(inst.truthful_profile(), inner)
        truthful_utility = self._liar_utility(inst, truthful)
        lie = LieVector.of(result.best)
        profit = result.fitness - truthful_utility
        logger.info(f"[ULGA] Best lie utility {result.fitness:.6g}, profit {profit:.6g}")

        return LieSearchResult(
            lie=lie,
            profit=profit,
            lying_utility=result.fitness,
            truthful_utility=truthful_utility,
            history=result.history,
        )


deception_service = DeceptionService()
