"""
Generational genetic algorithm with tournament selection and elitism.

Random numbers come from numpy's PCG64 seeded through SeedSequence. Every
individual created in generation g at population slot k draws from its own
substream ``SeedSequence(seed, spawn_key=(g, k))`` (g = 0 is the initial
population), so results do not depend on how fitness evaluations are
scheduled.
"""
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from fairlie.config import settings
from fairlie.models import GAConfig

logger = logging.getLogger(__name__)

Fitness = Callable[[np.ndarray], float]


def substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=tuple(key))))


class GenomeSpec(ABC):
    length: int

    @abstractmethod
    def random(self, rng: np.random.Generator) -> np.ndarray:
        ...

    @abstractmethod
    def crossover(self, a: np.ndarray, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        ...

    @abstractmethod
    def mutate(self, x: np.ndarray, rng: np.random.Generator, rate: float) -> np.ndarray:
        ...

    def repair(self, x: np.ndarray) -> np.ndarray:
        return x


class AllocationGenome(GenomeSpec):
    """Owner sequences: gene j is the agent receiving resource j."""

    def __init__(self, n_agents: int, n_resources: int):
        self.n_agents = n_agents
        self.length = n_resources

    def random(self, rng):
        return rng.integers(0, self.n_agents, size=self.length)

    def crossover(self, a, b, rng):
        mask = rng.random(self.length) < 0.5
        return np.where(mask, a, b)

    def mutate(self, x, rng, rate):
        x = x.copy()
        mask = rng.random(self.length) < rate
        x[mask] = rng.integers(0, self.n_agents, size=int(mask.sum()))
        return x


class RealVectorGenome(GenomeSpec):
    """Boxed real vectors with arithmetic blend crossover and Gaussian mutation."""

    def __init__(self, length: int, low: float, high: float, scale: float):
        self.length = length
        self.low = low
        self.high = high
        self.scale = scale

    def random(self, rng):
        return self.repair(rng.uniform(self.low, self.high, size=self.length))

    def crossover(self, a, b, rng):
        w = rng.random()
        return self.repair(w * a + (1.0 - w) * b)

    def mutate(self, x, rng, rate):
        x = x.astype(float)
        mask = rng.random(self.length) < rate
        x[mask] += rng.normal(0.0, self.scale, size=int(mask.sum()))
        return self.repair(x)

    def repair(self, x):
        return np.clip(x, self.low, self.high)


@dataclass
class EvolutionResult:
    best: np.ndarray
    fitness: float
    history: List[float] = field(default_factory=list)
    evaluations: int = 0


def _evaluate(fitness: Fitness, individuals: Sequence[np.ndarray], workers: int) -> List[float]:
    if workers > 1 and len(individuals) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return [float(f) for f in pool.map(fitness, individuals)]
    return [float(fitness(x)) for x in individuals]


def _tournament(fit: Sequence[float], size: int, rng: np.random.Generator) -> int:
    contestants = sorted(int(k) for k in rng.choice(len(fit), size=size, replace=False))
    return max(contestants, key=lambda k: fit[k])


def _ranked(fit: Sequence[float]) -> List[int]:
    return sorted(range(len(fit)), key=lambda k: (-fit[k], k))


def evolve_generic(
    fitness: Fitness,
    genome: GenomeSpec,
    cfg: GAConfig,
    seeds: Optional[Sequence[np.ndarray]] = None,
    workers: Optional[int] = None,
    tag: str = "GA",
) -> EvolutionResult:
    """Maximise ``fitness`` over the genome family described by ``genome``."""
    workers = settings.WORKERS if workers is None else workers
    rate = cfg.mutation_rate if cfg.mutation_rate is not None else 1.0 / genome.length
    size = cfg.population_size

    # Seeds are used as given; callers are responsible for their feasibility.
    population = [genome.random(substream(cfg.seed, 0, k)) for k in range(size)]
    for k, individual in enumerate((seeds or [])[:size]):
        population[k] = np.asarray(individual).copy()

    fit = _evaluate(fitness, population, workers)
    evaluations = len(population)
    history = [max(fit)]

    for generation in range(1, cfg.generations + 1):
        elites = _ranked(fit)[:cfg.elitism]
        children = []
        for k in range(cfg.elitism, size):
            rng = substream(cfg.seed, generation, k)
            first = _tournament(fit, cfg.tournament_size, rng)
            second = _tournament(fit, cfg.tournament_size, rng)
            if rng.random() < cfg.crossover_rate:
                child = genome.crossover(population[first], population[second], rng)
            else:
                child = population[first].copy()
            children.append(genome.mutate(child, rng, rate))

        child_fit = _evaluate(fitness, children, workers)
        evaluations += len(children)
        population = [population[e] for e in elites] + children
        fit = [fit[e] for e in elites] + child_fit
        history.append(max(fit))

        logger.debug(f"[{tag}] generation {generation}: best {history[-1]:.6g}")

    best_index = _ranked(fit)[0]
    logger.debug(f"[{tag}] finished {cfg.generations} generations, {evaluations} evaluations, best {fit[best_index]:.6g}")
    return EvolutionResult(
        best=population[best_index],
        fitness=fit[best_index],
        history=history,
        evaluations=evaluations,
    )
