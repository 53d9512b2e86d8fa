import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from fairlie.config import settings


class ScenarioMode(str, Enum):
    UNLIMITED = "unlimited"
    LIMITED = "limited"


class Direction(str, Enum):
    DECREASE = "decrease"
    INCREASE = "increase"


class Target(str, Enum):
    RANDOM = "random"
    MOST_OTHERS = "most_valued_by_others"
    LEAST_OTHERS = "least_valued_by_others"
    MOST_SELF = "most_valued_by_self"
    LEAST_SELF = "least_valued_by_self"
    ALL = "all"


class SolverKind(str, Enum):
    EXACT = "exact"
    LLGA = "llga"


class ViolationKind(str, Enum):
    RANGE = "range"
    SUM = "sum"
    LENGTH = "length"
    INDEX = "index"


class Scenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    mode: ScenarioMode = ScenarioMode.UNLIMITED
    r: Optional[float] = None

    @model_validator(mode="after")
    def check_r(self):
        if self.mode == ScenarioMode.LIMITED:
            if self.r is None or not self.r > 0:
                raise ValueError("limited scenario requires a positive r")
        elif self.r is not None:
            raise ValueError("r is only meaningful in the limited scenario")
        return self

    @classmethod
    def unlimited(cls) -> "Scenario":
        return cls(mode=ScenarioMode.UNLIMITED)

    @classmethod
    def limited(cls, r: Optional[float] = None) -> "Scenario":
        return cls(mode=ScenarioMode.LIMITED, r=settings.DEFAULT_R if r is None else r)

    @property
    def is_limited(self) -> bool:
        return self.mode == ScenarioMode.LIMITED

    def label(self) -> str:
        return f"limited(r={self.r:g})" if self.is_limited else "unlimited"


class PreferenceVector(BaseModel):
    """One agent's valuation of every resource (utility points)."""

    model_config = ConfigDict(frozen=True)

    values: Tuple[float, ...]

    @field_validator("values")
    @classmethod
    def validate_values(cls, v):
        if len(v) < 1:
            raise ValueError("a preference vector needs at least one resource")
        if not all(math.isfinite(x) for x in v):
            raise ValueError("preference values must be finite")
        return v

    @classmethod
    def of(cls, values) -> "PreferenceVector":
        return cls(values=tuple(float(x) for x in values))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def __len__(self) -> int:
        return len(self.values)


class PreferenceProfile(BaseModel):
    """Reported (or true) preferences of all agents; row i belongs to agent i."""

    model_config = ConfigDict(frozen=True)

    rows: Tuple[PreferenceVector, ...]
    scenario: Scenario = Field(default_factory=Scenario.unlimited)

    @field_validator("rows")
    @classmethod
    def validate_rows(cls, v):
        if len(v) < 2:
            raise ValueError("a profile needs at least two agents")
        lengths = {len(row) for row in v}
        if len(lengths) != 1:
            raise ValueError(f"all rows must have the same length, got lengths {sorted(lengths)}")
        return v

    @classmethod
    def from_matrix(cls, matrix, scenario: Optional[Scenario] = None) -> "PreferenceProfile":
        rows = tuple(PreferenceVector.of(row) for row in np.asarray(matrix, dtype=float))
        return cls(rows=rows, scenario=scenario or Scenario.unlimited())

    @property
    def n_agents(self) -> int:
        return len(self.rows)

    @property
    def n_resources(self) -> int:
        return len(self.rows[0])

    def matrix(self) -> np.ndarray:
        return np.array([row.values for row in self.rows], dtype=float)

    def with_row(self, agent: int, row: PreferenceVector) -> "PreferenceProfile":
        rows = list(self.rows)
        rows[agent] = row
        return PreferenceProfile(rows=tuple(rows), scenario=self.scenario)

    def rows_except(self, agent: int) -> np.ndarray:
        return np.delete(self.matrix(), agent, axis=0)


class Allocation(BaseModel):
    """owner[j] is the (0-based) agent receiving resource j."""

    model_config = ConfigDict(frozen=True)

    owner: Tuple[int, ...]

    @field_validator("owner")
    @classmethod
    def validate_owner(cls, v):
        if len(v) < 1:
            raise ValueError("an allocation covers at least one resource")
        if any(a < 0 for a in v):
            raise ValueError("agent indices are non-negative")
        return v

    @classmethod
    def of(cls, owner) -> "Allocation":
        return cls(owner=tuple(int(a) for a in owner))

    @classmethod
    def from_labels(cls, labels) -> "Allocation":
        return cls(owner=tuple(int(a) - 1 for a in labels))

    def labels(self) -> List[int]:
        return [a + 1 for a in self.owner]

    def bundle(self, agent: int) -> List[int]:
        return [j for j, a in enumerate(self.owner) if a == agent]

    def as_array(self) -> np.ndarray:
        return np.asarray(self.owner, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.owner)


class ProblemInstance(BaseModel):
    """Reported profile plus the designated liar and its true preferences."""

    model_config = ConfigDict(frozen=True)

    profile: PreferenceProfile
    liar: int = 0
    truth: PreferenceVector

    @model_validator(mode="after")
    def check_liar(self):
        if not 0 <= self.liar < self.profile.n_agents:
            raise ValueError(f"liar index {self.liar} outside 0..{self.profile.n_agents - 1}")
        if len(self.truth) != self.profile.n_resources:
            raise ValueError(
                f"truth has {len(self.truth)} values, profile has {self.profile.n_resources} resources"
            )
        return self

    @classmethod
    def create(
        cls,
        profile: PreferenceProfile,
        liar: int = 0,
        truth: Optional[PreferenceVector] = None,
    ) -> "ProblemInstance":
        # A liar that reports its true row unless told otherwise.
        if truth is None and 0 <= liar < profile.n_agents:
            truth = profile.rows[liar]
        return cls(profile=profile, liar=liar, truth=truth)

    @property
    def scenario(self) -> Scenario:
        return self.profile.scenario

    @property
    def reported(self) -> PreferenceVector:
        return self.profile.rows[self.liar]

    def truthful_profile(self) -> PreferenceProfile:
        return self.profile.with_row(self.liar, self.truth)

    def profile_with(self, row: PreferenceVector) -> PreferenceProfile:
        return self.profile.with_row(self.liar, row)

    def estimated_rivals(self) -> np.ndarray:
        return self.profile.rows_except(self.liar)

    def with_rivals(self, rivals: np.ndarray) -> "ProblemInstance":
        matrix = np.insert(np.asarray(rivals, dtype=float), self.liar, self.reported.as_array(), axis=0)
        profile = PreferenceProfile.from_matrix(matrix, self.scenario)
        return ProblemInstance(profile=profile, liar=self.liar, truth=self.truth)


class Welfare(BaseModel):
    model_config = ConfigDict(frozen=True)

    value: float = Field(ge=0)


class Violation(BaseModel):
    kind: ViolationKind
    row: Optional[int] = None
    column: Optional[int] = None
    message: str


class ExactSolution(BaseModel):
    best: Allocation
    welfare: Welfare
    optimal_set_size: Optional[int] = None
    evaluated: int


class GAConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    population_size: int = Field(default=50, ge=2)
    generations: int = Field(default=50, ge=0)
    tournament_size: int = Field(default=3, ge=2)
    crossover_rate: float = Field(default=0.9, ge=0.0, le=1.0)
    # None means 1 / genome length.
    mutation_rate: Optional[float] = Field(default=None, ge=0.0, le=1.0)
    elitism: int = Field(default=1, ge=0)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    # Standard deviation of the Gaussian step for real-valued genomes.
    mutation_scale: float = Field(default=5.0, gt=0.0)
    # Standard deviation of the log-space step for scale-free genomes (unlimited lies).
    log_step: float = Field(default=0.5, gt=0.0)

    @model_validator(mode="after")
    def check_sizes(self):
        if self.tournament_size > self.population_size:
            raise ValueError(
                f"tournament_size {self.tournament_size} exceeds population_size {self.population_size}"
            )
        if self.elitism >= self.population_size:
            raise ValueError(f"elitism {self.elitism} must be below population_size {self.population_size}")
        return self

    @classmethod
    def standard_llga(cls, seed: int = 0) -> "GAConfig":
        return cls(population_size=50, generations=50, seed=seed)

    @classmethod
    def long_ulga(cls, seed: int = 0) -> "GAConfig":
        return cls(population_size=50, generations=3000, seed=seed)

    @classmethod
    def desk_ulga(cls, seed: int = 0) -> "GAConfig":
        return cls(population_size=50, generations=300, seed=seed)


class GARun(BaseModel):
    best: Allocation
    welfare: Welfare
    history: List[float]


class SolverSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: SolverKind = SolverKind.EXACT
    llga: GAConfig = Field(default_factory=GAConfig.standard_llga)
    budget: int = Field(default_factory=lambda: settings.EXACT_BUDGET, ge=1)

    @classmethod
    def exact(cls, budget: Optional[int] = None) -> "SolverSpec":
        if budget is None:
            return cls(kind=SolverKind.EXACT)
        return cls(kind=SolverKind.EXACT, budget=budget)

    @classmethod
    def with_llga(cls, cfg: Optional[GAConfig] = None) -> "SolverSpec":
        return cls(kind=SolverKind.LLGA, llga=cfg or GAConfig.standard_llga())

    def label(self) -> str:
        if self.kind == SolverKind.EXACT:
            return "exact"
        c = self.llga
        return f"llga(pop={c.population_size},gen={c.generations},seed={c.seed})"


# Summary of the basic lying strategies; 11 is the uniform decrease of every resource.
STRATEGY_TABLE: Dict[int, Tuple[Direction, Target]] = {
    1: (Direction.DECREASE, Target.RANDOM),
    2: (Direction.INCREASE, Target.RANDOM),
    3: (Direction.INCREASE, Target.MOST_OTHERS),
    4: (Direction.INCREASE, Target.LEAST_OTHERS),
    5: (Direction.INCREASE, Target.MOST_SELF),
    6: (Direction.INCREASE, Target.LEAST_SELF),
    7: (Direction.DECREASE, Target.MOST_OTHERS),
    8: (Direction.DECREASE, Target.LEAST_OTHERS),
    9: (Direction.DECREASE, Target.MOST_SELF),
    10: (Direction.DECREASE, Target.LEAST_SELF),
    11: (Direction.DECREASE, Target.ALL),
}


class Strategy(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=1, le=11)
    direction: Direction
    target: Target
    top_k: int = Field(default=3, ge=1)

    @model_validator(mode="after")
    def check_table(self):
        if STRATEGY_TABLE[self.id] != (self.direction, self.target):
            raise ValueError(f"strategy {self.id} is {STRATEGY_TABLE[self.id]}, not {(self.direction, self.target)}")
        return self

    @classmethod
    def from_id(cls, strategy_id: int, top_k: Optional[int] = None) -> "Strategy":
        direction, target = STRATEGY_TABLE[strategy_id]
        return cls(
            id=strategy_id,
            direction=direction,
            target=target,
            top_k=settings.TOP_K if top_k is None else top_k,
        )

    @classmethod
    def basic(cls, top_k: Optional[int] = None) -> List["Strategy"]:
        return [cls.from_id(i, top_k) for i in range(1, 11)]


class LieVector(BaseModel):
    model_config = ConfigDict(frozen=True)

    reported: PreferenceVector

    @classmethod
    def of(cls, values) -> "LieVector":
        return cls(reported=PreferenceVector.of(values))

    def as_array(self) -> np.ndarray:
        return self.reported.as_array()


class LieEvaluation(BaseModel):
    truthful_allocation: Allocation
    lying_allocation: Allocation
    truthful_utility: float
    lying_utility: float
    truthful_welfare: Welfare
    lying_welfare: Welfare

    @property
    def profit(self) -> float:
        return self.lying_utility - self.truthful_utility


class SweepPoint(BaseModel):
    strategy: int
    level: int
    profit: float
    lying_utility: float


class SweepResult(BaseModel):
    truthful_utility: float
    points: List[SweepPoint] = []

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [p.model_dump() for p in self.points],
            columns=["strategy", "level", "profit", "lying_utility"],
        )

    def profit(self, strategy: int, level: int) -> float:
        # Level 0 is truth-telling.
        if level == 0:
            return 0.0
        for p in self.points:
            if p.strategy == strategy and p.level == level:
                return p.profit
        raise KeyError((strategy, level))

    def mean_profit(self, strategy: int) -> float:
        profits = [p.profit for p in self.points if p.strategy == strategy]
        return float(np.mean(profits)) if profits else 0.0


class LieSearchResult(BaseModel):
    lie: LieVector
    profit: float
    lying_utility: float
    truthful_utility: float
    history: List[float] = []


class RobustnessConfig(BaseModel):
    sigmas: List[float]
    replicates: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    solver: SolverSpec = Field(default_factory=SolverSpec.exact)
    # First replicate index; lets a long run be split across processes.
    replicate_offset: int = Field(default=0, ge=0)

    @field_validator("sigmas")
    @classmethod
    def validate_sigmas(cls, v):
        if not v:
            raise ValueError("at least one sigma is required")
        if any(s < 0 or not math.isfinite(s) for s in v):
            raise ValueError("sigmas must be finite and non-negative")
        if any(b < a for a, b in zip(v, v[1:])):
            raise ValueError("sigmas must be in ascending order")
        return v


class RobustnessPoint(BaseModel):
    sigma: float
    mean_profit: float
    mean_truthful_utility: float
    mean_lying_utility: float
    profit_std: float
    win_rate: float


class RobustnessCurve(BaseModel):
    points: List[RobustnessPoint]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [p.model_dump() for p in self.points],
            columns=[
                "sigma",
                "mean_profit",
                "mean_truthful_utility",
                "mean_lying_utility",
                "profit_std",
                "win_rate",
            ],
        )

    def at(self, sigma: float) -> RobustnessPoint:
        for p in self.points:
            if p.sigma == sigma:
                return p
        raise KeyError(sigma)


class ExperimentReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    command: str
    config: Dict[str, Any] = {}
    seed: Optional[int] = None
    solver: Optional[str] = None
    version: str = Field(default_factory=lambda: settings.ARTIFACT_VERSION)
    sampler: Optional[str] = None
    created_at: float
    data: pd.DataFrame
