"""
Imprecise-information experiments.

The liar's report is fixed in advance; rival rows are resampled around the
liar's estimate and both the truthful and the lying report are re-solved.
Replicate r at sigma index s draws from substream (seed, s, r).
"""
import logging
from typing import List, Optional

import numpy as np
import pandas as pd

from fairlie.config import lower_bound, upper_bound
from fairlie.errors import ParameterError
from fairlie.models import (
    LieVector,
    ProblemInstance,
    RobustnessConfig,
    RobustnessCurve,
    RobustnessPoint,
    Scenario,
)
from fairlie.services.allocation_service import allocation_service
from fairlie.tools.genetic import substream
from fairlie.tools.renormalize import renormalize_limited
from fairlie.tools.welfare import bundle_utility, ensure_valid_lie

logger = logging.getLogger(__name__)

SAMPLER = "numpy.PCG64+SeedSequence(seed, spawn_key=(sigma_index, replicate)); Generator.normal (ziggurat)"


def perturb_profile(
    estimated: np.ndarray,
    sigma: float,
    rng: np.random.Generator,
    scenario: Scenario,
) -> np.ndarray:
    estimated = np.asarray(estimated, dtype=float)
    if sigma < 0:
        raise ParameterError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        noisy = estimated.copy()
    else:
        noisy = np.clip(rng.normal(loc=estimated, scale=sigma), lower_bound(), upper_bound())
    # Every sigma, zero included, sees rival rows that sum to r.
    if scenario.is_limited:
        noisy = np.vstack([renormalize_limited(row, scenario.r) for row in noisy])
    return noisy


class RobustnessService:
    def samples(
        self,
        inst: ProblemInstance,
        lie: LieVector,
        cfg: RobustnessConfig,
        tolerance: Optional[float] = None,
    ) -> pd.DataFrame:
        """One row per (sigma, replicate) with both true utilities and the profit."""
        ensure_valid_lie(lie.reported.values, inst.scenario, tolerance)
        estimated = inst.estimated_rivals()
        truth = inst.truth.values
        rows: List[dict] = []

        for s, sigma in enumerate(cfg.sigmas):
            for replicate in range(cfg.replicate_offset, cfg.replicate_offset + cfg.replicates):
                rivals = perturb_profile(estimated, sigma, substream(cfg.seed, s, replicate), inst.scenario)
                world = inst.with_rivals(rivals)
                truthful = allocation_service.solve(world.truthful_profile(), cfg.solver)
                lying = allocation_service.solve(world.profile_with(lie.reported), cfg.solver)
                truthful_utility = bundle_utility(truthful.owner, truth, inst.liar)
                lying_utility = bundle_utility(lying.owner, truth, inst.liar)
                rows.append({
                    "sigma": sigma,
                    "replicate": replicate,
                    "truthful_utility": truthful_utility,
                    "lying_utility": lying_utility,
                    "profit": lying_utility - truthful_utility,
                })
            logger.info(f"[Robustness] sigma={sigma:g}: {cfg.replicates} replicates done")

        return pd.DataFrame(rows, columns=["sigma", "replicate", "truthful_utility", "lying_utility", "profit"])

    def summarize(self, samples: pd.DataFrame) -> RobustnessCurve:
        points = []
        for sigma, group in samples.groupby("sigma", sort=True):
            profit = group["profit"]
            points.append(RobustnessPoint(
                sigma=float(sigma),
                mean_profit=float(profit.mean()),
                mean_truthful_utility=float(group["truthful_utility"].mean()),
                mean_lying_utility=float(group["lying_utility"].mean()),
                profit_std=float(profit.std(ddof=1)) if len(profit) > 1 else 0.0,
                win_rate=float((profit > 0).mean()),
            ))
        return RobustnessCurve(points=points)

    def robustness_experiment(self, inst: ProblemInstance, lie: LieVector, cfg: RobustnessConfig) -> RobustnessCurve:
        logger.info(
            f"[Robustness] {len(cfg.sigmas)} sigmas x {cfg.replicates} replicates, solver {cfg.solver.label()}"
        )
        return self.summarize(self.samples(inst, lie, cfg))


robustness_service = RobustnessService()
