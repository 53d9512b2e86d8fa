import itertools

import numpy as np
import pytest

from fairlie.config import lower_bound, upper_bound
from fairlie.errors import InstanceValidationError, RenormalizationError, ScenarioMismatchError
from fairlie.models import (
    Allocation,
    GAConfig,
    LieVector,
    PreferenceProfile,
    PreferenceVector,
    ProblemInstance,
    Scenario,
    SolverSpec,
    Strategy,
)
from fairlie.services.deception_service import (
    LieGenome,
    apply_strategy,
    best_attainable_utility,
    deception_service,
    optimal_lie_unlimited,
    scaled_truth_ladder,
    select_targets,
)
from fairlie.tools.generator import random_instance
from fairlie.tools.genetic import substream
from fairlie.tools.renormalize import renormalize_limited
from fairlie.tools.welfare import bundle_utility
from tests.helpers import (
    TABLE1_BEST_ATTAINABLE,
    TABLE1_TRUTHFUL_UTILITY,
    TABLE2_LIE,
    TABLE2_LYING_LABELS,
    TABLE2_TRUTHFUL_LABELS,
    uniform_profile,
)

EXACT = SolverSpec.exact()


class TestTargets:
    def test_most_valued_by_self(self, table1):
        targets = select_targets(table1.truth.values, table1.estimated_rivals(), Strategy.from_id(5, 3))
        assert targets == [6, 2, 5]

    def test_most_valued_by_others(self, table1):
        targets = select_targets(table1.truth.values, table1.estimated_rivals(), Strategy.from_id(3, 1))
        assert targets == [0]

    def test_least_valued_by_self(self, table1):
        targets = select_targets(table1.truth.values, table1.estimated_rivals(), Strategy.from_id(10, 3))
        assert targets == [1, 7, 8]

    def test_random_targets_are_seeded(self, table1):
        strategy = Strategy.from_id(1, 3)
        first = select_targets(table1.truth.values, table1.estimated_rivals(), strategy, seed=7)
        second = select_targets(table1.truth.values, table1.estimated_rivals(), strategy, seed=7)
        assert first == second
        assert len(set(first)) == 3

    def test_all_resources(self, table1):
        targets = select_targets(table1.truth.values, table1.estimated_rivals(), Strategy.from_id(11))
        assert targets == list(range(10))

    def test_strategy_table_is_enforced(self):
        with pytest.raises(ValueError):
            Strategy(id=1, direction="increase", target="random")


class TestApplyStrategy:
    def test_full_decrease_hits_floor(self, table1):
        strategy = Strategy.from_id(9, 3)
        lie = apply_strategy(table1.truth, table1.estimated_rivals(), strategy, 100, table1.scenario)
        values = lie.as_array()
        assert np.all(values[[6, 2, 5]] == lower_bound())
        untouched = [j for j in range(10) if j not in (6, 2, 5)]
        assert np.array_equal(values[untouched], table1.truth.as_array()[untouched])

    def test_increase_is_clamped(self, table1):
        lie = apply_strategy(table1.truth, table1.estimated_rivals(), Strategy.from_id(5, 1), 100, table1.scenario)
        assert lie.as_array()[6] == upper_bound()

    @pytest.mark.parametrize("level", [0, 101])
    def test_level_out_of_range(self, table1, level):
        with pytest.raises(ValueError):
            apply_strategy(table1.truth, table1.estimated_rivals(), Strategy.from_id(1), level, table1.scenario)

    def test_level_one_stays_close(self, table1):
        truth = table1.truth.as_array()
        for strategy in Strategy.basic():
            lie = apply_strategy(table1.truth, table1.estimated_rivals(), strategy, 1, table1.scenario)
            assert np.max(np.abs(lie.as_array() - truth)) <= truth.max() * 0.01 + 1e-12

    def test_random_strategy_targets_same_resources_at_every_level(self, table1):
        strategy = Strategy.from_id(2, 3)
        truth = table1.truth.as_array()
        changed = []
        for level in (10, 40, 90):
            lie = apply_strategy(table1.truth, table1.estimated_rivals(), strategy, level, table1.scenario, seed=3)
            changed.append(set(np.flatnonzero(lie.as_array() != truth).tolist()))
        assert changed[0] == changed[1] == changed[2]
        assert len(changed[0]) == 3

    def test_limited_keeps_targets_and_restores_sum(self, table2):
        strategy = Strategy.from_id(9, 3)
        targets = select_targets(table2.truth.values, table2.estimated_rivals(), strategy)
        lie = apply_strategy(table2.truth, table2.estimated_rivals(), strategy, 50, table2.scenario)
        values = lie.as_array()
        assert values.sum() == pytest.approx(100.0, abs=1e-9)
        for j in targets:
            assert values[j] == pytest.approx(table2.truth.values[j] * 0.5)

    def test_limited_decrease_all_is_rebalanced(self, table2):
        lie = apply_strategy(table2.truth, table2.estimated_rivals(), Strategy.from_id(11), 60, table2.scenario)
        assert lie.as_array().sum() == pytest.approx(100.0, abs=1e-9)

    def test_limited_constraint_suite(self):
        rng = np.random.default_rng(0)
        scenario = Scenario.limited(100.0)
        lo, hi = lower_bound(), upper_bound()
        for _ in range(5000):
            truth = PreferenceVector.of(renormalize_limited(rng.uniform(1.0, 99.0, size=10), 100.0))
            others = rng.uniform(1.0, 99.0, size=(3, 10))
            strategy = Strategy.from_id(int(rng.integers(1, 12)), int(rng.integers(1, 6)))
            level = int(rng.integers(1, 101))
            values = apply_strategy(truth, others, strategy, level, scenario, seed=int(rng.integers(0, 1000))).as_array()
            assert abs(values.sum() - 100.0) <= 1e-9
            assert np.all((values >= lo) & (values <= hi))


class TestRenormalize:
    def test_already_normalised_is_unchanged(self):
        values = [25.0, 25.0, 50.0]
        assert renormalize_limited(values, 100.0).tolist() == values

    def test_single_free_coordinate_absorbs_deficit(self):
        result = renormalize_limited([40.0, 50.0], 100.0, fixed=[0])
        assert result[0] == 40.0
        assert result[1] == pytest.approx(60.0)

    def test_proportional_redistribution(self):
        result = renormalize_limited([4.0, 45.0, 45.0], 100.0, fixed=[0])
        assert result.tolist() == pytest.approx([4.0, 48.0, 48.0])

    def test_clamped_coordinates_pass_the_rest_on(self):
        result = renormalize_limited([10.0, 90.0, 1.0], 150.0, fixed=[0])
        assert result.sum() == pytest.approx(150.0, abs=1e-9)
        assert result[1] == upper_bound()

    def test_infeasible(self):
        with pytest.raises(RenormalizationError):
            renormalize_limited([60.0, 60.0], 100.0, fixed=[0, 1])


class TestOptimalLie:
    def test_scale_factor_on_published_instance(self, table1):
        lie = optimal_lie_unlimited(table1.truth, table1.estimated_rivals())
        c = 0.5 * 3.06 / 506.45
        assert lie.as_array() == pytest.approx(c * table1.truth.as_array())
        assert lie.as_array().sum() == pytest.approx(1.53)

    def test_preserves_ranking(self, table1):
        lie = optimal_lie_unlimited(table1.truth, table1.estimated_rivals())
        order = np.argsort(table1.truth.as_array(), kind="stable")
        assert np.array_equal(np.argsort(lie.as_array(), kind="stable"), order)

    def test_limited_scenario_rejected(self, table2):
        with pytest.raises(ScenarioMismatchError):
            optimal_lie_unlimited(table2.truth, table2.estimated_rivals(), table2.scenario)

    def test_liar_keeps_all_but_its_least_valued_resources(self, table1):
        lie = optimal_lie_unlimited(table1.truth, table1.estimated_rivals())
        evaluation = deception_service.evaluate_lie(table1, lie, EXACT)
        assert set(evaluation.lying_allocation.bundle(0)) == {0, 2, 3, 4, 5, 6, 9}
        assert evaluation.lying_utility == pytest.approx(TABLE1_BEST_ATTAINABLE, abs=1e-9)
        assert best_attainable_utility(table1.truth, 4) == pytest.approx(TABLE1_BEST_ATTAINABLE, abs=1e-9)

    def test_matches_brute_force_over_positive_allocations(self):
        rng = np.random.default_rng(100)
        for _ in range(100):
            inst = ProblemInstance.create(uniform_profile(rng, 3, 6))
            lie = optimal_lie_unlimited(inst.truth, inst.estimated_rivals())
            realised = deception_service.evaluate_lie(inst, lie, EXACT).lying_utility
            truth = inst.truth.values
            best = max(
                bundle_utility(owner, truth, 0)
                for owner in itertools.product(range(3), repeat=6)
                if 1 in owner and 2 in owner
            )
            assert realised == best


class TestProfit:
    def test_truth_is_neutral(self, table1):
        assert deception_service.lie_profit(table1, LieVector(reported=table1.truth), EXACT) == 0.0

    def test_published_limited_distributions(self, table2):
        profit = deception_service.allocation_profit(
            table2,
            Allocation.from_labels(TABLE2_TRUTHFUL_LABELS),
            Allocation.from_labels(TABLE2_LYING_LABELS),
        )
        assert profit == pytest.approx(14.57, abs=1e-9)

    def test_lie_sum_tolerance_is_configurable(self, small_limited):
        lie = LieVector.of([20.0, 20.0, 20.0, 20.0, 19.96])
        with pytest.raises(InstanceValidationError):
            deception_service.evaluate_lie(small_limited, lie, EXACT)
        evaluation = deception_service.evaluate_lie(small_limited, lie, EXACT, tolerance=0.06)
        assert evaluation.truthful_welfare.value > 0

    def test_invalid_lie_rejected(self, small_unlimited):
        with pytest.raises(InstanceValidationError):
            deception_service.lie_profit(small_unlimited, LieVector.of([0.0, 1.0, 1.0, 1.0, 1.0]), EXACT)

    def test_evaluation_reports_both_solves(self, small_unlimited):
        evaluation = deception_service.evaluate_lie(small_unlimited, LieVector(reported=small_unlimited.truth), EXACT)
        assert evaluation.truthful_allocation == evaluation.lying_allocation
        assert evaluation.truthful_welfare == evaluation.lying_welfare
        assert evaluation.profit == 0.0


class TestStrategySweep:
    def test_shape_and_truth_baseline(self, small_unlimited):
        result = deception_service.strategy_sweep(small_unlimited, EXACT, levels=5, seed=1)
        frame = result.to_frame()
        assert list(frame.columns) == ["strategy", "level", "profit", "lying_utility"]
        assert len(frame) == 10 * 5
        assert result.profit(4, 0) == 0.0
        for point in result.points:
            assert point.profit == pytest.approx(point.lying_utility - result.truthful_utility)

    def test_profit_matches_single_evaluation(self, small_unlimited):
        strategy = Strategy.from_id(7, 2)
        result = deception_service.strategy_sweep(small_unlimited, EXACT, levels=3, strategies=[strategy])
        lie = apply_strategy(
            small_unlimited.truth, small_unlimited.estimated_rivals(), strategy, 3, small_unlimited.scenario
        )
        assert result.profit(7, 3) == deception_service.lie_profit(small_unlimited, lie, EXACT)

    def test_limited_sweep_lies_are_valid(self, small_limited):
        result = deception_service.strategy_sweep(
            small_limited, EXACT, levels=4, strategies=[Strategy.from_id(i, 2) for i in (3, 8, 11)]
        )
        assert len(result.points) == 12

    def test_unknown_point(self, small_unlimited):
        result = deception_service.strategy_sweep(small_unlimited, EXACT, levels=2, strategies=[Strategy.from_id(1)])
        with pytest.raises(KeyError):
            result.profit(2, 1)


class TestUlga:
    def test_never_worse_than_truth_and_bounded_by_attainable(self, small_unlimited):
        cfg = GAConfig(population_size=12, generations=8, seed=5, mutation_scale=5.0)
        result = deception_service.optimal_lie_ulga(small_unlimited, cfg, EXACT)
        assert result.profit >= 0.0
        assert result.lying_utility <= best_attainable_utility(small_unlimited.truth, 3) + 1e-9
        assert len(result.history) == 9

    def test_deterministic(self, small_unlimited):
        cfg = GAConfig(population_size=8, generations=4, seed=2)
        first = deception_service.optimal_lie_ulga(small_unlimited, cfg, EXACT)
        second = deception_service.optimal_lie_ulga(small_unlimited, cfg, EXACT)
        assert first == second

    def test_zero_generations(self, small_unlimited):
        cfg = GAConfig(population_size=6, generations=0, seed=0)
        result = deception_service.optimal_lie_ulga(small_unlimited, cfg, EXACT)
        assert np.isfinite(result.profit)

    def test_limited_lies_respect_constraints(self, small_limited):
        cfg = GAConfig(population_size=8, generations=5, seed=9)
        result = deception_service.optimal_lie_ulga(small_limited, cfg, EXACT)
        values = result.lie.as_array()
        assert values.sum() == pytest.approx(100.0, abs=1e-9)
        assert np.all((values >= lower_bound()) & (values <= upper_bound()))

    def test_llga_inner_solver(self):
        inst = random_instance(3, 6, Scenario.unlimited(), seed=4)
        inner = SolverSpec.with_llga(GAConfig(population_size=10, generations=5, seed=0))
        result = deception_service.optimal_lie_ulga(inst, GAConfig(population_size=6, generations=2, seed=1), inner)
        assert result.profit >= 0.0

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_reaches_closed_form_profit(self, seed):
        inst = random_instance(3, 6, Scenario.unlimited(), seed=seed)
        closed_form = optimal_lie_unlimited(inst.truth, inst.estimated_rivals())
        target = deception_service.lie_profit(inst, closed_form, EXACT)
        result = deception_service.optimal_lie_ulga(inst, GAConfig(population_size=12, generations=5, seed=0), EXACT)
        assert result.profit >= target - 0.01 * abs(target)

    @pytest.mark.slow
    def test_reaches_closed_form_profit_with_desk_preset(self):
        for seed in range(1, 6):
            inst = random_instance(3, 6, Scenario.unlimited(), seed=seed)
            closed_form = optimal_lie_unlimited(inst.truth, inst.estimated_rivals())
            target = deception_service.lie_profit(inst, closed_form, EXACT)
            result = deception_service.optimal_lie_ulga(inst, GAConfig.desk_ulga(seed=0), EXACT)
            assert result.profit >= target - 0.01 * abs(target)

    def test_limited_search_finds_profitable_lie(self):
        # Truthfully the liar gets resource 1 (40); any report below 30 on it wins resource 0 (60).
        profile = PreferenceProfile.from_matrix([[60.0, 40.0], [70.0, 30.0]], Scenario.limited(100.0))
        inst = ProblemInstance.create(profile)
        result = deception_service.optimal_lie_ulga(inst, GAConfig(population_size=50, generations=20, seed=0), EXACT)
        assert result.truthful_utility == 40.0
        assert result.profit == pytest.approx(20.0)
        assert result.lie.as_array()[1] < 30.0

    def test_lenient_truth_is_its_own_baseline(self, table2):
        result = deception_service.optimal_lie_ulga(table2, GAConfig(population_size=3, generations=0, seed=0), EXACT)
        assert result.history[0] >= result.truthful_utility
        assert result.profit >= 0.0


class TestLieGenome:
    def test_unlimited_draws_span_magnitudes(self):
        genome = LieGenome(Scenario.unlimited(), 6, scale=5.0, log_step=0.5)
        draws = np.concatenate([genome.random(substream(0, 0, k)) for k in range(50)])
        assert draws.min() < 1e-3
        assert draws.max() > 10.0
        assert np.all((draws >= lower_bound()) & (draws <= upper_bound()))

    def test_unlimited_mutation_is_multiplicative(self):
        genome = LieGenome(Scenario.unlimited(), 6, scale=5.0, log_step=0.5)
        x = np.full(6, 1e-3)
        mutated = genome.mutate(x, substream(1, 0, 0), rate=1.0)
        assert np.all(mutated < 1.0)
        assert np.all(mutated >= lower_bound())

    def test_limited_draws_sum_to_r(self):
        genome = LieGenome(Scenario.limited(100.0), 6, scale=5.0, log_step=0.5)
        for k in range(20):
            x = genome.mutate(genome.random(substream(2, 0, k)), substream(2, 1, k), rate=0.5)
            assert x.sum() == pytest.approx(100.0, abs=1e-9)

    def test_ladder_ends_at_closed_form(self, table1):
        rivals = table1.estimated_rivals()
        ladder = scaled_truth_ladder(table1.truth, rivals, 8)
        assert len(ladder) == 8
        assert np.array_equal(ladder[-1], optimal_lie_unlimited(table1.truth, rivals).as_array())
        totals = [float(x.sum()) for x in ladder]
        assert all(b < a for a, b in zip(totals, totals[1:]))
        assert totals[0] < sum(table1.truth.values)

    def test_empty_ladder(self, table1):
        assert scaled_truth_ladder(table1.truth, table1.estimated_rivals(), 0) == []


class TestPublishedSweeps:
    def test_decreasing_everything_pays_off_unlimited(self, table1):
        # Every value hits the floor, so ties go to the first seven resources.
        lie = apply_strategy(table1.truth, table1.estimated_rivals(), Strategy.from_id(11), 100, table1.scenario)
        expected = sum(table1.truth.values[:7]) - TABLE1_TRUTHFUL_UTILITY
        assert deception_service.lie_profit(table1, lie, EXACT) == pytest.approx(expected, abs=1e-6)
        assert expected > 0.0

    @pytest.mark.slow
    def test_random_decrease_of_three_resources_loses_unlimited(self, table1):
        strategy = Strategy.from_id(1)
        assert select_targets(table1.truth.values, table1.estimated_rivals(), strategy, seed=0) == [3, 5, 6]
        lie = apply_strategy(table1.truth, table1.estimated_rivals(), strategy, 100, table1.scenario, seed=0)
        assert deception_service.lie_profit(table1, lie, EXACT) == pytest.approx(-26.62, abs=0.01)

    @pytest.mark.slow
    @pytest.mark.parametrize("strategy_id", [2, 3, 4, 5, 6])
    def test_increasing_never_pays_off_unlimited(self, table1, strategy_id):
        strategy = Strategy.from_id(strategy_id)
        lie = apply_strategy(table1.truth, table1.estimated_rivals(), strategy, 100, table1.scenario, seed=0)
        assert deception_service.lie_profit(table1, lie, EXACT) <= 1e-9

    @pytest.mark.slow
    def test_limited_sweep_means(self, table2):
        result = deception_service.strategy_sweep(table2, EXACT, levels=100, seed=0)
        # Two increasing strategies keep a small positive mean on the published data.
        assert result.mean_profit(2) == pytest.approx(1.431, abs=1e-3)
        assert result.mean_profit(6) == pytest.approx(1.117, abs=1e-3)
        for strategy in Strategy.basic():
            if strategy.id not in (2, 6):
                assert result.mean_profit(strategy.id) <= 1e-9
