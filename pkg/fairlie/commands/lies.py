import argparse
import logging
from typing import Optional, Tuple

import pandas as pd

from fairlie.commands.common import (
    add_instance_args,
    add_output_args,
    add_solver_args,
    add_ulga_args,
    instance_from_args,
    parse_labels,
    parse_vector,
    solver_from_args,
    ulga_from_args,
)
from fairlie.config import settings
from fairlie.models import Allocation, ExperimentReport, LieVector, ProblemInstance, Strategy
from fairlie.services.deception_service import (
    best_attainable_utility,
    deception_service,
    optimal_lie_unlimited,
)
from fairlie.services.plot_service import plot_service
from fairlie.services.report_service import report_service
from fairlie.tools.instance_format import save_instance

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    evaluate = subparsers.add_parser("lie-eval", help="profit of one reported lie")
    add_instance_args(evaluate)
    add_solver_args(evaluate)
    add_output_args(evaluate)
    evaluate.add_argument("--lie", type=parse_vector, default=None,
                          help="reported values (default: the liar's agent row of the instance)")
    evaluate.add_argument("--truth-allocation", type=parse_labels, default=None,
                          help="1-based owners of a given truthful allocation, for comparison")
    evaluate.add_argument("--lie-allocation", type=parse_labels, default=None,
                          help="1-based owners of a given lying allocation, for comparison")
    evaluate.set_defaults(handler=run_lie_eval)

    sweep = subparsers.add_parser("strategy-sweep", help="profit of the predefined strategies per lying level")
    add_instance_args(sweep)
    add_solver_args(sweep)
    add_output_args(sweep)
    sweep.add_argument("--levels", type=int, default=settings.LEVELS, choices=range(1, 101), metavar="1..100")
    sweep.add_argument("--top-k", type=int, default=settings.TOP_K)
    sweep.add_argument("--strategies", type=parse_labels, default=None, help="strategy ids (default 1..10)")
    sweep.add_argument("--include-all-decrease", action="store_true", help="also run strategy 11")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--plot", default=None, help="also write a PNG of profit per level")
    sweep.set_defaults(handler=run_sweep)

    best = subparsers.add_parser("best-lie", help="most profitable lie (closed form or bilevel search)")
    best.add_argument("variant", choices=["prop2", "ulga"])
    add_instance_args(best)
    add_solver_args(best)
    add_ulga_args(best)
    add_output_args(best)
    best.add_argument("--save-instance", default=None, help="write the instance with the lie as the liar's row")
    best.set_defaults(handler=run_best_lie)


def _allocation_text(alloc: Allocation) -> str:
    return " ".join(str(a) for a in alloc.labels())


def run_lie_eval(args: argparse.Namespace) -> ExperimentReport:
    inst = instance_from_args(args)
    solver = solver_from_args(args)
    lie = LieVector.of(args.lie) if args.lie is not None else LieVector(reported=inst.reported)

    tolerance = settings.PUBLISHED_TOLERANCE if args.lenient else None
    evaluation = deception_service.evaluate_lie(inst, lie, solver, tolerance)
    row = {
        "truthful_utility": evaluation.truthful_utility,
        "lying_utility": evaluation.lying_utility,
        "profit": evaluation.profit,
        "truthful_welfare": evaluation.truthful_welfare.value,
        "lying_welfare": evaluation.lying_welfare.value,
        "truthful_allocation": _allocation_text(evaluation.truthful_allocation),
        "lying_allocation": _allocation_text(evaluation.lying_allocation),
    }
    if args.truth_allocation is not None or args.lie_allocation is not None:
        given_truthful = Allocation.from_labels(args.truth_allocation) if args.truth_allocation else evaluation.truthful_allocation
        given_lying = Allocation.from_labels(args.lie_allocation) if args.lie_allocation else evaluation.lying_allocation
        row["given_profit"] = deception_service.allocation_profit(inst, given_truthful, given_lying)

    logger.info(f"[CLI] Profit {evaluation.profit:.6g}")
    return report_service.build(
        command="lie-eval",
        data=pd.DataFrame([row]),
        config={"instance": args.instance, "lie": list(lie.reported.values)},
        solver=solver.label(),
    )


def run_sweep(args: argparse.Namespace) -> ExperimentReport:
    inst = instance_from_args(args)
    solver = solver_from_args(args)
    ids = args.strategies or list(range(1, 11))
    if args.include_all_decrease and 11 not in ids:
        ids = ids + [11]
    strategies = [Strategy.from_id(i, args.top_k) for i in ids]

    result = deception_service.strategy_sweep(inst, solver, levels=args.levels, strategies=strategies, seed=args.seed)
    if args.plot:
        plot_service.sweep(result.to_frame(), args.plot, title=args.instance)
    return report_service.build(
        command="strategy-sweep",
        data=result.to_frame(),
        config={
            "instance": args.instance,
            "levels": args.levels,
            "top_k": args.top_k,
            "strategies": ids,
            "truthful_utility": result.truthful_utility,
        },
        seed=args.seed,
        solver=solver.label(),
    )


def find_best_lie(inst: ProblemInstance, args: argparse.Namespace) -> Tuple[LieVector, Optional[dict]]:
    if args.variant == "prop2":
        return optimal_lie_unlimited(inst.truth, inst.estimated_rivals(), inst.scenario), None
    ulga = ulga_from_args(args)
    result = deception_service.optimal_lie_ulga(inst, ulga, solver_from_args(args))
    return result.lie, {"ulga": ulga.model_dump(), "history_tail": result.history[-1:]}


def run_best_lie(args: argparse.Namespace) -> ExperimentReport:
    inst = instance_from_args(args)
    solver = solver_from_args(args)
    lie, extra = find_best_lie(inst, args)
    evaluation = deception_service.evaluate_lie(inst, lie, solver)

    if args.save_instance:
        lied = ProblemInstance(profile=inst.profile_with(lie.reported), liar=inst.liar, truth=inst.truth)
        save_instance(lied, args.save_instance)

    m = inst.profile.n_resources
    data = pd.DataFrame({
        "resource": list(range(1, m + 1)),
        "truth": list(inst.truth.values),
        "lie": list(lie.reported.values),
        "truthful_owner": evaluation.truthful_allocation.labels(),
        "lying_owner": evaluation.lying_allocation.labels(),
        "profit": [evaluation.profit] * m,
    })
    logger.info(
        f"[CLI] {args.variant} lie: utility {evaluation.lying_utility:.6g} "
        f"(limit {best_attainable_utility(inst.truth, inst.profile.n_agents):.6g}), profit {evaluation.profit:.6g}"
    )
    return report_service.build(
        command="best-lie",
        data=data,
        config={"instance": args.instance, "variant": args.variant, **(extra or {})},
        seed=args.ulga_seed if args.variant == "ulga" else None,
        solver=solver.label(),
    )
