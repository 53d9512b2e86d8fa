import argparse
import logging

import pandas as pd

from fairlie.commands.common import (
    add_instance_args,
    add_output_args,
    add_solver_args,
    instance_from_args,
    solver_from_args,
)
from fairlie.models import ExperimentReport, SolverKind
from fairlie.services.allocation_service import solve_llga
from fairlie.services.report_service import report_service
from fairlie.tools.exact_solver import solve_exact
from fairlie.tools.welfare import agent_utilities

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("solve", help="egalitarian allocation of the reported profile")
    add_instance_args(parser)
    add_solver_args(parser)
    add_output_args(parser)
    parser.add_argument("--count-optimal", action="store_true", help="count optimal allocations (exact only)")
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> ExperimentReport:
    inst = instance_from_args(args)
    solver = solver_from_args(args)
    profile = inst.profile

    extra = {}
    if solver.kind == SolverKind.EXACT:
        solution = solve_exact(profile, budget=solver.budget, count_optimal=args.count_optimal)
        best, welfare = solution.best, solution.welfare
        if solution.optimal_set_size is not None:
            extra["optimal_set_size"] = solution.optimal_set_size
    else:
        run_ = solve_llga(profile, solver.llga)
        best, welfare = run_.best, run_.welfare

    logger.info(f"[CLI] Welfare {welfare.value:.6g}, allocation {best.labels()}")
    utilities = agent_utilities(best, profile)
    data = pd.DataFrame({
        "agent": list(range(1, profile.n_agents + 1)),
        "resources": [" ".join(str(j + 1) for j in best.bundle(i)) for i in range(profile.n_agents)],
        "utility": utilities,
        "welfare": [welfare.value] * profile.n_agents,
    })
    return report_service.build(
        command="solve",
        data=data,
        config={"instance": args.instance, "allocation": best.labels(), **extra},
        solver=solver.label(),
    )
