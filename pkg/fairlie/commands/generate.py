import argparse
import logging

import pandas as pd

from fairlie.commands.common import add_output_args
from fairlie.config import settings
from fairlie.models import ExperimentReport, ScenarioMode, Scenario
from fairlie.services.report_service import report_service
from fairlie.tools.generator import DISTRIBUTION, random_instance
from fairlie.tools.instance_format import save_instance

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("gen", help="random instance generator")
    parser.add_argument("--agents", type=int, required=True)
    parser.add_argument("--resources", type=int, required=True)
    parser.add_argument("--mode", choices=[m.value for m in ScenarioMode], default=ScenarioMode.UNLIMITED.value)
    parser.add_argument("--r", type=float, default=settings.DEFAULT_R)
    parser.add_argument("--liar", type=int, default=1, help="1-based liar index")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--instance-out", required=True, help="instance file to write")
    add_output_args(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace) -> ExperimentReport:
    scenario = Scenario.limited(args.r) if args.mode == ScenarioMode.LIMITED.value else Scenario.unlimited()
    inst = random_instance(args.agents, args.resources, scenario, args.seed, liar=args.liar - 1)
    save_instance(inst, args.instance_out)

    matrix = inst.profile.matrix()
    data = pd.DataFrame(matrix, columns=[f"r{j + 1}" for j in range(matrix.shape[1])])
    data.insert(0, "agent", list(range(1, matrix.shape[0] + 1)))
    return report_service.build(
        command="gen",
        data=data,
        config={
            "agents": args.agents,
            "resources": args.resources,
            "scenario": scenario.label(),
            "liar": args.liar,
            "distribution": DISTRIBUTION,
            "instance_out": args.instance_out,
        },
        seed=args.seed,
    )
