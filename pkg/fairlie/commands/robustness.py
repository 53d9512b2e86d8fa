import argparse
import logging

from fairlie.commands.common import (
    add_instance_args,
    add_output_args,
    add_solver_args,
    add_ulga_args,
    instance_from_args,
    parse_sigmas,
    parse_vector,
    solver_from_args,
    ulga_from_args,
)
from fairlie.config import settings
from fairlie.errors import ParameterError
from fairlie.models import ExperimentReport, LieVector, ProblemInstance, RobustnessConfig
from fairlie.services.deception_service import deception_service, optimal_lie_unlimited
from fairlie.services.plot_service import plot_service
from fairlie.services.report_service import report_service
from fairlie.services.robustness_service import SAMPLER, robustness_service

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("robustness", help="profit of a fixed lie under noisy rival preferences")
    add_instance_args(parser)
    add_solver_args(parser)
    add_ulga_args(parser)
    add_output_args(parser)
    parser.add_argument("--lie", default="prop2",
                        help="prop2 | ulga | reported | comma-separated values")
    parser.add_argument("--sigmas", type=parse_sigmas, required=True, help="start:stop:step or a comma list")
    parser.add_argument("--replicates", type=int, default=1000)
    parser.add_argument("--replicate-offset", type=int, default=0)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--samples", action="store_true", help="report every replicate instead of the curve")
    parser.add_argument("--plot", default=None, help="also write a PNG of mean utility per sigma")
    parser.set_defaults(handler=run)


def resolve_lie(inst: ProblemInstance, args: argparse.Namespace) -> LieVector:
    if args.lie == "prop2":
        return optimal_lie_unlimited(inst.truth, inst.estimated_rivals(), inst.scenario)
    if args.lie == "ulga":
        return deception_service.optimal_lie_ulga(inst, ulga_from_args(args), solver_from_args(args)).lie
    if args.lie == "reported":
        return LieVector(reported=inst.reported)
    try:
        return LieVector.of(parse_vector(args.lie))
    except argparse.ArgumentTypeError as e:
        raise ParameterError(str(e))


def run(args: argparse.Namespace) -> ExperimentReport:
    inst = instance_from_args(args)
    solver = solver_from_args(args)
    lie = resolve_lie(inst, args)
    cfg = RobustnessConfig(
        sigmas=args.sigmas,
        replicates=args.replicates,
        seed=args.seed,
        solver=solver,
        replicate_offset=args.replicate_offset,
    )

    tolerance = settings.PUBLISHED_TOLERANCE if args.lenient else None
    samples = robustness_service.samples(inst, lie, cfg, tolerance)
    curve = robustness_service.summarize(samples).to_frame()
    if args.plot:
        plot_service.robustness(curve, args.plot, title=args.instance)
    data = samples if args.samples else curve
    return report_service.build(
        command="robustness",
        data=data,
        config={
            "instance": args.instance,
            "lie": args.lie,
            "lie_values": list(lie.reported.values),
            "sigmas": cfg.sigmas,
            "replicates": cfg.replicates,
            "replicate_offset": cfg.replicate_offset,
        },
        seed=args.seed,
        solver=solver.label(),
        sampler=SAMPLER,
    )
