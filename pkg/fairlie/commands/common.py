import argparse
import re
from typing import List

from fairlie.config import settings
from fairlie.models import GAConfig, SolverKind, SolverSpec
from fairlie.tools.instance_format import load_instance


def add_instance_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--instance", required=True, help="instance file")
    parser.add_argument(
        "--lenient",
        action="store_true",
        help=f"accept limited-mode rows within {settings.PUBLISHED_TOLERANCE:g} of r (published tables)",
    )


def add_solver_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--solver", choices=[k.value for k in SolverKind], default=SolverKind.EXACT.value)
    parser.add_argument("--budget", type=int, default=settings.EXACT_BUDGET, help="exact enumeration budget")
    parser.add_argument("--llga-population", type=int, default=50)
    parser.add_argument("--llga-generations", type=int, default=50)
    parser.add_argument("--llga-seed", type=int, default=0)


def add_ulga_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--ulga-population", type=int, default=50)
    parser.add_argument("--ulga-generations", type=int, default=300)
    parser.add_argument("--ulga-seed", type=int, default=0)
    parser.add_argument("--mutation-scale", type=float, default=5.0, help="Gaussian step, limited scenario")
    parser.add_argument("--log-step", type=float, default=0.5, help="log-space step, unlimited scenario")


def add_output_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default=None, help="report path (default: REPORT_DIR/<command>-seed<seed>.csv)")


def instance_from_args(args: argparse.Namespace):
    return load_instance(args.instance, lenient=args.lenient)


def solver_from_args(args: argparse.Namespace) -> SolverSpec:
    if args.solver == SolverKind.EXACT.value:
        return SolverSpec.exact(budget=args.budget)
    return SolverSpec.with_llga(GAConfig(
        population_size=args.llga_population,
        generations=args.llga_generations,
        seed=args.llga_seed,
    ))


def ulga_from_args(args: argparse.Namespace) -> GAConfig:
    return GAConfig(
        population_size=args.ulga_population,
        generations=args.ulga_generations,
        seed=args.ulga_seed,
        mutation_scale=args.mutation_scale,
        log_step=args.log_step,
    )


def parse_vector(text: str) -> List[float]:
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: '{text}'")


def parse_labels(text: str) -> List[int]:
    tokens = [t for t in re.split(r"[,\s]+", text.strip()) if t]
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of 1-based agent labels: '{text}'")


def parse_sigmas(text: str) -> List[float]:
    """'0:99:33' (inclusive range) or '0,8,16'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"sigma range must be start:stop:step, got '{text}'")
        try:
            start, stop, step = (float(p) for p in parts)
        except ValueError:
            raise argparse.ArgumentTypeError(f"sigma range must be numeric, got '{text}'")
        if step <= 0:
            raise argparse.ArgumentTypeError("sigma step must be positive")
        count = int((stop - start) / step + 1e-9) + 1
        return [start + k * step for k in range(count)]
    return parse_vector(text)
