"""
Command line entry point.

    scatternet <experiment-id> [<experiment-id> ...] [--seed N] [--out DIR] [--param key=value ...] [--parallel]
    scatternet verify --seed N

Exit code 0 when every experiment passed (or only emitted artifacts) and every
verification check passed.
"""

from multiprocessing import Pool
import argparse
import logging
import sys

from scatternet.core.configuration import ScatternetConfiguration
from scatternet.core.exceptions import ScatternetError
from scatternet.core.helpers import parse_param_pairs
from scatternet.harness.experiments import EXPERIMENTS, ExperimentRunner
from scatternet.harness.verify import run_verify_all
from scatternet.types import ExperimentResult, ExperimentStatus

logger = logging.getLogger("scatternet")

VERIFY_COMMAND = "verify"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scatternet",
        description="Wave-scattering neurons, CNN and RBM experiments with verifiable artifacts",
    )
    parser.add_argument(
        "experiments",
        nargs="+",
        metavar="experiment-id",
        help=f"one or more of: {', '.join(EXPERIMENTS)}; or '{VERIFY_COMMAND}'",
    )
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output root (default: $SCATTERNET_OUT or ./scatternet-out)")
    parser.add_argument(
        "--param",
        action="append",
        default=[],
        metavar="key=value",
        help="experiment parameter; repeat for several (lists are comma separated)",
    )
    parser.add_argument("--parallel", action="store_true", help="run experiments in separate processes")
    parser.add_argument(
        "--log-level",
        choices=["ERROR", "ALL", "NONE"],
        default="ERROR",
        help="how much of each experiment summary is logged",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def _run_experiment(job: tuple[str, dict, ScatternetConfiguration]) -> ExperimentResult:
    experiment_id, params, configuration = job
    return ExperimentRunner(configuration).run(experiment_id, params)


def run_experiments(
    experiment_ids: list[str], params: dict, configuration: ScatternetConfiguration
) -> list[ExperimentResult]:
    jobs = [(experiment_id, params, configuration) for experiment_id in experiment_ids]
    if configuration.parallel and len(jobs) > 1:
        with Pool(len(jobs)) as pool:
            return pool.map(_run_experiment, jobs)
    return [_run_experiment(job) for job in jobs]


def _succeeded(result: ExperimentResult) -> bool:
    return result["status"] in (ExperimentStatus.PASSED, ExperimentStatus.EMITTED)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    configuration = ScatternetConfiguration(
        output_root=args.out,
        seed=args.seed,
        parallel=args.parallel,
        log_run_level=args.log_level,
        # the root "scatternet" logger pickles by name, so it survives process pools
        logger=logger,
    )

    if VERIFY_COMMAND in args.experiments and len(args.experiments) > 1:
        logger.error(f"'{VERIFY_COMMAND}' cannot be combined with experiment ids; run it on its own")
        return 2

    try:
        if args.experiments == [VERIFY_COMMAND]:
            report = run_verify_all(args.seed, configuration)
            sys.stdout.write(report.text())
            return 0 if report.passed else 1

        unknown = [e for e in args.experiments if e not in EXPERIMENTS]
        if unknown:
            logger.error(f"Unknown experiment id(s): {', '.join(unknown)}")
            return 2
        params = parse_param_pairs(args.param)
        results = run_experiments(args.experiments, params, configuration)
    except ScatternetError as e:
        logger.error(str(e))
        return 1

    for result in results:
        sys.stdout.write(f"{result['experiment_id']} {result['status']} {result['output_dir']}\n")
        for check in result["checks"]:
            sys.stdout.write(
                f"  {check['check_id']} {check['status']} "
                f"{check['measured']:.17g} {check['tolerance']:.17g}\n"
            )
    return 0 if all(_succeeded(result) for result in results) else 1
