"""Command-line entry point: masks, regularity, limit functions, ψ statistics and experiments.

Exit codes: 0 success, 2 invalid input or usage, 3 numerical failure
(singular fit, division remainder, degenerate eigenspace).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from app import __version__
from app.experiment_service import DEFAULT_LIMIT_K, DenoiseExperiment
from app.schemas import ExperimentManifest, NoiseModel, SchemeSpec
from app.settings import configure_logging, get_settings
from core.analysis import regularity_table
from core.errors import NumericalError
from core.noise import conjecture_probe, psi, psi_stats
from core.result_exporter import ResultExporter, read_manifest
from core.schemes import mask
from core.subdivide import basic_limit_function
from domain.signal_catalog import CATALOG

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

EPILOG = "exit codes: 0 success, 2 invalid input or usage, 3 numerical failure"


class RunContext:
    """Parsed arguments plus the output directory and the effective seed of one command."""

    def __init__(self, args: argparse.Namespace, argv: Sequence[str]) -> None:
        settings = get_settings()
        self.args = args
        self.out = Path(args.out) if args.out else settings.output_dir / args.command
        self.exporter = ResultExporter(self.out)
        self.recorded_argv = _strip_option(argv, "--out")
        self.seed: Optional[int] = getattr(args, "seed", None)
        if self.seed is not None and settings.seed_override is not None:
            self.seed = settings.seed_override
            self.recorded_argv = _strip_option(self.recorded_argv, "--seed") + ["--seed", str(self.seed)]
        self.grid: Dict[str, float] = {}
        self.default_K = settings.default_K
        self.iterations = settings.regularity_iterations

    def spec(self) -> SchemeSpec:
        return SchemeSpec(family=self.args.family, n=self.args.n, degree=self.args.degree)

    def finish(self) -> None:
        parameters = {
            k: v for k, v in sorted(vars(self.args).items()) if k not in {"out", "handler", "command"}
        }
        self.exporter.write_manifest(
            ExperimentManifest(
                command=self.args.command,
                argv=self.recorded_argv,
                parameters=parameters,
                seed=self.seed,
                grid=self.grid,
                version=__version__,
            )
        )


def _strip_option(argv: Sequence[str], option: str) -> List[str]:
    kept: List[str] = []
    skip = False
    for token in argv:
        if skip:
            skip = False
        elif token == option:
            skip = True
        elif not token.startswith(option + "="):
            kept.append(token)
    return kept


def cmd_mask(ctx: RunContext) -> None:
    m = mask(ctx.spec())
    print(m.to_fraction_string())
    ctx.exporter.write_json("mask.json", m.to_record().model_dump(mode="json", exclude_none=True))


def cmd_regularity(ctx: RunContext) -> None:
    args = ctx.args
    L = args.L if args.L is not None else ctx.iterations
    reports = regularity_table(args.family, args.n, args.degree, L)
    ctx.exporter.write_csv(
        "regularity.csv",
        ["family", "n", "degree", "m", "L", "iterated_norm", "lower_bound"],
        ([r.family, r.n, r.degree, r.m, r.L, r.iterated_norm, r.lower_bound] for r in reports),
    )
    for r in reports:
        print(f"{r.n}\t{r.lower_bound:.3f}")


def cmd_blf(ctx: RunContext) -> None:
    K = ctx.args.K if ctx.args.K is not None else ctx.default_K
    samples = basic_limit_function(ctx.spec(), K)
    ctx.grid = {"step": samples.step, "start": float(samples.abscissae[0]), "stop": float(samples.abscissae[-1])}
    ctx.exporter.write_columns("blf.csv", {"x": samples.abscissae, "value": samples.values})


def cmd_psi(ctx: RunContext) -> None:
    K = ctx.args.K if ctx.args.K is not None else ctx.default_K
    samples = psi(ctx.spec(), K)
    ctx.grid = {"step": samples.step, "start": 0.0, "stop": 1.0}
    ctx.exporter.write_columns("psi.csv", {"x": samples.abscissae, "value": samples.values})


def cmd_psistats(ctx: RunContext) -> None:
    K = ctx.args.K if ctx.args.K is not None else ctx.default_K
    stats = psi_stats(ctx.spec(), K)
    ctx.grid = {"step": stats.grid_step, "start": 0.0, "stop": 1.0}
    ctx.exporter.write_csv(
        "psistats.csv",
        ["degree", "n", "min", "max", "integral"],
        [[stats.degree, stats.n, stats.min, stats.max, stats.integral]],
    )
    print(f"{stats.min:.4f} {stats.max:.4f} {stats.integral:.4f}")


def cmd_denoise(ctx: RunContext) -> None:
    args = ctx.args
    experiment = DenoiseExperiment()
    result = experiment.run(
        args.function,
        ctx.spec(),
        NoiseModel(sigma=args.sigma, seed=ctx.seed),
        K=args.K,
        llr=args.llr,
        candidates=args.bandwidths,
    )
    ctx.grid = {"start": float(experiment.grid_start), "stop": float(experiment.grid_stop), "step": 2.0 ** -args.K}
    experiment.export(result, ctx.exporter)
    print(result.errors.model_dump_json())


def cmd_conjectures(ctx: RunContext) -> None:
    args = ctx.args
    K = args.K if args.K is not None else ctx.default_K
    report = conjecture_probe(args.degrees, args.ns, K)
    ctx.exporter.write_csv(
        "conjectures.csv",
        ["degree", "n", "min", "max", "integral"],
        ([r.degree, r.n, r.min, r.max, r.integral] for r in report.rows),
    )
    ctx.exporter.write_json(
        "conjectures.json",
        {"K": report.K, "max_decreasing_in_n": report.max_decreasing_in_n, "integral_increasing_in_d": report.integral_increasing_in_d},
    )


def _add_spec_arguments(parser: argparse.ArgumentParser, many_n: bool = False) -> None:
    parser.add_argument("--family", required=True, help="primal-even, dual-even, primal-odd or dual-odd")
    if many_n:
        parser.add_argument("--n", type=int, nargs="+", required=True)
    else:
        parser.add_argument("--n", type=int, required=True)
    parser.add_argument("--degree", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsqsubdiv", description=__doc__.splitlines()[0], epilog=EPILOG)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[RunContext], None], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, epilog=EPILOG)
        p.add_argument("--out", help="output directory (default: $LSQSUBDIV_OUTPUT_DIR/<command>)")
        p.set_defaults(handler=handler)
        return p

    p = command("mask", cmd_mask, "print the exact refinement mask")
    _add_spec_arguments(p)

    p = command("regularity", cmd_regularity, "Hölder regularity lower bounds")
    _add_spec_arguments(p, many_n=True)
    p.add_argument("--L", type=int, default=None, help="iterations of the norm (default $LSQSUBDIV_REGULARITY_ITERATIONS)")

    for name, handler, help_text in (
        ("blf", cmd_blf, "basic limit function on the 2^-K grid"),
        ("psi", cmd_psi, "ψ on [0, 1]"),
        ("psistats", cmd_psistats, "min, max and integral of ψ"),
    ):
        p = command(name, handler, help_text)
        _add_spec_arguments(p)
        p.add_argument("--K", type=int, default=None, help="resolution (default $LSQSUBDIV_DEFAULT_K)")

    p = command("denoise", cmd_denoise, "denoising experiment on [0, 100]")
    p.add_argument("--function", required=True, choices=sorted(CATALOG))
    _add_spec_arguments(p)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--K", type=int, default=DEFAULT_LIMIT_K)
    p.add_argument("--llr", action="store_true", help="also fit the local linear regression baseline")
    p.add_argument("--bandwidths", type=float, nargs="+", default=None, help="LLR bandwidth candidates")

    p = command("conjectures", cmd_conjectures, "ψ statistics over degrees × n")
    p.add_argument("--degrees", type=int, nargs="+", required=True)
    p.add_argument("--ns", type=int, nargs="+", required=True)
    p.add_argument("--K", type=int, default=None)

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest", epilog=EPILOG)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        configure_logging()
        args = build_parser().parse_args(argv)
        if args.command == "replay":
            manifest = read_manifest(args.manifest)
            logger.info("Replaying %s from %s", manifest.command, args.manifest)
            return main([*manifest.argv, "--out", args.out])
        ctx = RunContext(args, argv)
        args.handler(ctx)
        ctx.finish()
    except SystemExit as exc:
        return int(exc.code or 0)
    except ValueError as exc:
        logger.error("Invalid input: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        logger.error("Numerical failure: %s", exc)
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
