"""Command line of the codec.

Subcommands:
    gen-code     Build a (b-reduced) US-LDPC code and write its code file
    compress     Encode a bit file into a compressed stream
    decompress   Decode a compressed stream into a bit file
    rd-sweep     Rate sweep
    gamma-sweep  gamma0 sweep on one code
    b-sweep      Sweep of the number of removed checks
    wef          Weight-enumerator curves for one or more field orders

Exit codes are 0 on success, 2 when a raw fallback block was produced or
read, and 1 on any error. Verbosity follows ``GFQC_LOG``.

Example:
    $ gfqc gen-code --p 6 --nbits 1600 --rate 0.33 --b 5 --seed 7 --out code.txt
    $ gfqc compress --code code.txt --input source.bits --output source.gfqc
"""

import argparse
import json
import logging
import sys
from typing import Callable, Dict, List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, ValidationError

from gfqc import __version__
from gfqc.application.services.codec import CodecParams, CodecService, decode
from gfqc.application.services.construction import code_for_bits, symbols_for_bits
from gfqc.application.services.experiments import (
    ExperimentConfig,
    ExperimentService,
    build_config,
    load_config,
)
from gfqc.application.services.peeling import leaf_removal
from gfqc.application.services.rate_distortion import bound_curve
from gfqc.application.services.wef import q_sweep
from gfqc.config import Settings, get_settings
from gfqc.domain.errors import ConfigurationError, GfqcError
from gfqc.domain.models.block import MAX_B, MAX_SEED
from gfqc.domain.models.code import SparseCode
from gfqc.domain.models.messages import BpParams, RbpParams
from gfqc.infrastructure.diagnostics import CsvDiagnostics, configure_logging
from gfqc.infrastructure.repositories.code_file import read_code_file, write_code_file
from gfqc.infrastructure.repositories.results import ResultWriter, read_bits, write_bits
from gfqc.infrastructure.repositories.stream import read_stream, write_stream

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FALLBACK = 2

# construction seeds tried by compress when --seed is not given
SEED_SEARCH = 64


class CliConfig(BaseModel):
    """Validated parameters shared by the subcommands.

    Attributes:
        subcommand: Subcommand name.
        p: Field extension degree.
        n_bits: Block length in binary digits.
        rate: Design rate.
        b: Removed checks.
        seed: Code construction seed.
        construction: ``peg`` or ``random``.
        strength: Prior strength L.
        gamma0: Reinforcement constant.
        gamma1: Reinforcement decay.
        ell_max: Sweeps per trial.
        t_max: Encoder trials.
        epsilon: Message-stability precision.
        schedule_seed: Seed of the encoder schedules.
        samples: Samples per grid point.
        master_seed: Experiment master seed.
        jobs: Worker processes.
        format: Summary format on stdout.
    """

    subcommand: str
    p: int = Field(default=6, ge=1, le=8)
    n_bits: Optional[int] = Field(default=None, ge=2)
    rate: float = Field(default=0.33, gt=0.0, lt=1.0)
    b: int = Field(default=5, ge=0, le=MAX_B)
    seed: int = Field(default=0, ge=0, le=MAX_SEED)
    construction: Literal["peg", "random"] = "peg"
    strength: float = Field(default=1.5, ge=0.0)
    gamma0: float = Field(default=0.92, ge=0.0, le=1.0)
    gamma1: float = Field(default=1.0, ge=0.0, le=1.0)
    ell_max: int = Field(default=300, ge=1)
    t_max: int = Field(default=5, ge=1)
    epsilon: float = Field(default=1e-6, gt=0.0)
    schedule_seed: int = Field(default=0, ge=0)
    samples: int = Field(default=50, ge=1)
    master_seed: int = Field(default=0, ge=0)
    jobs: int = Field(default=1, ge=1)
    format: Literal["csv", "json"] = "csv"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "CliConfig":
        """Validate parsed arguments.

        Raises:
            ConfigurationError: Listing every invalid option.
        """
        values = {
            name: getattr(args, name)
            for name in cls.model_fields
            if getattr(args, name, None) is not None
        }
        try:
            return cls.model_validate(values)
        except ValidationError as e:
            problems = "; ".join(
                f"--{str(err['loc'][0]).replace('_', '-')}: {err['msg']}" for err in e.errors()
            )
            raise ConfigurationError(f"Invalid options: {problems}") from e

    def codec_params(self, embed: bool = False) -> CodecParams:
        return CodecParams(
            strength=self.strength,
            rbp=RbpParams(
                gamma0=self.gamma0,
                gamma1=self.gamma1,
                ell_max=self.ell_max,
                t_max=self.t_max,
                epsilon=self.epsilon,
                schedule_seed=self.schedule_seed,
            ),
            embed_code=embed,
        )


def _emit(summary: Dict[str, object], fmt: str = "csv") -> None:
    if fmt == "json":
        print(json.dumps(summary, indent=2, default=str))
    else:
        for key, value in summary.items():
            print(f"{key}: {value}")


def _parse_list(text: Optional[str], cast: Callable = float) -> Optional[List]:
    if text is None:
        return None
    try:
        return [cast(v) for v in text.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Cannot parse list {text!r}: {e}") from e


def cmd_gen_code(args: argparse.Namespace) -> int:
    """Build a code, write its code file and print its structure."""
    config = CliConfig.from_args(args)
    if config.n_bits is None:
        raise ConfigurationError("gen-code needs --nbits")
    code = code_for_bits(
        config.n_bits, config.rate, config.p, config.seed, config.b, config.construction
    )
    order = leaf_removal(code)
    if args.out:
        write_code_file(args.out, code)
    _emit(
        {
            "n_sym": code.n_sym,
            "m_sym": code.m_sym,
            "b": code.b,
            "rate": round(code.rate, 6),
            "check_degrees": code.degree_histogram(),
            "core_size": order.core_size,
            "info_symbols": len(order.info_set),
            "empty_core": order.is_empty_core,
        },
        config.format,
    )
    return EXIT_OK


def _resolve_code(args: argparse.Namespace, config: CliConfig, n_bits: int) -> SparseCode:
    if args.code:
        code = read_code_file(args.code)
        if symbols_for_bits(n_bits, code.p) != code.n_sym:
            raise ConfigurationError(
                f"{n_bits} source bits do not fit a code of {code.n_sym} symbols over p={code.p}"
            )
        return code
    if args.seed is not None:
        return code_for_bits(
            n_bits, config.rate, config.p, config.seed, config.b, config.construction
        )
    # first seed from the default whose code has an empty core
    for seed in range(config.seed, config.seed + SEED_SEARCH):
        code = code_for_bits(n_bits, config.rate, config.p, seed, config.b, config.construction)
        if leaf_removal(code).is_empty_core:
            logger.info("Using code seed %d", seed)
            return code
    return code


def cmd_compress(args: argparse.Namespace) -> int:
    """Encode a bit file; exit 2 if the encoder fell back to raw mode."""
    config = CliConfig.from_args(args)
    bits = read_bits(args.input)
    service = CodecService(_resolve_code(args, config, len(bits)), config.codec_params(args.embed))
    if args.diagnostics:
        with CsvDiagnostics(args.diagnostics) as sink:
            report = service.compress(bits, sink)
    else:
        report = service.compress(bits)

    size = write_stream(args.output, report.block)
    _emit(
        {
            "rate": round(report.block.rate, 6),
            "distortion": round(report.distortion, 6),
            "iterations": report.iterations,
            "trials": report.trials,
            "fallback": report.fallback,
            "bytes": size,
        },
        config.format,
    )
    return EXIT_FALLBACK if report.fallback else EXIT_OK


def cmd_decompress(args: argparse.Namespace) -> int:
    """Decode a stream; exit 2 for raw fallback blocks."""
    block = read_stream(args.input)
    if args.code and not block.header.fallback:
        restored = CodecService(read_code_file(args.code)).decompress(block)
    else:
        restored = decode(block)
    write_bits(args.output, restored.bits)
    _emit({"bits": len(restored.bits), "fallback": restored.fallback}, args.format or "csv")
    return EXIT_FALLBACK if restored.fallback else EXIT_OK


def _experiment_config(args: argparse.Namespace, experiment: str) -> ExperimentConfig:
    overrides = {
        "experiment": experiment,
        "grid": _parse_list(args.grid),
        "p": args.p,
        "n_bits": args.n_bits,
        "rate": args.rate,
        "b": args.b,
        "seed": args.seed,
        "construction": args.construction,
        "strength": args.strength,
        "gamma0": args.gamma0,
        "gamma1": args.gamma1,
        "ell_max": args.ell_max,
        "t_max": args.t_max,
        "epsilon": args.epsilon,
        "use_table": True if args.use_table else None,
        "samples": args.samples,
        "master_seed": args.master_seed,
        "jobs": args.jobs,
        "output": args.out,
    }
    if args.config:
        return load_config(args.config, **overrides)
    return build_config({k: v for k, v in overrides.items() if v is not None})


def _write_bound(writer: ResultWriter) -> None:
    writer.write(
        "rd_bound", [{"distortion": d, "rate": r} for d, r in bound_curve()]
    )


def _sweep(experiment: str, name: str) -> Callable[[argparse.Namespace], int]:
    def command(args: argparse.Namespace) -> int:
        config = _experiment_config(args, experiment)
        service = ExperimentService(config)
        points = service.run()
        service.write_tables(name)
        for pt in points:
            _emit(
                {
                    config.parameter: pt.value,
                    "rate": round(pt.rate, 4),
                    "distortion": round(pt.distortion, 4),
                    "mean_iters": round(pt.mean_iters, 1),
                    "failure_rate": round(pt.failure_rate, 3),
                    "core_size": pt.core_size,
                },
                args.format or "csv",
            )
        return EXIT_OK

    command.__name__ = f"cmd_{name}"
    return command


cmd_rd_sweep = _sweep("rate", "rd_sweep")
cmd_gamma_sweep = _sweep("gamma", "gamma_sweep")
cmd_b_sweep = _sweep("b", "b_sweep")


def cmd_wef(args: argparse.Namespace) -> int:
    """Weight-enumerator curves, one per field order in ``--p-list``."""
    config = CliConfig.from_args(args)
    p_list = _parse_list(args.p_list, int) or [config.p]
    strengths = _parse_list(args.strengths) or [float(x) for x in np.linspace(0.0, 4.0, 21)]
    n_bits = config.n_bits or 12000
    params = BpParams(
        damping=args.damping if args.damping is not None else get_settings().damping,
        ell_max=args.bp_ell_max,
        epsilon=config.epsilon,
        schedule_seed=config.seed,
    )
    curves = q_sweep(
        n_bits, config.rate, p_list, sorted(strengths), config.seed, config.b,
        params, config.construction,
    )
    rows = [pt.as_row() for p in p_list for pt in curves[p]]
    writer = ResultWriter(args.out or ".")
    writer.write("wef", rows)
    _write_bound(writer)
    converged = sum(r["converged"] for r in rows)
    _emit({"curves": len(p_list), "points": len(rows), "converged": converged}, config.format)
    return EXIT_OK


def _code_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("Code")
    group.add_argument("--p", type=int, help="Field extension degree, q = 2^p")
    group.add_argument("--nbits", dest="n_bits", type=int, help="Block length in bits")
    group.add_argument("--rate", type=float, help="Design rate")
    group.add_argument("--b", type=int, help="Checks removed by b-reduction")
    group.add_argument("--seed", type=int, help="Code construction seed")
    group.add_argument("--construction", choices=("peg", "random"))


def _encoder_options(parser: argparse.ArgumentParser, settings: Settings) -> None:
    group = parser.add_argument_group("Encoder")
    group.add_argument("--strength", "--L", type=float, default=settings.strength, help="Prior strength L")
    group.add_argument("--gamma0", type=float, default=settings.gamma0)
    group.add_argument("--gamma1", type=float, default=settings.gamma1)
    group.add_argument("--ell-max", type=int, default=settings.ell_max)
    group.add_argument("--t-max", type=int, default=settings.t_max)
    group.add_argument("--epsilon", type=float, default=settings.epsilon)


def build_parser(settings: Optional[Settings] = None) -> argparse.ArgumentParser:
    settings = settings or get_settings()
    parser = argparse.ArgumentParser(
        prog="gfqc", description="Lossy compression with b-reduced GF(q) LDPC codes"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--format", choices=("csv", "json"), help="Summary format on stdout")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    gen = sub.add_parser("gen-code", help="Build a code and write its code file")
    _code_options(gen)
    gen.add_argument("--out", help="Code file to write")
    gen.set_defaults(handler=cmd_gen_code)

    comp = sub.add_parser("compress", help="Compress a 0/1 text file")
    _code_options(comp)
    _encoder_options(comp, settings)
    comp.add_argument("--code", help="Code file; otherwise the code is generated")
    comp.add_argument("--input", required=True)
    comp.add_argument("--output", required=True)
    comp.add_argument("--schedule-seed", type=int, default=0)
    comp.add_argument("--embed", action="store_true", help="Carry the code file in the stream")
    comp.add_argument("--diagnostics", help="Per-sweep diagnostics CSV")
    comp.set_defaults(handler=cmd_compress)

    dec = sub.add_parser("decompress", help="Decompress a stream into a 0/1 text file")
    dec.add_argument("--code", help="Code file; otherwise resolved from the stream")
    dec.add_argument("--input", required=True)
    dec.add_argument("--output", required=True)
    dec.set_defaults(handler=cmd_decompress)

    for name, handler, text in (
        ("rd-sweep", cmd_rd_sweep, "Distortion versus rate"),
        ("gamma-sweep", cmd_gamma_sweep, "Distortion versus gamma0"),
        ("b-sweep", cmd_b_sweep, "Distortion versus removed checks"),
    ):
        exp = sub.add_parser(name, help=text)
        _code_options(exp)
        group = exp.add_argument_group("Encoder")
        for flag in ("--strength", "--gamma0", "--gamma1", "--epsilon"):
            group.add_argument(flag, type=float)
        group.add_argument("--ell-max", type=int)
        group.add_argument("--t-max", type=int)
        exp.add_argument("--config", help="key=value experiment file")
        exp.add_argument("--grid", help="Comma-separated grid of the swept parameter")
        exp.add_argument("--use-table", action="store_true", help="Tuned (L, gamma0) per rate")
        exp.add_argument("--samples", type=int)
        exp.add_argument("--master-seed", type=int)
        exp.add_argument("--jobs", type=int, default=settings.jobs)
        exp.add_argument("--out", help="Output directory")
        exp.set_defaults(handler=handler)

    wef = sub.add_parser("wef", help="Weight-enumerator curves")
    _code_options(wef)
    wef.add_argument("--p-list", help="Comma-separated extension degrees")
    wef.add_argument("--strengths", help="Comma-separated prior strengths")
    wef.add_argument("--damping", type=float)
    wef.add_argument("--bp-ell-max", type=int, default=1000)
    wef.add_argument("--epsilon", type=float, default=settings.epsilon)
    wef.add_argument("--out", help="Output directory")
    wef.set_defaults(handler=cmd_wef, construction="random")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line; returns the exit code."""
    try:
        settings = get_settings()
    except ValidationError as e:
        print(f"error: invalid environment: {e}", file=sys.stderr)
        return EXIT_ERROR
    configure_logging(settings.log)
    try:
        args = build_parser(settings).parse_args(argv)
    except SystemExit as e:
        # usage errors must not look like the fallback exit code
        return EXIT_OK if not e.code else EXIT_ERROR
    try:
        return args.handler(args)
    except (GfqcError, OSError) as e:
        logger.debug("Command failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
