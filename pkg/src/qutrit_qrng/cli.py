#!/usr/bin/env python3
"""Command-line harness: generate, transform, analyze, compare, decompose, verify-physics, predict.

Machine-readable JSON goes to stdout (or --out); human-readable summaries go to stderr.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from .base import (
    SIMULATION_DISCLAIMER,
    ConfigError,
    QrngError,
    SourceResult,
    highlight_json,
    render_json,
)
from .coding import (
    BitReader,
    BitWriter,
    TernaryReader,
    TernaryWriter,
    legacy_readout_array,
    morphism_array,
)
from .fileio import (
    atomic_output,
    confirm_overwrite,
    describe_output,
    require_input,
    require_output,
    sidecar_path,
    write_text_atomic,
)
from .measurement import CounterEntropy, GenerationRecord, PreparationSpec, iter_ternary_chunks, tally
from .normality import (
    SQRT_LOG,
    AccuracyFunction,
    normality_report_streaming,
    prefix_normality_profile,
)
from .predictors import PREDICTOR_REGISTRY, evaluate_predictor, make_predictor
from .sources import SOURCE_REGISTRY, QrngPipelineSource, make_source
from .stats import chi_square_test
from .unitary import (
    DecompositionPlan,
    build_ux,
    decompose,
    max_abs_error,
    operator_from_dict,
    operator_to_dict,
    reconstruct,
)
from .verification import run_physics_checks, summarize

logger = logging.getLogger(__name__)

MAX_COUNT = (1 << 64) - 1
SCHEMES = ("morphism", "legacy")
DEFAULT_SOURCES = "qrng,lcg,mt19937"


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters of one subcommand invocation."""

    command: str
    seed: int = 0
    count: int = 0
    preparation: PreparationSpec = PreparationSpec.PLUS_ONE
    accuracy: AccuracyFunction = SQRT_LOG
    window: int = 8
    input: Optional[Path] = None
    out: Optional[Path] = None
    sources: tuple[str, ...] = ()
    scheme: str = "morphism"
    predictor: str = "one"
    prefixes: bool = False
    assume_yes: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """
        Build and validate a configuration before any work starts.

        Raises:
            ConfigError: On any rejected value or path
        """
        seed = getattr(args, "seed", 0)
        count = getattr(args, "count", 0)
        window = getattr(args, "window", 8)
        if not 0 <= seed <= MAX_COUNT:
            raise ConfigError(f"Seed must be an unsigned 64-bit integer, got {seed}")
        if not 0 <= count <= MAX_COUNT:
            raise ConfigError(f"Count must be a non-negative 64-bit integer, got {count}")
        if window < 0:
            raise ConfigError(f"Window must be non-negative, got {window}")

        sources: tuple[str, ...] = ()
        if getattr(args, "sources", None):
            sources = tuple(s.strip().lower() for s in args.sources.split(",") if s.strip())
            unknown = [s for s in sources if s not in SOURCE_REGISTRY]
            if not sources or unknown:
                raise ConfigError(f"Unknown or empty source list: {args.sources!r}")

        predictor = getattr(args, "predictor", "one").strip().lower()
        if predictor not in PREDICTOR_REGISTRY:
            raise ConfigError(f"Unknown predictor {predictor!r}")

        input_path = getattr(args, "input", None)
        out_path = getattr(args, "out", None)
        config = cls(
            command=args.command,
            seed=seed,
            count=count,
            preparation=PreparationSpec.parse(getattr(args, "prep", "plus1")),
            accuracy=AccuracyFunction.parse(getattr(args, "accuracy", "sqrtlog")),
            window=window,
            input=require_input(Path(input_path)) if input_path else None,
            out=require_output(Path(out_path)) if out_path else None,
            sources=sources,
            scheme=getattr(args, "scheme", "morphism"),
            predictor=predictor,
            prefixes=getattr(args, "prefixes", False),
            assume_yes=getattr(args, "yes", False),
        )
        if config.command in ("generate", "transform") and config.out is None:
            raise ConfigError(f"{config.command} needs --out")
        if config.command in ("transform", "analyze", "predict") and config.input is None:
            raise ConfigError(f"{config.command} needs --in")
        if config.out is not None and not confirm_overwrite(config.out, config.assume_yes):
            raise ConfigError(f"Refusing to overwrite {config.out}")
        if config.command == "generate" and config.out is not None:
            sidecar = sidecar_path(config.out)
            if not confirm_overwrite(sidecar, config.assume_yes):
                raise ConfigError(f"Refusing to overwrite {sidecar}")
        return config


def _emit(document: dict[str, Any], out: Optional[Path]) -> None:
    text = render_json(document)
    if out is None:
        print(highlight_json(text))
    else:
        write_text_atomic(out, text + "\n")


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def cmd_generate(config: RunConfig) -> int:
    """Write `count` simulated digits to a packed ternary file plus a JSON sidecar."""
    assert config.out is not None
    entropy = CounterEntropy(config.seed)
    tallies = [0, 0, 0]
    with atomic_output(config.out) as fh:
        writer = TernaryWriter(fh, config.count)
        for chunk in iter_ternary_chunks(config.preparation, config.count, entropy):
            writer.write(chunk)
            tallies = [a + b for a, b in zip(tallies, tally(chunk))]
        writer.close()
    record = GenerationRecord(
        seed=config.seed, preparation=config.preparation, count=config.count, tallies=tallies
    )
    document = record.to_dict()
    # Overwrite permission for the sidecar was settled in RunConfig.from_args
    write_text_atomic(sidecar_path(config.out), render_json(document) + "\n")
    _note(f"Generated {config.count} digits ({config.preparation.value}) -> {config.out}")
    _note(f"Tallies {tallies}; {SIMULATION_DISCLAIMER}")
    _emit(document, None)
    return 0


def cmd_transform(config: RunConfig) -> int:
    """Stream a packed ternary file through the morphism (or legacy readout) into a bit file."""
    assert config.input is not None and config.out is not None
    convert = morphism_array if config.scheme == "morphism" else legacy_readout_array
    with config.input.open("rb") as source:
        reader = TernaryReader(source)
        with atomic_output(config.out) as sink:
            writer = BitWriter(sink, reader.count)
            for chunk in reader.chunks():
                writer.write(convert(chunk))
            writer.close()
    _note(f"Transformed {reader.count} digits ({config.scheme}) -> {config.out}")
    _emit(
        {
            "input": str(config.input),
            "output": str(config.out),
            "count": reader.count,
            "scheme": config.scheme,
        },
        None,
    )
    return 0


def cmd_analyze(config: RunConfig) -> int:
    """Normality report and chi-square over symbol counts of a packed bit file."""
    assert config.input is not None
    with config.input.open("rb") as fh:
        reader = BitReader(fh)
        if config.prefixes:
            bits = reader.read_stream()
            profile = prefix_normality_profile(bits, config.accuracy)
            _emit({"n": len(bits), "prefixes": [r.to_dict() for r in profile]}, config.out)
            _note(f"{sum(r.passed for r in profile)}/{len(profile)} prefixes pass")
            return 0
        report, symbols = normality_report_streaming(reader.chunks(), reader.count, config.accuracy)

    statistic, p_value = chi_square_test([symbols[0], symbols[1]], [0.5, 0.5])
    document = {
        **report.to_dict(),
        "symbols": {"0": symbols[0], "1": symbols[1]},
        "chi_square": {"statistic": statistic, "p_value": p_value, "df": 1},
    }
    _emit(document, config.out)
    verdict = "PASS" if report.passed else "FAIL"
    _note(
        f"{verdict}: n={report.n}, m in {report.block_sizes}, accuracy {report.accuracy}, "
        f"chi-square {statistic:.3f} (p={p_value:.4f})"
    )
    return 0


def cmd_compare(config: RunConfig) -> int:
    """Run the same battery on every requested source; failures stay in their own row."""
    sources = config.sources or tuple(DEFAULT_SOURCES.split(","))
    rows: list[SourceResult] = []
    for name in sources:
        source = (
            QrngPipelineSource(config.preparation) if name == QrngPipelineSource.name else make_source(name)
        )
        rows.append(source.benchmark(config.count, config.seed, config.accuracy))
    document = {
        "parameters": {"n": config.count, "seed": config.seed, "accuracy": str(config.accuracy)},
        "rows": [row.to_dict() for row in rows],
    }
    _emit(document, config.out)
    for row in rows:
        if row.error is not None:
            _note(f"{row.source}: ERROR {row.error}")
        else:
            passed = row.normality is not None and row.normality["pass"]
            _note(
                f"{row.source}: chi-square {row.chi_square:.3f} (p={row.p_value:.4f}), "
                f"normal={passed}, {row.throughput_bits_per_s or 0:.3g} bits/s"
            )
    return 0 if any(row.error is None for row in rows) else 1


def cmd_decompose(config: RunConfig) -> int:
    """
    Decompose a unitary (U_x by default) into a plan, or reconstruct a plan's matrix.

    Input documents: {"real": [[...]], "imag": [[...]]} for a matrix, or
    {"layers": [...], "phases": [...]} for a plan.
    """
    if config.input is None:
        document: dict[str, Any] = {"real": np.real(build_ux()).tolist(), "imag": np.zeros((3, 3)).tolist()}
    else:
        try:
            document = json.loads(config.input.read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"{config.input} is not valid JSON: {e}") from e

    if "layers" in document:
        matrix = reconstruct(DecompositionPlan.from_dict(document))
        _emit(operator_to_dict(matrix), config.out)
        _note(f"Reconstructed a {matrix.shape[0]}x{matrix.shape[0]} unitary")
        return 0

    u = operator_from_dict(document)
    plan = decompose(u)
    error = max_abs_error(reconstruct(plan), u)
    _emit({**plan.to_dict(), "reconstruction_error": error}, config.out)
    _note(f"{len(plan.layers)} layers, reconstruction error {error:.2e} -> {describe_output(config.out)}")
    return 0


def cmd_verify_physics(config: RunConfig) -> int:
    results = run_physics_checks(config.seed)
    for r in results:
        _note(f"{'✅' if r.passed else '❌'} {r.name}: {r.detail}")
    summary = summarize(results)
    _emit(summary, config.out)
    return 0 if summary["pass"] else 1


def cmd_predict(config: RunConfig) -> int:
    """Score a predictor fed a sliding window against a packed bit file."""
    assert config.input is not None
    with config.input.open("rb") as fh:
        bits = BitReader(fh).read_stream()
    predictor = make_predictor(config.predictor)
    evaluation = evaluate_predictor(predictor, bits, config.window)
    _emit(
        {
            "predictor": predictor.name,
            "window": config.window,
            "n": len(bits),
            **evaluation.to_dict(),
        },
        config.out,
    )
    _note(
        f"{predictor.name}: {evaluation.correct} correct, {evaluation.incorrect} incorrect, "
        f"{evaluation.withheld} withheld (k={evaluation.k_correct_for})"
    )
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "transform": cmd_transform,
    "analyze": cmd_analyze,
    "compare": cmd_compare,
    "decompose": cmd_decompose,
    "verify-physics": cmd_verify_physics,
    "predict": cmd_predict,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qutrit-qrng",
        description="Simulate and analyse a spin-1 quantum random number generator.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, out_help: str = "Write JSON here instead of stdout") -> None:
        p.add_argument("--out", help=out_help)
        p.add_argument("--format", choices=["json"], default="json", help="Report format")
        p.add_argument("--yes", action="store_true", help="Overwrite existing outputs without asking")

    def seeded(p: argparse.ArgumentParser) -> None:
        p.add_argument("--seed", type=int, default=0, help="Seed (unsigned 64-bit)")

    def counted(p: argparse.ArgumentParser) -> None:
        p.add_argument("--count", type=int, default=0, help="Number of digits/bits")

    def prepared(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--prep",
            default="plus1",
            help="Preparation: plus1, minus1, superposition or legacy",
        )

    def accurate(p: argparse.ArgumentParser) -> None:
        p.add_argument("--accuracy", default="sqrtlog", help="sqrtlog, invlog or const:<f>")

    p = sub.add_parser("generate", help="Simulate ternary digits into a packed file")
    common(p, out_help="Packed ternary output file")
    seeded(p)
    counted(p)
    prepared(p)

    p = sub.add_parser("transform", help="Map a packed ternary file to a packed bit file")
    common(p, out_help="Packed bit output file")
    p.add_argument("--in", dest="input", help="Packed ternary input file")
    p.add_argument("--scheme", choices=SCHEMES, default="morphism", help="Digit-to-bit map")

    p = sub.add_parser("analyze", help="Normality and chi-square analysis of a packed bit file")
    common(p)
    p.add_argument("--in", dest="input", help="Packed bit input file")
    accurate(p)
    p.add_argument("--prefixes", action="store_true", help="Report every power-of-two prefix")

    p = sub.add_parser("compare", help="Run the analysis battery on several bit sources")
    common(p)
    seeded(p)
    counted(p)
    prepared(p)
    accurate(p)
    p.add_argument("--sources", default=DEFAULT_SOURCES, help="Comma-separated source names")

    p = sub.add_parser("decompose", help="Decompose a unitary into beam-splitter layers")
    common(p)
    p.add_argument("--in", dest="input", help="Matrix or plan JSON (default: U_x)")

    p = sub.add_parser("verify-physics", help="Run the spin-algebra and decomposition invariants")
    common(p)
    seeded(p)

    p = sub.add_parser("predict", help="Evaluate a predictor against a packed bit file")
    common(p)
    p.add_argument("--in", dest="input", help="Packed bit input file")
    p.add_argument("--predictor", default="one", help=f"One of: {', '.join(PREDICTOR_REGISTRY)}")
    p.add_argument("--window", type=int, default=8, help="Bits of history shown to the predictor")

    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse, validate, then execute one subcommand; returns the exit status."""
    args = build_parser().parse_args(argv)
    logger.debug(f"Command line: {args}")

    try:
        config = RunConfig.from_args(args)
    except ConfigError as e:
        logger.error(f"Invalid configuration: {e}")
        print(f"ERROR: Invalid configuration: {e}", file=sys.stderr)
        return 1

    try:
        logger.info(f"Executing {config.command}")
        return COMMANDS[config.command](config)
    except (QrngError, ValueError, OSError) as e:
        logger.error(f"{config.command} failed: {e}", exc_info=True)
        print(f"ERROR: {config.command} failed: {e}", file=sys.stderr)
        return 1


def main() -> None:
    """Main entry point for qutrit-qrng."""
    sys.exit(run())


if __name__ == "__main__":
    main()
