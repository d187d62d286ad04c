"""Command line interface.

Subcommands:

- ``merge``: TIES-merge LoRA adapters into one archive.
- ``generate``: sample candidate sets for prompts.
- ``decode``: select one output per prompt (online or from candidates).
- ``eval``: score outputs and write a report.
- ``pipeline``: decode and evaluate in one go.
- ``compare``: compare all decoding objectives on the same candidates.

Every command returns exit status 0 on success and 1 after logging the
error of a failed stage.
"""

import argparse
import contextlib
import functools
import logging
import os
import sys
from collections.abc import Callable, Iterator, Sequence
from pathlib import Path
from typing import Any

from dialectmbr.clients.generation import GenerationClient
from dialectmbr.clients.scorer import build_scorer, load_lexicon
from dialectmbr.config import PipelineConfig, load_pipeline_config
from dialectmbr.evalharness import build_reports, compare_objectives, emit_comparison, emit_report
from dialectmbr.exceptions import ConfigurationException, DialectMbrException, MisalignedCorpusError
from dialectmbr.facade import merge_adapter_files
from dialectmbr.mbr import select_many
from dialectmbr.metrics import DialectScorer
from dialectmbr.models.candidates import CandidateSet
from dialectmbr.models.common import (
    ChrfAggregate,
    Direction,
    DisplayScale,
    KeyPolicy,
    MergeSpace,
    ObjectiveKind,
    ReportFormat,
    TaskKind,
)
from dialectmbr.models.report import MONOLINGUAL_KEY, ConfigFingerprint, EvalTask
from dialectmbr.parser.jsonl import (
    is_candidates_file,
    iter_candidate_sets,
    iter_outputs,
    iter_prompts,
    iter_references,
    load_candidates,
)
from dialectmbr.version import __version__
from dialectmbr.writer.base import atomic_write
from dialectmbr.writer.jsonl import CandidatesWriter, SelectionsWriter

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: File name suffix of reports per format.
REPORT_SUFFIXES = {ReportFormat.JSON: ".json", ReportFormat.CSV: ".csv", ReportFormat.TEXT: ".txt"}


def _exit_status[**P](fn: Callable[P, None]) -> Callable[P, int]:
    """Turn a command into one returning an exit status, logging package and I/O errors."""

    @functools.wraps(fn)
    def wrapper(*args: P.args, **kwargs: P.kwargs) -> int:
        try:
            fn(*args, **kwargs)
        except (DialectMbrException, OSError) as e:
            LOGGER.error("%s failed: %s", fn.__name__, e)
            return 1
        return 0

    return wrapper


def fingerprint_from_config(config: PipelineConfig, scorer: DialectScorer | None) -> ConfigFingerprint:
    """Fingerprint of the settings that influence a report."""
    return ConfigFingerprint(
        objective=config.objective,
        num_candidates=config.gen.num_candidates,
        combined_weight=config.combined_weight if config.objective == ObjectiveKind.COMBINED else None,
        trim_fraction=config.merge.trim_fraction,
        merge_lambda=config.merge.scale,
        chrf=config.chrf,
        chrf_aggregate=config.chrf_aggregate,
        scorer_id=scorer.backend_id if scorer is not None else None,
    )


def _candidate_stream(input_path: Path, config: PipelineConfig) -> Iterator[CandidateSet]:
    """Candidate sets from a candidates file, or sampled online for a prompts file."""
    if is_candidates_file(input_path):
        LOGGER.info("Reading offline candidates from %s", input_path)
        yield from iter_candidate_sets(input_path)
        return
    LOGGER.info("Sampling %d candidates per prompt from %s", config.gen.num_candidates, config.gen.endpoint)
    # prompts go one after another, the client spreads the candidates over ``jobs`` requests
    with GenerationClient(config.gen) as client:
        for prompt in iter_prompts(input_path):
            yield client.generate_candidates(prompt.source, prompt.prompt_id)


@_exit_status
def cmd_merge(
    adapter_paths: Sequence[Path],
    config: PipelineConfig,
    out_path: Path,
    *,
    alpha: float | None = None,
    rank: int | None = None,
) -> None:
    """TIES-merge adapter archives into ``out_path``."""
    merge_adapter_files(adapter_paths, out_path, config.merge, alpha=alpha, rank=rank)


@_exit_status
def cmd_generate(prompts_path: Path, config: PipelineConfig, out_path: Path) -> None:
    """Sample candidates for every prompt and write them as candidates JSONL."""
    CandidatesWriter().write_to_file(_candidate_stream(prompts_path, config), out_path)


def _decode(input_path: Path, config: PipelineConfig, out_path: Path) -> None:
    with build_scorer(config.scorer) as scorer:
        selections = select_many(
            _candidate_stream(input_path, config),
            config.objective,
            scorer=scorer,
            dialect=config.dialect,
            chrf_config=config.chrf,
            combined_weight=config.combined_weight,
            jobs=config.jobs,
        )
        SelectionsWriter().write_to_file(selections, out_path)


@_exit_status
def cmd_decode(prompts_path: Path, config: PipelineConfig, out_path: Path) -> None:
    """Select one output per prompt and write selections JSONL in input order."""
    _decode(prompts_path, config, out_path)


def parse_task_spec(spec: str) -> tuple[str, Path]:
    """Split ``TASK=PATH`` into task key and path; a bare path is the monolingual task.

    Example:
        >>> parse_task_spec("en-da=out.jsonl")
        ('en-da', PosixPath('out.jsonl'))
        >>> parse_task_spec("out.jsonl")
        ('monolingual', PosixPath('out.jsonl'))
    """
    keys = {MONOLINGUAL_KEY, *(direction.value for direction in Direction)}
    key, sep, path = spec.partition("=")
    if sep and key in keys:
        return key, Path(path)
    return MONOLINGUAL_KEY, Path(spec)


def _read_task(key: str, outputs_path: Path, references_path: Path | None, dialect: str) -> EvalTask:
    outputs = list(iter_outputs(outputs_path))
    direction = None if key == MONOLINGUAL_KEY else Direction(key)
    references = None
    if references_path is not None:
        reference_records = list(iter_references(references_path))
        if len(reference_records) != len(outputs):
            raise MisalignedCorpusError(
                f"{outputs_path} has {len(outputs)} records but {references_path} has {len(reference_records)}"
            )
        for line, (output, reference) in enumerate(zip(outputs, reference_records, strict=True), start=1):
            if None not in (output.prompt_id, reference.prompt_id) and output.prompt_id != reference.prompt_id:
                raise MisalignedCorpusError(
                    f"record {line}: output for {output.prompt_id!r} aligned with reference for {reference.prompt_id!r}"
                )
        references = [record.reference for record in reference_records]
    return EvalTask(
        kind=TaskKind.MONOLINGUAL if direction is None else TaskKind.TRANSLATION,
        direction=direction,
        dialect=dialect,
        outputs=[record.text for record in outputs],
        references=references,
    )


def _evaluate(
    outputs: dict[str, Path], references: dict[str, Path], config: PipelineConfig, report_path: Path
) -> None:
    unknown = sorted(references.keys() - outputs.keys())
    if unknown:
        raise ConfigurationException(f"References given for tasks without outputs: {unknown}")
    tasks = [_read_task(key, path, references.get(key), config.dialect) for key, path in outputs.items()]
    needs_scorer = any(task.direction is None or task.direction.targets_dialect for task in tasks)
    with build_scorer(config.scorer) if needs_scorer else contextlib.nullcontext() as scorer:
        reports = build_reports(
            tasks,
            scorer=scorer,
            chrf_config=config.chrf,
            aggregate=config.chrf_aggregate,
            fingerprint=fingerprint_from_config(config, scorer),
            jobs=config.jobs,
        )
    atomic_write(report_path, emit_report(reports, config.report_format, config.scale))
    LOGGER.info("Wrote report %s", report_path)


@_exit_status
def cmd_eval(
    outputs: dict[str, Path], references: dict[str, Path], config: PipelineConfig, report_path: Path
) -> None:
    """Evaluate outputs per task (``monolingual`` or a direction) and write a report."""
    _evaluate(outputs, references, config, report_path)


@_exit_status
def cmd_pipeline(input_path: Path, config: PipelineConfig, out_dir: Path, references: dict[str, Path]) -> None:
    """Decode ``input_path`` into ``out_dir`` and evaluate the selections.

    The selections are evaluated monolingually and, for every direction with
    references, as translations.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    selections_path = out_dir / "selections.jsonl"
    _decode(input_path, config, selections_path)
    outputs = {MONOLINGUAL_KEY: selections_path} | {key: selections_path for key in references}
    _evaluate(outputs, references, config, out_dir / f"report{REPORT_SUFFIXES[config.report_format]}")


@_exit_status
def cmd_compare(
    candidates_path: Path, config: PipelineConfig, out_path: Path | None, references_path: Path | None = None
) -> None:
    """Compare all decoding objectives on offline candidates."""
    candidate_sets = load_candidates(candidates_path)
    references = None
    if references_path is not None:
        references = [record.reference for record in iter_references(references_path)]
    with build_scorer(config.scorer) as scorer:
        rows = compare_objectives(
            candidate_sets,
            config.dialect,
            scorer,
            chrf_config=config.chrf,
            references=references,
            combined_weight=config.combined_weight,
            aggregate=config.chrf_aggregate,
            jobs=config.jobs,
        )
    content = emit_comparison(rows, config.report_format, config.scale)
    if out_path is None:
        sys.stdout.write(content.decode("utf-8"))
    else:
        atomic_write(out_path, content)


def _common_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("common options")
    group.add_argument("--config", type=Path, help="YAML or JSON configuration file")
    verbosity = group.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    group.add_argument("--jobs", type=int, help="number of worker threads")
    group.add_argument("--dialect", help="target dialect label, e.g. syr, mor, sau")
    group.add_argument("--objective", choices=[kind.value for kind in ObjectiveKind], help="decoding objective")
    group.add_argument("--combined-weight", type=float, help="weight of ADI2 in the combined objective")
    group.add_argument("--scorer", choices=["stub", "remote"], help="dialect scorer backend")
    group.add_argument("--scorer-endpoint", help="URL of the scorer service")
    group.add_argument("--lexicon", type=Path, help="YAML or JSON marker lexicon for the stub scorer")
    group.add_argument("--scale", choices=[scale.value for scale in DisplayScale], help="display scale of chrF++")
    group.add_argument("--format", choices=[fmt.value for fmt in ReportFormat], help="report format")
    group.add_argument(
        "--chrf-aggregate", choices=[agg.value for agg in ChrfAggregate], help="corpus aggregation of chrF++"
    )
    group.add_argument("--n-candidates", type=int, help="candidates sampled per prompt")
    group.add_argument("--seed", type=int, help="seed of the first candidate request")
    group.add_argument("--endpoint", help="URL of the chat-completions server")
    group.add_argument("--model", help="model name sent to the server")
    group.add_argument("--temperature", type=float, help="sampling temperature")
    group.add_argument("--top-p", type=float, help="nucleus sampling mass")
    group.add_argument("--max-tokens", type=int, help="maximal tokens per candidate")
    return parser


def build_parser() -> argparse.ArgumentParser:
    """Create the argument parser."""
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="dialectmbr", description="Dialect-aware MBR decoding and adapter merging")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    merge = subparsers.add_parser("merge", parents=[common], help="TIES-merge LoRA adapters")
    merge.add_argument("adapters", nargs="+", type=Path, help="adapter safetensors files")
    merge.add_argument("-o", "--output", type=Path, required=True, help="merged archive")
    merge.add_argument("--trim-fraction", type=float, help="fraction of entries kept per tensor")
    merge.add_argument("--lambda", dest="merge_lambda", type=float, help="scale of the merged deltas")
    merge.add_argument("--merge-space", choices=[space.value for space in MergeSpace], help="merge space")
    merge.add_argument("--key-policy", choices=[policy.value for policy in KeyPolicy], help="tensor name policy")
    merge.add_argument("--lora-alpha", type=float, help="override the LoRA alpha")
    merge.add_argument("--lora-rank", type=int, help="override the LoRA rank")

    generate = subparsers.add_parser("generate", parents=[common], help="sample candidates")
    generate.add_argument("prompts", type=Path, help="prompts JSONL")
    generate.add_argument("-o", "--output", type=Path, required=True, help="candidates JSONL")

    decode = subparsers.add_parser("decode", parents=[common], help="select one output per prompt")
    decode.add_argument("input", type=Path, help="prompts JSONL or candidates JSONL")
    decode.add_argument("-o", "--output", type=Path, required=True, help="selections JSONL")

    evaluate = subparsers.add_parser("eval", parents=[common], help="evaluate outputs")
    evaluate.add_argument(
        "--outputs", action="append", required=True, metavar="[TASK=]PATH", help="outputs per task (repeatable)"
    )
    evaluate.add_argument(
        "--references", action="append", default=[], metavar="TASK=PATH", help="references per task (repeatable)"
    )
    evaluate.add_argument("-o", "--output", type=Path, required=True, help="report file")

    pipeline = subparsers.add_parser("pipeline", parents=[common], help="decode and evaluate")
    pipeline.add_argument("input", type=Path, help="prompts JSONL or candidates JSONL")
    pipeline.add_argument("-o", "--output-dir", type=Path, required=True, help="directory for selections and report")
    pipeline.add_argument(
        "--references", action="append", default=[], metavar="TASK=PATH", help="references per direction (repeatable)"
    )

    compare = subparsers.add_parser("compare", parents=[common], help="compare decoding objectives")
    compare.add_argument("candidates", type=Path, help="candidates JSONL")
    compare.add_argument("--references", type=Path, help="references JSONL aligned with the candidates")
    compare.add_argument("-o", "--output", type=Path, help="output file, standard output if not given")
    return parser


def overrides_from_args(args: argparse.Namespace) -> dict[str, Any]:
    """Configuration overrides given on the command line."""

    def arg(name: str) -> Any:
        return getattr(args, name, None)

    return {
        "dialect": arg("dialect"),
        "objective": arg("objective"),
        "combined_weight": arg("combined_weight"),
        "chrf_aggregate": arg("chrf_aggregate"),
        "scale": arg("scale"),
        "report_format": arg("format"),
        "jobs": arg("jobs"),
        "gen": {
            "endpoint": arg("endpoint"),
            "model": arg("model"),
            "num_candidates": arg("n_candidates"),
            "seed_base": arg("seed"),
            "temperature": arg("temperature"),
            "top_p": arg("top_p"),
            "max_tokens": arg("max_tokens"),
        },
        "merge": {
            "trim_fraction": arg("trim_fraction"),
            "scale": arg("merge_lambda"),
            "space": arg("merge_space"),
            "key_policy": arg("key_policy"),
        },
        "scorer": {
            "kind": arg("scorer"),
            "endpoint": arg("scorer_endpoint"),
            "lexicon": load_lexicon(args.lexicon) if arg("lexicon") else None,
        },
    }


def _task_specs(specs: Sequence[str]) -> dict[str, Path]:
    result: dict[str, Path] = {}
    for spec in specs:
        key, path = parse_task_spec(spec)
        if key in result:
            raise ConfigurationException(f"Task {key!r} given more than once")
        result[key] = path
    return result


def main(argv: Sequence[str] | None = None) -> int:
    """Run the command line interface and return the exit status."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = load_pipeline_config(args.config, os.environ, overrides_from_args(args))
        outputs = _task_specs(args.outputs) if args.command == "eval" else {}
        references = _task_specs(args.references) if args.command in ("eval", "pipeline") else {}
    except (DialectMbrException, OSError) as e:
        LOGGER.error("%s", e)
        return 1
    secrets = {"gen": {"api_key"}, "scorer": {"api_key"}}
    LOGGER.debug("Effective configuration: %s", config.model_dump_json(exclude=secrets))

    match args.command:
        case "merge":
            return cmd_merge(args.adapters, config, args.output, alpha=args.lora_alpha, rank=args.lora_rank)
        case "generate":
            return cmd_generate(args.prompts, config, args.output)
        case "decode":
            return cmd_decode(args.input, config, args.output)
        case "eval":
            return cmd_eval(outputs, references, config, args.output)
        case "pipeline":
            return cmd_pipeline(args.input, config, args.output_dir, references)
        case "compare":
            return cmd_compare(args.candidates, config, args.output, args.references)
    raise AssertionError(f"unhandled command {args.command!r}")  # pragma: no cover


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
