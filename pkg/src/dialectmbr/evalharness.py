"""Corpus-level evaluation of system outputs.

Monolingual outputs are scored with the mean ADI2, translation outputs with
chrF++ against references.  Translation outputs whose target side is
dialectal are additionally scored with ADI2.  All per-output scores are
reduced in a fixed order so that results do not depend on parallelism.
"""

import functools
import logging
import math
from collections.abc import Iterable, Sequence

from dialectmbr.exceptions import (
    ConfigurationException,
    EmptyCorpusError,
    MisalignedCorpusError,
    MissingReferencesError,
)
from dialectmbr.mbr import select_with_objective
from dialectmbr.metrics import DialectScorer, adi2, chrfpp_corpus, chrfpp_sentence
from dialectmbr.models.candidates import CandidateSet
from dialectmbr.models.common import ChrfAggregate, DisplayScale, ObjectiveKind, ReportFormat, TaskKind
from dialectmbr.models.metrics import ChrfConfig
from dialectmbr.models.report import ComparisonRow, ConfigFingerprint, EvalReport, EvalTask
from dialectmbr.utils import ordered_map
from dialectmbr.writer.base import WriterConfiguration
from dialectmbr.writer.report import ComparisonWriter, ReportWriter

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: Objectives compared by :func:`compare_objectives`, in table order.
COMPARED_OBJECTIVES = (ObjectiveKind.FIRST, ObjectiveKind.ADI2, ObjectiveKind.CHRFPP, ObjectiveKind.COMBINED)


def eval_monolingual(outputs: Sequence[str], dialect: str, scorer: DialectScorer, *, jobs: int = 1) -> float:
    """Mean ADI2 of ``outputs`` for ``dialect``.

    Raises:
        EmptyCorpusError: If there are no outputs.
    """
    if not outputs:
        raise EmptyCorpusError("Cannot compute corpus ADI2 of no outputs")
    values = list(ordered_map(lambda text: adi2(scorer.score(text, dialect)), outputs, jobs))
    return math.fsum(values) / len(values)


def eval_translation(
    outputs: Sequence[str],
    references: Sequence[str],
    config: ChrfConfig | None = None,
    aggregate: ChrfAggregate = ChrfAggregate.MICRO,
) -> float:
    """Corpus chrF++ of ``outputs`` against aligned ``references``.

    Example:
        >>> eval_translation(["cat", "dog"], ["cat", "dog"])
        1.0

    Raises:
        MisalignedCorpusError: If the lists differ in length.
        EmptyCorpusError: If the lists are empty.
    """
    if len(outputs) != len(references):
        raise MisalignedCorpusError(f"{len(outputs)} outputs but {len(references)} references")
    pairs = list(zip(outputs, references, strict=True))
    if aggregate == ChrfAggregate.MICRO:
        return chrfpp_corpus(pairs, config)
    if not pairs:
        raise EmptyCorpusError("Cannot compute corpus chrF++ of no segments")
    return math.fsum(chrfpp_sentence(hyp, ref, config) for hyp, ref in pairs) / len(pairs)


def build_reports(
    tasks: Iterable[EvalTask],
    *,
    scorer: DialectScorer | None = None,
    chrf_config: ChrfConfig | None = None,
    aggregate: ChrfAggregate = ChrfAggregate.MICRO,
    fingerprint: ConfigFingerprint | None = None,
    jobs: int = 1,
) -> list[EvalReport]:
    """Evaluate ``tasks`` and group the scores into one report per dialect, sorted by dialect.

    Raises:
        ConfigurationException: If a monolingual task is given without scorer.
        MissingReferencesError: If a translation task has no references.
        MisalignedCorpusError: If outputs and references differ in length.
    """
    chrf_config = chrf_config or ChrfConfig()
    fingerprint = fingerprint or ConfigFingerprint(
        chrf=chrf_config, chrf_aggregate=aggregate, scorer_id=scorer.backend_id if scorer else None
    )
    by_dialect: dict[str, dict] = {}
    for task in tasks:
        fields = by_dialect.setdefault(
            task.dialect, {"chrf_by_direction": {}, "mt_adi2_by_direction": {}, "counts": {}}
        )
        fields["counts"][task.key] = len(task.outputs)
        if task.kind == TaskKind.MONOLINGUAL:
            if scorer is None:
                raise ConfigurationException("Monolingual evaluation requires a dialect scorer")
            fields["mono_adi2"] = eval_monolingual(task.outputs, task.dialect, scorer, jobs=jobs)
            LOGGER.info("%s monolingual ADI2: %.4f", task.dialect, fields["mono_adi2"])
            continue

        assert task.direction is not None
        if task.references is None:
            raise MissingReferencesError(f"{task.dialect} {task.direction.label}: translation task without references")
        score = eval_translation(task.outputs, task.references, chrf_config, aggregate)
        fields["chrf_by_direction"][task.direction] = score
        LOGGER.info("%s %s chrF++: %.4f", task.dialect, task.direction.label, score)
        if scorer is not None and task.direction.targets_dialect:
            fields["mt_adi2_by_direction"][task.direction] = eval_monolingual(
                task.outputs, task.dialect, scorer, jobs=jobs
            )

    return [
        EvalReport(dialect=dialect, fingerprint=fingerprint, **fields) for dialect, fields in sorted(by_dialect.items())
    ]


def emit_report(
    reports: Sequence[EvalReport],
    fmt: ReportFormat = ReportFormat.JSON,
    scale: DisplayScale = DisplayScale.UNIT,
    config: WriterConfiguration | None = None,
) -> bytes:
    """Serialize reports; identical inputs give identical bytes."""
    return ReportWriter(fmt, scale, config).write_to_bytes(reports)


def compare_objectives(
    candidate_sets: Sequence[CandidateSet],
    dialect: str,
    scorer: DialectScorer,
    *,
    chrf_config: ChrfConfig | None = None,
    references: Sequence[str] | None = None,
    combined_weight: float = 0.5,
    aggregate: ChrfAggregate = ChrfAggregate.MICRO,
    jobs: int = 1,
) -> list[ComparisonRow]:
    """Score the outputs every decoding objective selects from the same candidate sets.

    Raises:
        MisalignedCorpusError: If ``references`` does not have one entry per candidate set.
    """
    if references is not None and len(references) != len(candidate_sets):
        raise MisalignedCorpusError(f"{len(candidate_sets)} candidate sets but {len(references)} references")
    rows = []
    for objective in COMPARED_OBJECTIVES:
        select = functools.partial(
            select_with_objective,
            objective=objective,
            scorer=scorer,
            dialect=dialect,
            chrf_config=chrf_config,
            combined_weight=combined_weight,
        )
        outputs = [result.chosen_text for result in ordered_map(select, candidate_sets, jobs)]
        rows.append(
            ComparisonRow(
                objective=objective,
                adi2=eval_monolingual(outputs, dialect, scorer, jobs=jobs),
                chrf=eval_translation(outputs, references, chrf_config, aggregate) if references is not None else None,
                count=len(outputs),
            )
        )
        LOGGER.info("Compared objective %s on %d prompts", objective.value, len(outputs))
    return rows


def emit_comparison(
    rows: Sequence[ComparisonRow],
    fmt: ReportFormat = ReportFormat.TEXT,
    scale: DisplayScale = DisplayScale.UNIT,
    config: WriterConfiguration | None = None,
) -> bytes:
    """Serialize a decoding comparison."""
    return ComparisonWriter(fmt, scale, config).write_to_bytes(rows)
