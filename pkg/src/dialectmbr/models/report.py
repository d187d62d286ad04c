"""Evaluation tasks and the per-dialect reports produced from them."""

from typing import Annotated, Self

from pydantic import BaseModel, ConfigDict, Field, model_validator

from dialectmbr.models.common import ChrfAggregate, Direction, ObjectiveKind, TaskKind
from dialectmbr.models.metrics import ChrfConfig

#: A score in ``[0, 1]``.
UnitScore = Annotated[float, Field(ge=0.0, le=1.0)]

#: Key of the monolingual task in :attr:`EvalReport.counts`.
MONOLINGUAL_KEY = "monolingual"


class EvalTask(BaseModel):
    """System outputs of one task for one dialect."""

    #: Monolingual generation or translation.
    kind: TaskKind
    #: Translation direction, only for translation tasks.
    direction: Direction | None = None
    #: Target or source dialect label.
    dialect: str
    #: System outputs, one per prompt.
    outputs: list[str]
    #: References aligned with ``outputs``, needed for translation tasks.
    references: list[str] | None = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_direction(self) -> Self:
        if (self.kind == TaskKind.TRANSLATION) != (self.direction is not None):
            raise ValueError("translation tasks need a direction, monolingual tasks must not have one")
        return self

    @property
    def key(self) -> str:
        """Name of the task in report counts."""
        return self.direction.value if self.direction is not None else MONOLINGUAL_KEY


class ConfigFingerprint(BaseModel):
    """Configuration that produced the evaluated outputs."""

    #: Decoding objective of the outputs, if known.
    objective: ObjectiveKind | None = None
    #: Number of sampled candidates per prompt, if known.
    num_candidates: int | None = None
    #: Weight of ADI2 in the combined objective, if used.
    combined_weight: float | None = None
    #: TIES trim fraction of the merged adapter, if known.
    trim_fraction: float | None = None
    #: TIES scale of the merged adapter, if known.
    merge_lambda: float | None = None
    #: chrF++ parameters used for evaluation.
    chrf: ChrfConfig = Field(default_factory=ChrfConfig)
    #: Corpus aggregation of chrF++.
    chrf_aggregate: ChrfAggregate = ChrfAggregate.MICRO
    #: Identifier of the dialect scorer backend.
    scorer_id: str | None = None

    model_config = ConfigDict(frozen=True)


class EvalReport(BaseModel):
    """Scores of all tasks of one dialect.

    All scores are in ``[0, 1]``; display scaling is applied only when
    serializing.
    """

    #: Dialect label.
    dialect: str
    #: Corpus ADI2 of the monolingual outputs.
    mono_adi2: UnitScore | None = None
    #: Corpus chrF++ per translation direction.
    chrf_by_direction: dict[Direction, UnitScore] = Field(default_factory=dict)
    #: Corpus ADI2 of translation outputs whose target side is dialectal.
    mt_adi2_by_direction: dict[Direction, UnitScore] = Field(default_factory=dict)
    #: Number of evaluated outputs per task key.
    counts: dict[str, int] = Field(default_factory=dict)
    #: Configuration fingerprint.
    fingerprint: ConfigFingerprint = Field(default_factory=ConfigFingerprint)

    model_config = ConfigDict(frozen=True)


class ComparisonRow(BaseModel):
    """Corpus scores of the outputs selected with one decoding objective."""

    #: Decoding objective used for selection.
    objective: ObjectiveKind
    #: Corpus ADI2 of the selected outputs.
    adi2: UnitScore
    #: Corpus chrF++ of the selected outputs against references, if given.
    chrf: UnitScore | None = None
    #: Number of prompts.
    count: int

    model_config = ConfigDict(frozen=True)
