from enum import Enum


class ObjectiveKind(str, Enum):
    """Decoding objective used to pick one candidate out of a candidate set."""

    #: Rerank by the reference-free ADI2 dialect fidelity score.
    ADI2 = "adi2"
    #: Pairwise MBR with chrF++ as utility.
    CHRFPP = "chrf"
    #: Convex combination of ADI2 and the expected pairwise chrF++.
    COMBINED = "combined"
    #: Standard decoding baseline: keep the first sample.
    FIRST = "first"


class Dtype(str, Enum):
    """Tensor element types understood by the archive reader."""

    F32 = "F32"
    F16 = "F16"
    BF16 = "BF16"

    @property
    def itemsize(self) -> int:
        """Size of one element in bytes."""
        match self:
            case Dtype.F32:
                return 4
            case Dtype.F16 | Dtype.BF16:
                return 2


class MergeSpace(str, Enum):
    """Parameter space in which adapters are merged."""

    #: Merge the dense deltas ``(alpha / r) * B @ A``.
    MATERIALIZED = "materialized"
    #: Merge the A and B factors independently (approximate).
    FACTOR = "factor"


class KeyPolicy(str, Enum):
    """How to treat differing tensor names across task vectors."""

    #: Merge only the names shared by all task vectors.
    INTERSECT = "intersect"
    #: Fail unless all task vectors have the same names.
    UNION_ERROR = "union_error"


class TaskKind(str, Enum):
    """Kind of evaluation task."""

    MONOLINGUAL = "monolingual"
    TRANSLATION = "translation"


class Direction(str, Enum):
    """Translation direction of an evaluation task."""

    DA_EN = "da-en"
    EN_DA = "en-da"
    DA_MSA = "da-msa"
    MSA_DA = "msa-da"

    @property
    def label(self) -> str:
        """Column label as used in report tables."""
        source, target = self.value.split("-")
        return f"{source.upper()}→{target.upper()}"

    @property
    def targets_dialect(self) -> bool:
        """Whether the output side of this direction is dialectal Arabic."""
        return self.value.endswith("-da")


class DisplayScale(str, Enum):
    """Display scale for chrF++ values in serialized reports."""

    #: Keep scores in ``[0, 1]``.
    UNIT = "unit"
    #: Multiply chrF++ by 100.
    PERCENT = "percent"


class ReportFormat(str, Enum):
    """Serialization format of evaluation reports."""

    JSON = "json"
    CSV = "csv"
    TEXT = "text"


class ChrfAggregate(str, Enum):
    """Corpus-level aggregation of chrF++."""

    #: Sum n-gram statistics over all segments before scoring.
    MICRO = "micro"
    #: Arithmetic mean of sentence-level scores.
    SENTENCE_MEAN = "sentence_mean"
