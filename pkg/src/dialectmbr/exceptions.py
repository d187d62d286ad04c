class DialectMbrException(Exception):
    """Base exception for dialectmbr."""


class ConfigurationException(DialectMbrException):
    """Exception for invalid or incomplete pipeline configuration."""


class ArchiveException(DialectMbrException):
    """Exception for errors related to tensor archive processing."""


class TruncatedArchiveError(ArchiveException):
    """The archive ends before its length prefix or its declared header."""


class MalformedHeaderError(ArchiveException):
    """The archive header is not valid JSON or has invalid entries."""


class DuplicateTensorError(ArchiveException):
    """The archive header declares the same tensor name twice."""


class TensorBoundsError(ArchiveException):
    """A tensor extent lies outside of the payload buffer."""


class OverlappingTensorsError(ArchiveException):
    """Two tensor extents share bytes of the payload buffer."""


class TensorShapeError(ArchiveException):
    """A tensor extent does not match its dtype and shape."""


class AdapterFormatError(ArchiveException):
    """An archive cannot be interpreted as a LoRA adapter or task vector."""


class MergeException(DialectMbrException):
    """Exception for errors while merging task vectors."""


class MergeKeyError(MergeException):
    """The tensor names of the task vectors are incompatible with the key policy."""


class MergeShapeError(MergeException):
    """The same tensor name has different shapes across task vectors."""


class MetricException(DialectMbrException):
    """Exception for errors while computing metrics."""


class ScorerMismatchError(MetricException):
    """A dialect score does not contain the requested target dialect."""


class EmptyCorpusError(MetricException):
    """A corpus-level aggregate was requested over no segments."""


class ObjectiveRangeError(MetricException):
    """An objective input or weight lies outside of ``[0, 1]``."""


class SelectionException(DialectMbrException):
    """Exception for errors while selecting from a candidate set."""


class CandidateScoringError(SelectionException):
    """Scoring a single candidate failed; aborts selection for its set."""

    def __init__(self, prompt_id: str, candidate_index: int, cause: BaseException) -> None:
        super().__init__(f"Scoring candidate {candidate_index} of prompt {prompt_id!r} failed: {cause}")
        #: Prompt whose selection was aborted.
        self.prompt_id = prompt_id
        #: Index of the failing candidate.
        self.candidate_index = candidate_index


class MissingBackendError(SelectionException):
    """The decoding objective needs a backend that is not configured."""


class ClientException(DialectMbrException):
    """Exception for errors talking to external services."""


class GenerationError(ClientException):
    """Base class for failures while sampling candidates."""

    def __init__(self, message: str, *, prompt_id: str, candidate_index: int) -> None:
        super().__init__(f"prompt {prompt_id!r}, candidate {candidate_index}: {message}")
        #: Prompt whose candidate set could not be produced.
        self.prompt_id = prompt_id
        #: Index of the failing candidate request.
        self.candidate_index = candidate_index


class GenerationTransportError(GenerationError):
    """The generation server could not be reached."""


class GenerationStatusError(GenerationError):
    """The generation server answered with a non-success status."""


class MalformedGenerationResponseError(GenerationError):
    """The generation server answered with an unexpected body."""


class ScorerError(ClientException):
    """Base class for dialect scorer failures."""


class ScorerResponseError(ScorerError):
    """The remote scorer answered with a body violating the contract."""


class UnknownDialectError(ScorerError):
    """The scorer is not configured for the requested dialect."""


class JsonlException(DialectMbrException):
    """Exception for errors reading JSONL files."""


class MalformedJsonlError(JsonlException):
    """A JSONL line is not valid JSON or does not match the record schema."""

    def __init__(self, path: str, line_no: int, message: str) -> None:
        super().__init__(f"{path}:{line_no}: {message}")
        #: Path of the offending file.
        self.path = path
        #: 1-based line number.
        self.line_no = line_no


class EmptyCandidatesError(MalformedJsonlError):
    """A candidate record has an empty candidate list."""


class EvaluationException(DialectMbrException):
    """Exception for errors in the evaluation harness."""


class MissingReferencesError(EvaluationException):
    """A translation task was given without references."""


class MisalignedCorpusError(EvaluationException):
    """Outputs and references cannot be aligned."""


class DialectMbrWarning(UserWarning):
    """Base warning for dialectmbr."""


class DtypeWideningWarning(DialectMbrWarning):
    """Warning issued when half-precision tensors are widened to F32 on read."""


class ApproximateMergeWarning(DialectMbrWarning):
    """Warning issued when LoRA factors are merged independently.

    Merging the A and B factors separately is not equivalent to merging the
    materialized deltas.
    """
