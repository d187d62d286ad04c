"""Streaming readers for the JSONL files exchanged between pipeline stages.

Every non-blank line holds one JSON object.  Lines are validated against a
record model; any failure is reported with the file path and the 1-based
line number.  Readers are generators so that large corpora are processed in
constant memory.
"""

import json
import logging
from collections.abc import Iterator
from pathlib import Path
from typing import Self

from pydantic import BaseModel, ConfigDict, ValidationError, model_validator

from dialectmbr.exceptions import EmptyCandidatesError, MalformedJsonlError
from dialectmbr.models.candidates import CandidateSet, Prompt, SelectionResult

#: The module logger.
LOGGER = logging.getLogger(__name__)


class CandidatesRecord(BaseModel):
    """One line of a candidates file."""

    prompt_id: str
    source: str
    candidates: list[str]

    model_config = ConfigDict(frozen=True)


class OutputRecord(BaseModel):
    """One line of a system outputs file.

    Selection files (``chosen_text``) and plain output files (``output``) are
    both accepted.
    """

    prompt_id: str | None = None
    chosen_text: str | None = None
    output: str | None = None

    model_config = ConfigDict(frozen=True)

    @model_validator(mode="after")
    def _check_text(self) -> Self:
        if self.chosen_text is None and self.output is None:
            raise ValueError("record needs a 'chosen_text' or 'output' field")
        return self

    @property
    def text(self) -> str:
        """The output text."""
        return self.chosen_text if self.chosen_text is not None else self.output  # type: ignore[return-value]


class ReferenceRecord(BaseModel):
    """One line of a references file."""

    prompt_id: str | None = None
    reference: str

    model_config = ConfigDict(frozen=True)


def _iter_objects(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_no, object)`` for every non-blank line."""
    with open(path, encoding="utf-8") as inputf:
        for line_no, line in enumerate(inputf, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise MalformedJsonlError(str(path), line_no, f"invalid JSON: {e}") from e
            if not isinstance(obj, dict):
                raise MalformedJsonlError(str(path), line_no, f"expected a JSON object, got {type(obj).__name__}")
            yield line_no, obj


def _iter_records[M: BaseModel](path: str | Path, model: type[M]) -> Iterator[tuple[int, M]]:
    for line_no, obj in _iter_objects(path):
        try:
            yield line_no, model.model_validate(obj)
        except ValidationError as e:
            raise MalformedJsonlError(str(path), line_no, f"invalid {model.__name__}: {e}") from e


def iter_prompts(path: str | Path) -> Iterator[Prompt]:
    """Read ``{"prompt_id", "source"}`` records."""
    for _, prompt in _iter_records(path, Prompt):
        yield prompt


def iter_candidate_sets(path: str | Path) -> Iterator[CandidateSet]:
    """Read candidate sets; indices are assigned in file order.

    Raises:
        EmptyCandidatesError: If a record has an empty candidate list.
        MalformedJsonlError: If a line is not a valid candidates record.
    """
    count = 0
    for line_no, record in _iter_records(path, CandidatesRecord):
        if not record.candidates:
            raise EmptyCandidatesError(str(path), line_no, f"prompt {record.prompt_id!r} has no candidates")
        count += 1
        yield CandidateSet.from_texts(record.prompt_id, record.source, record.candidates)
    LOGGER.info("Read %d candidate sets from %s", count, path)


def load_candidates(path: str | Path) -> list[CandidateSet]:
    """Read all candidate sets of a file into a list."""
    return list(iter_candidate_sets(path))


def iter_selections(path: str | Path) -> Iterator[SelectionResult]:
    """Read selection records as written by the decode stage."""
    for _, selection in _iter_records(path, SelectionResult):
        yield selection


def iter_outputs(path: str | Path) -> Iterator[OutputRecord]:
    """Read system outputs (selections or plain ``{"prompt_id", "output"}`` records)."""
    for _, record in _iter_records(path, OutputRecord):
        yield record


def iter_references(path: str | Path) -> Iterator[ReferenceRecord]:
    """Read ``{"prompt_id", "reference"}`` records."""
    for _, record in _iter_records(path, ReferenceRecord):
        yield record


def is_candidates_file(path: str | Path) -> bool:
    """Whether the first record of ``path`` carries a ``candidates`` list (offline decoding input)."""
    for _, obj in _iter_objects(path):
        return "candidates" in obj
    return False
