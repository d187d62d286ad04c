"""JSONL writers for candidate sets and selections.

Records are written one per line in input order.  Writing to a file
streams records into a temporary sibling that replaces the target only once
every record has been written.
"""

import json
import logging
from collections.abc import Iterable
from pathlib import Path
from typing import Any

from dialectmbr.models.candidates import CandidateSet, SelectionResult
from dialectmbr.writer.base import Writer, atomic_open

#: The module logger.
LOGGER = logging.getLogger(__name__)


class JsonlWriter[T](Writer[Iterable[T]]):
    """Base class for writers emitting one JSON object per item."""

    def to_record(self, item: T) -> dict[str, Any]:
        """Convert a single item to its JSON object."""
        raise NotImplementedError  # pragma: no cover

    def _line(self, item: T) -> bytes:
        return (json.dumps(self.to_record(item), ensure_ascii=self.config.ensure_ascii) + "\n").encode("utf-8")

    def write_to_bytes(self, obj: Iterable[T]) -> bytes:
        """Render all items as JSONL."""
        return b"".join(self._line(item) for item in obj)

    def write_to_file(self, obj: Iterable[T], file_path: str | Path) -> None:
        """Stream all items to ``file_path``."""
        count = 0
        with atomic_open(file_path) as f:
            for item in obj:
                f.write(self._line(item))
                count += 1
        LOGGER.info("Wrote %d records to %s", count, file_path)


class CandidatesWriter(JsonlWriter[CandidateSet]):
    """Writes ``{"prompt_id", "source", "candidates"}`` records."""

    def to_record(self, item: CandidateSet) -> dict[str, Any]:
        return {"prompt_id": item.prompt_id, "source": item.source, "candidates": item.texts}


class SelectionsWriter(JsonlWriter[SelectionResult]):
    """Writes ``{"prompt_id", "chosen_index", "chosen_text", "scores", "objective"}`` records."""

    def to_record(self, item: SelectionResult) -> dict[str, Any]:
        return item.model_dump(mode="json")
