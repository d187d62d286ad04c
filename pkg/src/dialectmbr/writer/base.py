"""Base classes for writers."""

import contextlib
import csv
import io
import os
import tempfile
from abc import ABC, abstractmethod
from collections.abc import Iterator
from pathlib import Path
from typing import Any, BinaryIO

from pydantic import BaseModel, ConfigDict, Field


class WriterConfiguration(BaseModel):
    """Configuration options for writers.

    Controls the textual outputs (JSON, JSONL, CSV); binary archives ignore
    these settings.
    """

    #: Indentation of JSON documents, ``None`` for a single line.
    json_indent: int | None = Field(default=2, description="Indentation of JSON documents")

    #: Whether non-ASCII characters are escaped in JSON output.
    ensure_ascii: bool = Field(default=False, description="Escape non-ASCII characters in JSON")

    #: CSV dialect settings.
    csv_dialect: str = Field(default="excel", description="CSV dialect to use")

    #: Quoting behavior for CSV fields.
    quoting: int = Field(default=csv.QUOTE_MINIMAL, description="CSV quoting behavior")

    #: Line terminator to use.
    lineterminator: str = Field(default="\n", description="Line terminator")

    model_config = ConfigDict(frozen=True)


class Writer[T](ABC):
    """Abstract base class for writers.

    Subclasses render one kind of object to bytes; this class adds writing
    to files.  Files are written to a temporary sibling and moved into
    place, so readers never observe a partially written output.
    """

    def __init__(self, config: WriterConfiguration | None = None) -> None:
        """Initialize the writer with configuration.

        Args:
            config: Writer configuration. If None, default configuration is used.
        """
        self.config = config or WriterConfiguration()

    @abstractmethod
    def write_to_bytes(self, obj: T) -> bytes:
        """Render ``obj``.

        Args:
            obj: The object to write.

        Returns:
            The serialized content.
        """
        raise NotImplementedError  # pragma: no cover

    def write_to_file(self, obj: T, file_path: str | Path) -> None:
        """Write ``obj`` to a file.

        Args:
            obj: The object to write.
            file_path: Path to the output file.
        """
        atomic_write(file_path, self.write_to_bytes(obj))

    def _create_csv_writer(self, output: io.StringIO) -> Any:
        """Create a CSV writer with the configured dialect.

        Args:
            output: The string buffer to write to.

        Returns:
            A configured CSV writer.
        """
        return csv.writer(
            output,
            dialect=self.config.csv_dialect,
            quoting=self.config.quoting,  # type: ignore[arg-type]
            lineterminator=self.config.lineterminator,
        )


@contextlib.contextmanager
def atomic_open(file_path: str | Path) -> Iterator[BinaryIO]:
    """Open a temporary file next to ``file_path`` that replaces it on successful exit."""
    path = Path(file_path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            yield f
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def atomic_write(file_path: str | Path, content: bytes) -> None:
    """Write ``content`` to ``file_path`` atomically."""
    with atomic_open(file_path) as f:
        f.write(content)
