"""Convenience facade functions for reading and writing pipeline artifacts."""

import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from dialectmbr.exceptions import AdapterFormatError
from dialectmbr.models.candidates import CandidateSet, SelectionResult
from dialectmbr.models.common import MergeSpace
from dialectmbr.models.tensors import MergeConfig, TaskVector, TensorArchive
from dialectmbr.parser.archive import from_bytes as archive_from_bytes
from dialectmbr.parser.common import ArchiveParserConfiguration
from dialectmbr.parser.jsonl import load_candidates as _load_candidates
from dialectmbr.ties import task_vector_from_archive, task_vector_to_archive, ties_merge
from dialectmbr.writer.archive import ArchiveWriter
from dialectmbr.writer.jsonl import CandidatesWriter, SelectionsWriter

#: The module logger.
LOGGER = logging.getLogger(__name__)

#: File name of the adapter configuration stored next to adapter weights.
ADAPTER_CONFIG_NAME = "adapter_config.json"


def read_archive(path: str | Path, config: ArchiveParserConfiguration | None = None) -> TensorArchive:
    """Read a safetensors archive.

    Args:
        path: Path to the archive.
        config: Optional parser configuration.

    Returns:
        The archive with all tensors widened to F32.
    """
    if config is None:
        config = ArchiveParserConfiguration()
    with open(path, "rb") as inputf:
        data = inputf.read()
    archive = archive_from_bytes(data=data, config=config)
    LOGGER.info("Read archive %s with %d tensors", path, len(archive.tensors))
    return archive


def write_archive(archive: TensorArchive, path: str | Path) -> None:
    """Write ``archive`` to ``path`` as F32 safetensors, replacing the file atomically."""
    ArchiveWriter().write_to_file(archive, path)
    LOGGER.info("Wrote archive %s with %d tensors", path, len(archive.tensors))


def read_adapter_config(archive_path: str | Path) -> dict[str, Any] | None:
    """Read the adapter configuration next to ``archive_path``, if there is one."""
    config_path = Path(archive_path).parent / ADAPTER_CONFIG_NAME
    if not config_path.exists():
        return None
    try:
        with open(config_path, encoding="utf-8") as inputf:
            data = json.load(inputf)
    except json.JSONDecodeError as e:
        raise AdapterFormatError(f"Invalid adapter configuration {config_path}: {e}") from e
    if not isinstance(data, dict):
        raise AdapterFormatError(f"Adapter configuration {config_path} must be a JSON object")
    return data


def read_task_vector(
    path: str | Path,
    space: MergeSpace = MergeSpace.MATERIALIZED,
    *,
    alpha: float | None = None,
    rank: int | None = None,
) -> TaskVector:
    """Read an adapter (or dense task vector) archive as task vector."""
    return task_vector_from_archive(
        read_archive(path), space, alpha=alpha, rank=rank, adapter_config=read_adapter_config(path)
    )


def merge_adapter_files(
    paths: Sequence[str | Path],
    out_path: str | Path,
    config: MergeConfig | None = None,
    *,
    alpha: float | None = None,
    rank: int | None = None,
) -> TaskVector:
    """TIES-merge the adapters in ``paths`` and write the result to ``out_path``."""
    config = config or MergeConfig()
    task_vectors = [read_task_vector(path, config.space, alpha=alpha, rank=rank) for path in paths]
    merged = ties_merge(task_vectors, config)
    write_archive(task_vector_to_archive(merged), out_path)
    return merged


def load_candidates(path: str | Path) -> list[CandidateSet]:
    """Read all candidate sets of a JSONL file."""
    return _load_candidates(path)


def save_candidates(candidate_sets: Iterable[CandidateSet], path: str | Path) -> None:
    """Write candidate sets to a JSONL file."""
    CandidatesWriter().write_to_file(candidate_sets, path)


def save_selections(selections: Iterable[SelectionResult], path: str | Path) -> None:
    """Write selection results to a JSONL file."""
    SelectionsWriter().write_to_file(selections, path)
