"""Writers for archives, JSONL files and reports."""

from dialectmbr.writer.archive import ArchiveWriter
from dialectmbr.writer.base import Writer, WriterConfiguration
from dialectmbr.writer.jsonl import CandidatesWriter, SelectionsWriter
from dialectmbr.writer.report import ComparisonWriter, ReportWriter

__all__ = [
    "ArchiveWriter",
    "CandidatesWriter",
    "ComparisonWriter",
    "ReportWriter",
    "SelectionsWriter",
    "Writer",
    "WriterConfiguration",
]
