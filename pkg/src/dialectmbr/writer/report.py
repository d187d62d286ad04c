"""Writers for evaluation reports and decoding comparisons.

Three formats are supported:

- JSON: the reports as documents, keys sorted, for reading back.
- CSV: one row per (dialect, task) cell.
- TEXT: an aligned table with one row per dialect and one column per task.

Only chrF++ is affected by the display scale; ADI2 always stays in ``[0, 1]``.
"""

import io
import json
from collections.abc import Sequence
from typing import Any

from dialectmbr.models.common import Direction, DisplayScale, ObjectiveKind, ReportFormat
from dialectmbr.models.report import MONOLINGUAL_KEY, ComparisonRow, EvalReport
from dialectmbr.writer.base import Writer, WriterConfiguration

#: Row labels of the decoding comparison table.
OBJECTIVE_LABELS = {
    ObjectiveKind.FIRST: "Standard decoding",
    ObjectiveKind.ADI2: "MBR (ADI2)",
    ObjectiveKind.CHRFPP: "MBR (chrF++)",
    ObjectiveKind.COMBINED: "MBR (ADI2 + chrF++)",
}


def scale_chrf(value: float, scale: DisplayScale) -> float:
    """Display value of a chrF++ score.

    Percent values are rounded to 10 decimals, so reading them back restores
    the unit score to within 1e-12 rather than bit for bit.

    Example:
        >>> scale_chrf(0.4993, DisplayScale.PERCENT)
        49.93
    """
    return round(value * 100, 10) if scale == DisplayScale.PERCENT else value


def format_chrf(value: float | None, scale: DisplayScale) -> str:
    if value is None:
        return ""
    return f"{value * 100:.2f}" if scale == DisplayScale.PERCENT else f"{value:.4f}"


def format_adi2(value: float | None) -> str:
    return "" if value is None else f"{value:.3f}"


def render_table(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    """Align ``rows`` under ``header``, first column left-aligned, others right-aligned."""
    widths = [max(len(row[i]) for row in [header, *rows]) for i in range(len(header))]

    def line(cells: Sequence[str]) -> str:
        padded = [
            cell.ljust(width) if i == 0 else cell.rjust(width)
            for i, (cell, width) in enumerate(zip(cells, widths, strict=True))
        ]
        return "  ".join(padded)

    return "\n".join([line(header), "-" * (sum(widths) + 2 * (len(widths) - 1)), *map(line, rows)]) + "\n"


class _TabularWriter[T](Writer[T]):
    def __init__(
        self,
        fmt: ReportFormat = ReportFormat.JSON,
        scale: DisplayScale = DisplayScale.UNIT,
        config: WriterConfiguration | None = None,
    ) -> None:
        super().__init__(config)
        self.fmt = fmt
        self.scale = scale

    def write_to_bytes(self, obj: T) -> bytes:
        match self.fmt:
            case ReportFormat.JSON:
                text = self._json(obj)
            case ReportFormat.CSV:
                text = self._csv(obj)
            case ReportFormat.TEXT:
                text = self._text(obj)
        return text.encode("utf-8")

    def _dump(self, document: dict[str, Any]) -> str:
        return (
            json.dumps(document, sort_keys=True, indent=self.config.json_indent, ensure_ascii=self.config.ensure_ascii)
            + "\n"
        )

    def _write_csv(self, header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
        output = io.StringIO()
        writer = self._create_csv_writer(output)
        writer.writerow(header)
        writer.writerows(rows)
        return output.getvalue()

    def _json(self, obj: T) -> str:
        raise NotImplementedError  # pragma: no cover

    def _csv(self, obj: T) -> str:
        raise NotImplementedError  # pragma: no cover

    def _text(self, obj: T) -> str:
        raise NotImplementedError  # pragma: no cover


class ReportWriter(_TabularWriter[Sequence[EvalReport]]):
    """Writer for evaluation reports."""

    def _json(self, obj: Sequence[EvalReport]) -> str:
        documents = []
        for report in obj:
            document = report.model_dump(mode="json")
            document["chrf_by_direction"] = {
                key: scale_chrf(value, self.scale) for key, value in document["chrf_by_direction"].items()
            }
            documents.append(document)
        return self._dump({"scale": self.scale.value, "reports": documents})

    def _csv(self, obj: Sequence[EvalReport]) -> str:
        rows = []
        for report in obj:
            if report.mono_adi2 is not None:
                rows.append(
                    [
                        report.dialect,
                        MONOLINGUAL_KEY,
                        format_adi2(report.mono_adi2),
                        "",
                        str(report.counts.get(MONOLINGUAL_KEY, 0)),
                    ]
                )
            for direction in Direction:
                if direction in report.chrf_by_direction:
                    rows.append(
                        [
                            report.dialect,
                            direction.value,
                            format_adi2(report.mt_adi2_by_direction.get(direction)),
                            format_chrf(report.chrf_by_direction[direction], self.scale),
                            str(report.counts.get(direction.value, 0)),
                        ]
                    )
        return self._write_csv(["dialect", "task", "adi2", "chrf", "count"], rows)

    def _text(self, obj: Sequence[EvalReport]) -> str:
        header = ["Dialect", "ADI2", *(direction.label for direction in Direction)]
        rows = [
            [
                report.dialect,
                format_adi2(report.mono_adi2) or "-",
                *(format_chrf(report.chrf_by_direction.get(direction), self.scale) or "-" for direction in Direction),
            ]
            for report in obj
        ]
        return render_table(header, rows)


class ComparisonWriter(_TabularWriter[Sequence[ComparisonRow]]):
    """Writer for decoding strategy comparisons."""

    def _json(self, obj: Sequence[ComparisonRow]) -> str:
        documents = []
        for row in obj:
            document = row.model_dump(mode="json")
            if row.chrf is not None:
                document["chrf"] = scale_chrf(row.chrf, self.scale)
            documents.append(document)
        return self._dump({"scale": self.scale.value, "rows": documents})

    def _csv(self, obj: Sequence[ComparisonRow]) -> str:
        rows = [
            [row.objective.value, format_adi2(row.adi2), format_chrf(row.chrf, self.scale), str(row.count)]
            for row in obj
        ]
        return self._write_csv(["objective", "adi2", "chrf", "count"], rows)

    def _text(self, obj: Sequence[ComparisonRow]) -> str:
        rows = [
            [OBJECTIVE_LABELS[row.objective], format_adi2(row.adi2), format_chrf(row.chrf, self.scale) or "-"]
            for row in obj
        ]
        return render_table(["Decoding", "ADI2", "chrF++"], rows)
