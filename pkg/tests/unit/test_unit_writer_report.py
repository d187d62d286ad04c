"""Unit tests for the report writers."""

import json

import pytest

from dialectmbr.models.common import Direction, DisplayScale, ObjectiveKind, ReportFormat
from dialectmbr.models.report import ComparisonRow, EvalReport
from dialectmbr.writer.base import WriterConfiguration
from dialectmbr.writer.report import ComparisonWriter, ReportWriter, format_adi2, format_chrf, render_table, scale_chrf


class TestFormatting:
    """Tests for value formatting."""

    @pytest.mark.parametrize(
        ("value", "scale", "expected"),
        [
            (0.4993, DisplayScale.PERCENT, 49.93),
            (0.4993, DisplayScale.UNIT, 0.4993),
            (1.0, DisplayScale.PERCENT, 100.0),
        ],
    )
    def test_scale_chrf(self, value: float, scale: DisplayScale, expected: float):
        """Only the percent scale multiplies."""
        assert scale_chrf(value, scale) == expected

    def test_format(self):
        """chrF++ has two decimals in percent, four in unit scale; ADI2 always three."""
        assert format_chrf(0.12346, DisplayScale.PERCENT) == "12.35"
        assert format_chrf(0.12346, DisplayScale.UNIT) == "0.1235"
        assert format_chrf(None, DisplayScale.UNIT) == ""
        assert format_adi2(0.5) == "0.500"
        assert format_adi2(None) == ""

    def test_render_table(self):
        """Columns are padded to their widest cell."""
        table = render_table(["Name", "X"], [["a", "10"], ["bbbbb", "2"]])
        assert table == "Name    X\n---------\na      10\nbbbbb   2\n"


class TestReportWriter:
    """Tests for ReportWriter."""

    def test_adi2_not_scaled(self):
        """The percent scale leaves ADI2 untouched."""
        report = EvalReport(
            dialect="syr",
            mono_adi2=0.25,
            chrf_by_direction={Direction.MSA_DA: 0.5},
            mt_adi2_by_direction={Direction.MSA_DA: 0.125},
        )
        document = json.loads(ReportWriter(ReportFormat.JSON, DisplayScale.PERCENT).write_to_bytes([report]))
        (written,) = document["reports"]
        assert document["scale"] == "percent"
        assert written["mono_adi2"] == 0.25
        assert written["mt_adi2_by_direction"] == {"msa-da": 0.125}
        assert written["chrf_by_direction"] == {"msa-da": 50.0}

    def test_sorted_keys(self):
        """JSON keys are sorted and non-ASCII is kept."""
        report = EvalReport(dialect="شامي")
        data = ReportWriter().write_to_bytes([report])
        assert "شامي".encode() in data
        keys = list(json.loads(data)["reports"][0])
        assert keys == sorted(keys)

    def test_indent(self):
        """The JSON indent is configurable."""
        data = ReportWriter(config=WriterConfiguration(json_indent=None)).write_to_bytes([])
        assert data == b'{"reports": [], "scale": "unit"}\n'

    def test_text_empty_cells(self):
        """A dialect without scores shows dashes."""
        text = ReportWriter(ReportFormat.TEXT).write_to_bytes([EvalReport(dialect="mor")]).decode("utf-8")
        assert text.splitlines()[2].split() == ["mor", "-", "-", "-", "-", "-"]


class TestComparisonWriter:
    """Tests for ComparisonWriter."""

    def test_percent(self):
        """chrF++ is scaled in every format."""
        rows = [ComparisonRow(objective=ObjectiveKind.CHRFPP, adi2=0.5, chrf=0.25, count=3)]
        document = json.loads(ComparisonWriter(ReportFormat.JSON, DisplayScale.PERCENT).write_to_bytes(rows))
        assert document["rows"] == [{"objective": "chrf", "adi2": 0.5, "chrf": 25.0, "count": 3}]
        csv_text = ComparisonWriter(ReportFormat.CSV, DisplayScale.PERCENT).write_to_bytes(rows).decode("utf-8")
        assert csv_text == "objective,adi2,chrf,count\nchrf,0.500,25.00,3\n"
        text = ComparisonWriter(ReportFormat.TEXT, DisplayScale.PERCENT).write_to_bytes(rows).decode("utf-8")
        assert text.splitlines()[2].split() == ["MBR", "(chrF++)", "0.500", "25.00"]

    def test_without_references(self):
        """Rows without chrF++ show a dash in the table."""
        rows = [ComparisonRow(objective=ObjectiveKind.FIRST, adi2=0.1, count=1)]
        text = ComparisonWriter().write_to_bytes(rows).decode("utf-8")
        assert text.splitlines()[2].endswith("-")
