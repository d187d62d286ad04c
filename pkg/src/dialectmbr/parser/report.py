"""Reader for JSON evaluation reports."""

import json

from pydantic import BaseModel, ConfigDict, ValidationError

from dialectmbr.exceptions import EvaluationException
from dialectmbr.models.common import DisplayScale
from dialectmbr.models.report import EvalReport


class _ReportDocument(BaseModel):
    scale: DisplayScale
    reports: list[dict]

    model_config = ConfigDict(frozen=True)


def parse_report_json(data: bytes) -> list[EvalReport]:
    """Read reports written in JSON format, undoing the display scaling of chrF++.

    Unit scale reads back exactly.  Percent scale was rounded on writing and
    only restores chrF++ to within 1e-12.

    Raises:
        EvaluationException: If ``data`` is not a valid report document.
    """
    try:
        document = _ReportDocument.model_validate(json.loads(data))
        reports = []
        for raw in document.reports:
            if document.scale == DisplayScale.PERCENT:
                raw = {**raw, "chrf_by_direction": {k: v / 100 for k, v in raw.get("chrf_by_direction", {}).items()}}
            reports.append(EvalReport.model_validate(raw))
    except (json.JSONDecodeError, UnicodeDecodeError, ValidationError, AttributeError) as e:
        raise EvaluationException(f"Invalid report document: {e}") from e
    return reports
