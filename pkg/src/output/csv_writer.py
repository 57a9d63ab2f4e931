import csv
import io
from typing import Any, Dict, List

from output.base import TableWriter


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if value is None:
        return ""
    return str(value)


class CsvWriter(TableWriter):
    """Comma separated table; floats use repr so values re-parse exactly."""

    extension = ".csv"

    def render(self, columns: List[str], rows: List[List[Any]], meta: Dict[str, Any]) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_cell(v) for v in row])
        return buffer.getvalue()
