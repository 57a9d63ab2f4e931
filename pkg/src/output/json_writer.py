import json
from typing import Any, Dict, List

from output.base import TableWriter


class JsonWriter(TableWriter):
    extension = ".json"

    def render(self, columns: List[str], rows: List[List[Any]], meta: Dict[str, Any]) -> str:
        document = {
            "meta": meta,
            "columns": columns,
            "rows": [dict(zip(columns, row)) for row in rows],
        }
        return json.dumps(document, sort_keys=True, indent=2) + "\n"
