from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from core.errors import OutputError
from logger import logger


class TableWriter(ABC):
    """Backend that turns a column table into a file."""

    extension: str = ""

    @abstractmethod
    def render(self, columns: Sequence[str], rows: Sequence[Sequence[Any]], meta: Dict[str, Any]) -> str:
        """Render the table as text."""
        ...

    def write_table(self, path, columns: Sequence[str], rows: Sequence[Sequence[Any]],
                    meta: Optional[Dict[str, Any]] = None) -> Path:
        """
        Write a table to `path`, adding the backend's extension when missing.

        Args:
            path: Target file.
            columns (Sequence[str]): Column headers.
            rows (Sequence[Sequence[Any]]): Row values, one entry per column.
            meta (Dict[str, Any], optional): Run metadata.

        Returns:
            Path: The file written.

        Raises:
            OutputError: When the file cannot be written.
        """
        path = Path(path)
        if path.suffix != self.extension:
            path = path.with_name(path.name + self.extension)
        for row in rows:
            if len(row) != len(columns):
                raise OutputError(f"row {row!r} does not match {len(columns)} columns")
        text = self.render(list(columns), [list(r) for r in rows], dict(meta or {}))
        self.write_text(path, text)
        logger.debug(f"Wrote {len(rows)} rows to {path}")
        return path

    @staticmethod
    def write_text(path: Path, text: str) -> Path:
        """Write rendered text, creating parent directories; OSError becomes OutputError."""
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            logger.error(f"Error writing {path}: {e}")
            raise OutputError(f"cannot write {path}: {e}") from e
        return path


def column_values(columns: Sequence[str], rows: Sequence[Sequence[Any]], name: str) -> List[Any]:
    try:
        k = list(columns).index(name)
    except ValueError:
        raise OutputError(f"no column {name!r} in {list(columns)}")
    return [row[k] for row in rows]
