"""
Module: output
Factory for pluggable table writers.
"""

from core.errors import ConfigError
from output.base import TableWriter
from output.csv_writer import CsvWriter
from output.json_writer import JsonWriter
from output.svg_writer import SvgWriter

WRITERS = {
    "csv": CsvWriter,
    "json": JsonWriter,
    "svg": SvgWriter,
}


def get_writer(fmt: str) -> TableWriter:
    """Return the TableWriter implementation for `fmt` (csv, json or svg)."""

    writer = WRITERS.get(fmt.lower())
    if writer is None:
        raise ConfigError(f"Unsupported output format: {fmt}")
    return writer()
