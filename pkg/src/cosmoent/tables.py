"""Row tables: deterministic CSV and JSON emission, a rich rendering for terminals, and CSV input.

Every float is written with 17 significant digits in scientific notation, which round-trips an IEEE double exactly, so repeated runs produce byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from typing import TYPE_CHECKING, Any

from loguru import logger
from rich.console import Console
from rich.table import Table

from cosmoent.constants import CSV_COMMENT_PREFIX, NUMBER_FORMAT, OutputFormat
from cosmoent.exceptions import InputParseError

if TYPE_CHECKING:
    from collections.abc import Mapping, Sequence
    from enum import Enum
    from pathlib import Path
    from typing import TypeAlias

    Cell: TypeAlias = float | int | str | bool | Enum | None
    Row: TypeAlias = Mapping[str, Cell]


def format_cell(value: Cell) -> str:
    """Render one cell for CSV or terminal output.

    Args:
        value (Cell): The cell value.

    Returns:
        str: Floats in ``.16e``, enums by value, None as an empty string.

    Examples:
        >>> format_cell(0.5)
        '5.0000000000000000e-01'
        >>> format_cell(True)
        'true'
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, NUMBER_FORMAT)
    if isinstance(value, int | str):
        return str(value)
    return str(value.value)


def _json_cell(value: Cell) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if value is None or isinstance(value, bool | int | float | str):
        return value
    return value.value


def render_csv(rows: Sequence[Row], columns: Sequence[str]) -> str:
    """Render rows as CSV with a header, comma separators and LF line endings.

    Args:
        rows (Sequence[Row]): The rows, each keyed by column name.
        columns (Sequence[str]): Column order.

    Returns:
        str: The CSV document.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def render_json(rows: Sequence[Row], columns: Sequence[str]) -> str:
    """Render rows as a JSON array of objects keyed by the CSV headers.

    Floats keep their shortest round-trip representation; NaN becomes null.

    Args:
        rows (Sequence[Row]): The rows, each keyed by column name.
        columns (Sequence[str]): Key order within each object.

    Returns:
        str: The JSON document, newline-terminated.
    """
    payload = [{column: _json_cell(row.get(column)) for column in columns} for row in rows]
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def render_rich(rows: Sequence[Row], columns: Sequence[str], title: str | None = None) -> Table:
    """Build a rich table of the rows for terminal display.

    Args:
        rows (Sequence[Row]): The rows, each keyed by column name.
        columns (Sequence[str]): Column order.
        title (str | None): Optional table title. Defaults to None.

    Returns:
        Table: The rich table.
    """
    table = Table(title=title)
    for column in columns:
        table.add_column(column, justify="left" if column == "status" else "right")
    for row in rows:
        table.add_row(*(format_cell(row.get(column)) for column in columns))
    return table


def write_table(
    rows: Sequence[Row],
    columns: Sequence[str],
    output_format: OutputFormat,
    output: Path | None = None,
    title: str | None = None,
) -> None:
    """Write rows to stdout or a file in the requested format.

    Args:
        rows (Sequence[Row]): The rows, each keyed by column name.
        columns (Sequence[str]): Column order.
        output_format (OutputFormat): csv, json or table.
        output (Path | None): Write here instead of stdout. Defaults to None.
        title (str | None): Title for the terminal table. Defaults to None.
    """
    if output_format is OutputFormat.TABLE:
        table = render_rich(rows, columns, title=title)
        if output:
            output.parent.mkdir(parents=True, exist_ok=True)
            with output.open("w", encoding="utf-8") as handle:
                Console(file=handle).print(table)
            return
        Console(file=sys.stdout).print(table)
        return

    text = render_json(rows, columns) if output_format is OutputFormat.JSON else render_csv(rows, columns)
    if output:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8", newline="\n")
        logger.debug(f"Wrote {len(rows)} rows to {output}")
        return
    sys.stdout.write(text)


def read_samples(path: Path, columns: tuple[str, str]) -> list[tuple[float, float]]:
    """Read two numeric columns from a CSV file with a header row.

    Lines starting with ``#`` are comments. Extra columns are ignored.

    Args:
        path (Path): The CSV file.
        columns (tuple[str, str]): The two header names to read, e.g. ``("k", "entropy_bits")``.

    Returns:
        list[tuple[float, float]]: One pair per data row, in file order.

    Raises:
        InputParseError: If the file is missing, lacks a required column, or holds a non-numeric cell.
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        msg = f"Cannot read {path}: {e.strerror or e}"
        raise InputParseError(msg) from e

    lines = [
        line
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith(CSV_COMMENT_PREFIX)
    ]
    reader = csv.DictReader(lines)
    header = [name.strip() for name in reader.fieldnames or []]
    missing = [column for column in columns if column not in header]
    if missing:
        msg = f"{path}: missing column(s) {', '.join(missing)}; expected header {','.join(columns)}"
        raise InputParseError(msg)
    reader.fieldnames = header

    pairs: list[tuple[float, float]] = []
    for row_number, record in enumerate(reader, start=1):
        try:
            pairs.append((float(record[columns[0]]), float(record[columns[1]])))
        except (TypeError, ValueError) as e:
            msg = f"{path}: data row {row_number} is not numeric: {record}"
            raise InputParseError(msg) from e

    logger.debug(f"Read {len(pairs)} samples from {path}")
    return pairs
