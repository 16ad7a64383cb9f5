"""Human-readable full-database text dump and its verification-side parser.

Layout: a version header line, then one section per table in a fixed order.
Each section is a ``TABLE <name>`` line, an RFC 4180 CSV header row, and the
data rows, all CRLF-terminated; sections are separated by one blank line.
Rendering is canonical, so parse(render(db)) -> render is a byte fixed point.
The parser is a verification oracle only: it type-checks cells and rejects
id gaps, but nothing is ever imported into a live store.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .db import Database
from .errors import ParseError

HEADER = "CYNOTE DUMP v1"
FORMAT_VERSION = "v1"

# column name -> type tag: int / int? / str / str? / bool
TABLE_COLUMNS: dict[str, list[tuple[str, str]]] = {
    "notebooks": [
        ("id", "int"), ("title", "str"), ("creator", "str"),
        ("created_utc", "str"), ("archived", "bool"),
    ],
    "entries": [
        ("id", "int"), ("notebook_id", "int"), ("title", "str"),
        ("description", "str"), ("keywords", "str"), ("file_name", "str?"),
        ("file_digest", "str?"), ("file_size", "int?"), ("file_path", "str?"),
        ("author", "str"), ("created_utc", "str"),
    ],
    "comments": [
        ("id", "int"), ("entry_id", "int"), ("text", "str"),
        ("file_name", "str?"), ("file_digest", "str?"), ("file_size", "int?"),
        ("file_path", "str?"), ("author", "str"), ("created_utc", "str"),
    ],
    "notarizations": [
        ("id", "int"), ("entry_id", "int"), ("notary", "str"), ("created_utc", "str"),
    ],
    "results": [
        ("id", "int"), ("owner", "str"), ("kind", "str"), ("payload", "str"),
        ("created_utc", "str"),
    ],
    "users": [
        ("id", "int"), ("username", "str"), ("password_digest", "str"),
        ("salt", "str"), ("iterations", "int"), ("password_changed_utc", "str"),
        ("authorized", "bool"), ("created_utc", "str"),
    ],
    "audit_events": [
        ("id", "int"), ("kind", "str"), ("actor", "str"), ("target", "str?"),
        ("detail", "str"), ("utc", "str"),
    ],
    "signatures": [
        ("id", "int"), ("record_kind", "str"), ("record_id", "int"),
        ("md5", "str"), ("sha1", "str"), ("sha224", "str"), ("sha256", "str"),
        ("sha384", "str"), ("sha512", "str"), ("batch_id", "int"),
        ("generated_utc", "str"), ("actor", "str"),
    ],
}

TABLE_ORDER = tuple(TABLE_COLUMNS)


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    return str(value)


@dataclass
class TextDump:
    """Logical database content as canonical cell strings, per table."""

    tables: dict[str, list[list[str]]] = field(
        default_factory=lambda: {name: [] for name in TABLE_ORDER}
    )
    format_version: str = FORMAT_VERSION

    def to_bytes(self) -> bytes:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\r\n")
        out.write(HEADER + "\r\n")
        for name in TABLE_ORDER:
            out.write("\r\n")
            out.write(f"TABLE {name}\r\n")
            writer.writerow([column for column, _ in TABLE_COLUMNS[name]])
            for row in self.tables[name]:
                writer.writerow(row)
        return out.getvalue().encode("utf-8")

    def typed_rows(self, table: str) -> list[dict]:
        """Rows of one table converted back to Python values."""
        columns = TABLE_COLUMNS[table]
        rows = []
        for raw in self.tables[table]:
            values = {}
            for (column, kind), cell in zip(columns, raw):
                values[column] = _from_cell(cell, kind, table, column)
            rows.append(values)
        return rows


def _from_cell(cell: str, kind: str, table: str, column: str):
    if kind == "int":
        try:
            return int(cell)
        except ValueError:
            raise ParseError(f"{table}.{column}: expected integer, got {cell!r}")
    if kind == "int?":
        if cell == "":
            return None
        try:
            return int(cell)
        except ValueError:
            raise ParseError(f"{table}.{column}: expected integer, got {cell!r}")
    if kind == "bool":
        if cell not in ("0", "1"):
            raise ParseError(f"{table}.{column}: expected 0/1, got {cell!r}")
        return cell == "1"
    if kind == "str?":
        return cell or None
    return cell


def export_text_dump(db: Database) -> TextDump:
    """Read-only snapshot of every table as a TextDump."""
    dump = TextDump()
    with db.read() as cur:
        for name in TABLE_ORDER:
            columns = TABLE_COLUMNS[name]
            select = ", ".join(column for column, _ in columns)
            rows = cur.execute(f"SELECT {select} FROM {name} ORDER BY id").fetchall()
            dump.tables[name] = [
                [_cell(row[column]) for column, _ in columns] for row in rows
            ]
    return dump


def import_text_dump(data: bytes) -> TextDump:
    """Parse and verify a dump; raises ParseError on any malformation."""
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"dump is not valid UTF-8: {exc}") from exc
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        rows = list(reader)
    except csv.Error as exc:
        raise ParseError(f"malformed CSV: {exc}") from exc
    if not rows or rows[0] != [HEADER]:
        raise ParseError(f"missing dump header {HEADER!r}")
    dump = TextDump()
    seen: list[str] = []
    index = 1
    while index < len(rows):
        if rows[index] != []:
            raise ParseError(f"expected blank line before section at row {index + 1}")
        index += 1
        if index >= len(rows):
            raise ParseError("truncated dump: blank line with no following section")
        marker = rows[index]
        if len(marker) != 1 or not marker[0].startswith("TABLE "):
            raise ParseError(f"expected TABLE marker at row {index + 1}")
        name = marker[0][len("TABLE "):]
        if name not in TABLE_COLUMNS:
            raise ParseError(f"unknown table {name!r}")
        if name in seen:
            raise ParseError(f"duplicate table {name!r}")
        seen.append(name)
        index += 1
        expected_header = [column for column, _ in TABLE_COLUMNS[name]]
        if index >= len(rows) or rows[index] != expected_header:
            raise ParseError(f"bad column header for table {name!r}")
        index += 1
        data_rows: list[list[str]] = []
        while index < len(rows) and rows[index] != []:
            row = rows[index]
            if len(row) != len(expected_header):
                raise ParseError(
                    f"{name}: row {index + 1} has {len(row)} cells,"
                    f" expected {len(expected_header)}"
                )
            data_rows.append(row)
            index += 1
        dump.tables[name] = data_rows
    if seen != list(TABLE_ORDER):
        missing = [name for name in TABLE_ORDER if name not in seen]
        raise ParseError(f"truncated dump: missing table(s) {', '.join(missing)}")
    _verify_ids(dump)
    return dump


def _verify_ids(dump: TextDump) -> None:
    """Ids per table must be exactly 1..N; a hole means a forced deletion."""
    for name in TABLE_ORDER:
        ids = [row["id"] for row in dump.typed_rows(name)]
        expected = list(range(1, len(ids) + 1))
        if sorted(ids) != expected:
            holes = sorted(set(range(1, max(ids) + 1)) - set(ids)) if ids else []
            raise ParseError(f"{name}: id sequence has gaps {holes or ids}")
        if ids != expected:
            raise ParseError(f"{name}: rows out of id order")
