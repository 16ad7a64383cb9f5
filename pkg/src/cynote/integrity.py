"""Tamper evidence: canonical record bytes, historical multi-hash signatures,
verification, and gapless-numbering checks.

A signature batch walks every entry and comment in one consistent snapshot
and appends one row of six digests (md5, sha1, sha224, sha256, sha384,
sha512) per record, never touching earlier batches. Verification recomputes
the digests from current content and compares against the whole history, so
any post-hoc edit of a signed record shows up as a divergence.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
from typing import Optional, Union

from .db import Database, format_ts, parse_ts
from .errors import NotFoundError, ValidationError
from .models import AuditKind, Comment, Entry, SignatureRecord, VerificationReport
from .store import NotebookStore

FORMAT_VERSION = "v1"
ALGORITHMS = ("md5", "sha1", "sha224", "sha256", "sha384", "sha512")

GAP_CHECK_TABLES = (
    "notebooks",
    "entries",
    "comments",
    "notarizations",
    "results",
    "users",
    "audit_events",
    "signatures",
)


def _escape(value: str) -> str:
    """Keep the line-oriented encoding injective for values with newlines."""
    return (
        value.replace("\\", "\\\\").replace("\n", "\\n").replace("\r", "\\r")
    )


def _keywords_value(keywords) -> str:
    return ",".join(
        str(k).replace("\\", "\\\\").replace(",", "\\,") for k in keywords
    )


class CorruptRowError(Exception):
    """Stored row no longer has the structure the writer produced."""


def _assemble(kind: str, fields: list[tuple[str, str]]) -> bytes:
    lines = [f"{kind} {FORMAT_VERSION}"]
    lines.extend(f"{name}={_escape(value)}" for name, value in fields)
    return "\n".join(lines).encode("utf-8")


def canonical_serialize(record: Union[Entry, Comment]) -> bytes:
    """Deterministic UTF-8 encoding of a persisted record.

    First line is the record kind plus the format version; then one
    field=value line per declared field. Optional attachments contribute
    their content digest only; absent optionals serialize as empty values.
    """
    if isinstance(record, Entry):
        return _assemble("entry", [
            ("id", str(record.id)),
            ("notebook_id", str(record.notebook_id)),
            ("title", record.title),
            ("description", record.description),
            ("keywords", _keywords_value(record.keywords)),
            ("file", record.file.content_digest if record.file else ""),
            ("author", record.author),
            ("created_utc", format_ts(record.created_utc)),
        ])
    if isinstance(record, Comment):
        return _assemble("comment", [
            ("id", str(record.id)),
            ("entry_id", str(record.entry_id)),
            ("text", record.text),
            ("file", record.file.content_digest if record.file else ""),
            ("author", record.author),
            ("created_utc", format_ts(record.created_utc)),
        ])
    raise ValidationError(f"cannot serialize {type(record).__name__}")


def _cell(row: sqlite3.Row, column: str) -> str:
    value = row[column]
    return "" if value is None else str(value)


def _serialize_row(kind: str, row: sqlite3.Row) -> bytes:
    """Canonical bytes straight from stored values.

    Identical to canonical_serialize() for rows the writer produced, but it
    never parses timestamps, so a record whose stored text was corrupted
    out-of-band still serializes (to different bytes) instead of crashing.
    Structural damage that defeats serialization raises CorruptRowError.
    """
    try:
        keywords = None
        if kind == "entry":
            keywords = json.loads(row["keywords"])
            if not isinstance(keywords, list):
                raise CorruptRowError("keywords payload is not a list")
            return _assemble("entry", [
                ("id", _cell(row, "id")),
                ("notebook_id", _cell(row, "notebook_id")),
                ("title", _cell(row, "title")),
                ("description", _cell(row, "description")),
                ("keywords", _keywords_value(keywords)),
                ("file", _cell(row, "file_digest")),
                ("author", _cell(row, "author")),
                ("created_utc", _cell(row, "created_utc")),
            ])
        return _assemble("comment", [
            ("id", _cell(row, "id")),
            ("entry_id", _cell(row, "entry_id")),
            ("text", _cell(row, "text")),
            ("file", _cell(row, "file_digest")),
            ("author", _cell(row, "author")),
            ("created_utc", _cell(row, "created_utc")),
        ])
    except CorruptRowError:
        raise
    except (json.JSONDecodeError, TypeError, KeyError) as exc:
        raise CorruptRowError(str(exc)) from exc


def compute_digests(data: bytes) -> dict[str, str]:
    return {alg: hashlib.new(alg, data).hexdigest() for alg in ALGORITHMS}


class IntegrityService:
    def __init__(self, db: Database, store: NotebookStore):
        self.db = db
        self.store = store

    def generate_signature_batch(self, actor: str) -> int:
        """Sign every entry and comment in the system; returns the batch id."""
        with self.db.write() as cur:
            batch_row = cur.execute(
                "SELECT COALESCE(MAX(batch_id), 0) + 1 AS b FROM signatures"
            ).fetchone()
            batch_id = batch_row["b"]
            records: list[tuple[str, int, bytes]] = []
            for row in cur.execute("SELECT * FROM entries ORDER BY id").fetchall():
                records.append(("entry", row["id"], _serialize_row("entry", row)))
            for row in cur.execute("SELECT * FROM comments ORDER BY id").fetchall():
                records.append(("comment", row["id"], _serialize_row("comment", row)))
            stamp = self.db.stamp()
            for record_kind, record_id, payload in records:
                digests = compute_digests(payload)
                cur.execute(
                    "INSERT INTO signatures (id, record_kind, record_id, md5, sha1,"
                    " sha224, sha256, sha384, sha512, batch_id, generated_utc, actor)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        self.db.next_id(cur, "signatures"),
                        record_kind,
                        record_id,
                        digests["md5"],
                        digests["sha1"],
                        digests["sha224"],
                        digests["sha256"],
                        digests["sha384"],
                        digests["sha512"],
                        batch_id,
                        stamp,
                        actor,
                    ),
                )
            self.db.emit(
                cur,
                AuditKind.SIGNATURE_GENERATION,
                actor,
                str(batch_id),
                f"signed {len(records)} record(s)",
            )
        return batch_id

    def _load_row(self, record_kind: str, record_id: int) -> sqlite3.Row:
        if record_kind not in ("entry", "comment"):
            raise ValidationError(f"unknown record kind {record_kind!r}")
        table = "entries" if record_kind == "entry" else "comments"
        with self.db.read() as cur:
            row = cur.execute(
                f"SELECT * FROM {table} WHERE id = ?", (record_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"{record_kind} {record_id} does not exist")
        return row

    def signatures_for(self, record_kind: str, record_id: int) -> list[SignatureRecord]:
        with self.db.read() as cur:
            rows = cur.execute(
                "SELECT * FROM signatures WHERE record_kind = ? AND record_id = ?"
                " ORDER BY batch_id, id",
                (record_kind, record_id),
            ).fetchall()
        return [
            SignatureRecord(
                r["id"], r["record_kind"], r["record_id"], r["md5"], r["sha1"],
                r["sha224"], r["sha256"], r["sha384"], r["sha512"], r["batch_id"],
                parse_ts(r["generated_utc"]), r["actor"],
            )
            for r in rows
        ]

    def verify_record(self, record_kind: str, record_id: int) -> VerificationReport:
        row = self._load_row(record_kind, record_id)
        history = self.signatures_for(record_kind, record_id)
        if not history:
            return VerificationReport(
                record_kind, record_id, "unsigned", None,
                {alg: False for alg in ALGORITHMS},
            )
        try:
            current = compute_digests(_serialize_row(record_kind, row))
        except CorruptRowError:
            # structure destroyed out-of-band: nothing can match
            return VerificationReport(
                record_kind, record_id, "tampered", history[0].batch_id,
                {alg: False for alg in ALGORITHMS},
            )
        details = {alg: True for alg in ALGORITHMS}
        first_divergent: Optional[int] = None
        for signature in history:
            for alg in ALGORITHMS:
                if getattr(signature, alg) != current[alg]:
                    details[alg] = False
                    if first_divergent is None:
                        first_divergent = signature.batch_id
        status = "consistent" if all(details.values()) else "tampered"
        return VerificationReport(record_kind, record_id, status, first_divergent, details)

    def verify_all(self) -> list[VerificationReport]:
        """Verification report for every entry and comment in id order."""
        reports = []
        with self.db.read() as cur:
            entry_ids = [r["id"] for r in cur.execute("SELECT id FROM entries ORDER BY id")]
            comment_ids = [r["id"] for r in cur.execute("SELECT id FROM comments ORDER BY id")]
        for entry_id in entry_ids:
            reports.append(self.verify_record("entry", entry_id))
        for comment_id in comment_ids:
            reports.append(self.verify_record("comment", comment_id))
        return reports

    def detect_sequence_gaps(self, record_kind: str) -> list[int]:
        """Missing ids {1..max} for one table; non-empty means forced deletion."""
        table = {
            "notebook": "notebooks",
            "entry": "entries",
            "comment": "comments",
            "notarization": "notarizations",
            "result": "results",
            "user": "users",
            "audit_event": "audit_events",
            "signature": "signatures",
        }.get(record_kind, record_kind)
        if table not in GAP_CHECK_TABLES:
            raise ValidationError(f"unknown record kind {record_kind!r}")
        with self.db.read() as cur:
            ids = {r["id"] for r in cur.execute(f"SELECT id FROM {table}").fetchall()}
        if not ids:
            return []
        return sorted(set(range(1, max(ids) + 1)) - ids)
