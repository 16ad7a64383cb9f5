"""Embedded storage engine behind the append-only contract.

One SQLite file, one writer. Every mutating operation runs inside a single
transaction that also writes its audit event, so content and log can never
drift. Identifiers are assigned as MAX(id)+1 inside that transaction, which
keeps each table's ids a contiguous 1..N sequence. Timestamps are clamped
monotonically non-decreasing against everything already persisted.
"""

from __future__ import annotations

import sqlite3
import threading
from contextlib import contextmanager
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Optional

from .models import AuditKind

_SCHEMA = """
CREATE TABLE IF NOT EXISTS notebooks (
    id INTEGER PRIMARY KEY,
    title TEXT NOT NULL,
    creator TEXT NOT NULL,
    created_utc TEXT NOT NULL,
    archived INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS entries (
    id INTEGER PRIMARY KEY,
    notebook_id INTEGER NOT NULL,
    title TEXT NOT NULL,
    description TEXT NOT NULL,
    keywords TEXT NOT NULL,
    file_name TEXT,
    file_digest TEXT,
    file_size INTEGER,
    file_path TEXT,
    author TEXT NOT NULL,
    created_utc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS comments (
    id INTEGER PRIMARY KEY,
    entry_id INTEGER NOT NULL,
    text TEXT NOT NULL,
    file_name TEXT,
    file_digest TEXT,
    file_size INTEGER,
    file_path TEXT,
    author TEXT NOT NULL,
    created_utc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS notarizations (
    id INTEGER PRIMARY KEY,
    entry_id INTEGER NOT NULL,
    notary TEXT NOT NULL,
    created_utc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS results (
    id INTEGER PRIMARY KEY,
    owner TEXT NOT NULL,
    kind TEXT NOT NULL,
    payload TEXT NOT NULL,
    created_utc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS users (
    id INTEGER PRIMARY KEY,
    username TEXT NOT NULL UNIQUE,
    password_digest TEXT NOT NULL,
    salt TEXT NOT NULL,
    iterations INTEGER NOT NULL,
    password_changed_utc TEXT NOT NULL,
    authorized INTEGER NOT NULL,
    created_utc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS audit_events (
    id INTEGER PRIMARY KEY,
    kind TEXT NOT NULL,
    actor TEXT NOT NULL,
    target TEXT,
    detail TEXT NOT NULL,
    utc TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS signatures (
    id INTEGER PRIMARY KEY,
    record_kind TEXT NOT NULL,
    record_id INTEGER NOT NULL,
    md5 TEXT NOT NULL,
    sha1 TEXT NOT NULL,
    sha224 TEXT NOT NULL,
    sha256 TEXT NOT NULL,
    sha384 TEXT NOT NULL,
    sha512 TEXT NOT NULL,
    batch_id INTEGER NOT NULL,
    generated_utc TEXT NOT NULL,
    actor TEXT NOT NULL
);
"""

CONTENT_TABLES = (
    "notebooks",
    "entries",
    "comments",
    "notarizations",
    "results",
    "users",
    "audit_events",
    "signatures",
)

_TS_COLUMNS = {
    "notebooks": "created_utc",
    "entries": "created_utc",
    "comments": "created_utc",
    "notarizations": "created_utc",
    "results": "created_utc",
    "users": "created_utc",
    "audit_events": "utc",
    "signatures": "generated_utc",
}

TS_FORMAT = "%Y-%m-%dT%H:%M:%S.%fZ"


def format_ts(dt: datetime) -> str:
    """ISO-8601 UTC with fixed six-digit microseconds and trailing Z."""
    if dt.tzinfo is not None:
        dt = dt.astimezone(timezone.utc).replace(tzinfo=None)
    return dt.strftime("%Y-%m-%dT%H:%M:%S") + f".{dt.microsecond:06d}Z"


def parse_ts(text: str) -> datetime:
    return datetime.strptime(text, TS_FORMAT)


def _utcnow() -> datetime:
    return datetime.now(timezone.utc).replace(tzinfo=None)


class Database:
    """Single-writer SQLite wrapper with atomic append+audit transactions."""

    def __init__(self, path: str | Path, clock: Callable[[], datetime] | None = None):
        self.path = Path(path)
        if self.path.parent and str(self.path.parent) not in (".", ""):
            self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._clock = clock or _utcnow
        self._conn = sqlite3.connect(str(self.path), check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.isolation_level = None  # explicit transactions
        try:
            self._conn.execute("PRAGMA journal_mode=WAL")
        except sqlite3.OperationalError:
            pass  # filesystem without shared-memory support
        self._conn.execute("PRAGMA synchronous=FULL")
        self._conn.executescript(_SCHEMA)
        self._last_stamp = self._max_persisted_stamp()

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    def _max_persisted_stamp(self) -> str:
        latest = ""
        for table, column in _TS_COLUMNS.items():
            row = self._conn.execute(f"SELECT MAX({column}) AS m FROM {table}").fetchone()
            if row["m"] and row["m"] > latest:
                latest = row["m"]
        return latest

    def stamp(self) -> str:
        """Next timestamp, clamped so stored stamps never decrease."""
        now = format_ts(self._clock())
        if now < self._last_stamp:
            now = self._last_stamp
        self._last_stamp = now
        return now

    @contextmanager
    def write(self):
        """Serialized transaction; commits on success, rolls back on error."""
        with self._lock:
            cur = self._conn.cursor()
            cur.execute("BEGIN IMMEDIATE")
            try:
                yield cur
            except BaseException:
                self._conn.rollback()
                raise
            else:
                self._conn.commit()
            finally:
                cur.close()

    @contextmanager
    def read(self):
        with self._lock:
            cur = self._conn.cursor()
            try:
                yield cur
            finally:
                cur.close()

    @staticmethod
    def next_id(cur: sqlite3.Cursor, table: str) -> int:
        row = cur.execute(f"SELECT COALESCE(MAX(id), 0) + 1 AS n FROM {table}").fetchone()
        return row["n"]

    def emit(
        self,
        cur: sqlite3.Cursor,
        kind: AuditKind,
        actor: str,
        target: Optional[str],
        detail: str,
        stamp: Optional[str] = None,
    ) -> int:
        event_id = self.next_id(cur, "audit_events")
        cur.execute(
            "INSERT INTO audit_events (id, kind, actor, target, detail, utc)"
            " VALUES (?, ?, ?, ?, ?, ?)",
            (event_id, kind.value, actor, target, detail, stamp or self.stamp()),
        )
        return event_id
