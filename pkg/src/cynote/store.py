"""Append-only notebook content store.

Notebooks, entries, comments, notarizations, and analysis results are only
ever inserted; the single mutable bit in the whole module is a notebook's
archived flag. Every successful mutation writes exactly one audit event in
the same transaction.
"""

from __future__ import annotations

import hashlib
import json
import sqlite3
from pathlib import Path
from typing import Iterable, Optional

from .db import Database, parse_ts
from .errors import (
    ArchivedNotebookError,
    NotFoundError,
    UnsupportedKindError,
    ValidationError,
)
from .models import (
    AnalysisResult,
    AuditKind,
    Comment,
    Entry,
    FileAttachment,
    Notarization,
    Notebook,
)

RESULT_KINDS = ("primer", "sequence")


def _notebook_from_row(row: sqlite3.Row) -> Notebook:
    return Notebook(
        id=row["id"],
        title=row["title"],
        creator=row["creator"],
        created_utc=parse_ts(row["created_utc"]),
        archived=bool(row["archived"]),
    )


def _file_from_row(row: sqlite3.Row) -> Optional[FileAttachment]:
    if row["file_name"] is None:
        return None
    return FileAttachment(
        filename=row["file_name"],
        content_digest=row["file_digest"],
        size_bytes=row["file_size"],
        stored_path=row["file_path"],
    )


def _entry_from_row(row: sqlite3.Row) -> Entry:
    return Entry(
        id=row["id"],
        notebook_id=row["notebook_id"],
        title=row["title"],
        description=row["description"],
        keywords=tuple(json.loads(row["keywords"])),
        file=_file_from_row(row),
        author=row["author"],
        created_utc=parse_ts(row["created_utc"]),
    )


def _comment_from_row(row: sqlite3.Row) -> Comment:
    return Comment(
        id=row["id"],
        entry_id=row["entry_id"],
        text=row["text"],
        file=_file_from_row(row),
        author=row["author"],
        created_utc=parse_ts(row["created_utc"]),
    )


class NotebookStore:
    def __init__(self, db: Database, files_dir: str | Path):
        self.db = db
        self.files_dir = Path(files_dir)

    # -- attachments --------------------------------------------------

    def save_attachment(self, filename: str, data: bytes) -> FileAttachment:
        """Store bytes content-addressed by SHA-256; originals never rewritten."""
        if not filename.strip():
            raise ValidationError("attachment filename must be non-empty", fields=["file"])
        digest = hashlib.sha256(data).hexdigest()
        relative = f"{digest[:2]}/{digest}"
        target = self.files_dir / relative
        if not target.exists():
            target.parent.mkdir(parents=True, exist_ok=True)
            tmp = target.with_suffix(".tmp")
            tmp.write_bytes(data)
            tmp.replace(target)
        return FileAttachment(
            filename=filename,
            content_digest=digest,
            size_bytes=len(data),
            stored_path=relative,
        )

    def read_attachment(self, attachment: FileAttachment) -> bytes:
        return (self.files_dir / attachment.stored_path).read_bytes()

    # -- notebooks ----------------------------------------------------

    def create_notebook(self, title: str, creator: str) -> Notebook:
        if not title.strip():
            raise ValidationError("notebook title must be non-empty", fields=["title"])
        with self.db.write() as cur:
            notebook_id = self.db.next_id(cur, "notebooks")
            stamp = self.db.stamp()
            cur.execute(
                "INSERT INTO notebooks (id, title, creator, created_utc, archived)"
                " VALUES (?, ?, ?, ?, 0)",
                (notebook_id, title, creator, stamp),
            )
            self.db.emit(cur, AuditKind.NEW_NOTEBOOK, creator, str(notebook_id), title)
        return Notebook(notebook_id, title, creator, parse_ts(stamp), False)

    def get_notebook(self, notebook_id: int) -> Notebook:
        with self.db.read() as cur:
            row = cur.execute(
                "SELECT * FROM notebooks WHERE id = ?", (notebook_id,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"notebook {notebook_id} does not exist")
        return _notebook_from_row(row)

    def list_notebooks(self) -> list[Notebook]:
        with self.db.read() as cur:
            rows = cur.execute("SELECT * FROM notebooks ORDER BY id").fetchall()
        return [_notebook_from_row(r) for r in rows]

    def set_archive_state(self, notebook_id: int, archived: bool, actor: str) -> Notebook:
        with self.db.write() as cur:
            row = cur.execute(
                "SELECT * FROM notebooks WHERE id = ?", (notebook_id,)
            ).fetchone()
            if row is None:
                raise NotFoundError(f"notebook {notebook_id} does not exist")
            cur.execute(
                "UPDATE notebooks SET archived = ? WHERE id = ?",
                (1 if archived else 0, notebook_id),
            )
            kind = AuditKind.ARCHIVE if archived else AuditKind.UNARCHIVE
            self.db.emit(cur, kind, actor, str(notebook_id), row["title"])
        return self.get_notebook(notebook_id)

    # -- entries ------------------------------------------------------

    def create_entry(
        self,
        notebook_id: int,
        title: str,
        description: str,
        keywords: Iterable[str] = (),
        file: Optional[FileAttachment] = None,
        author: str = "",
    ) -> Entry:
        missing = [
            name
            for name, value in (("title", title), ("description", description))
            if not str(value).strip()
        ]
        if missing:
            raise ValidationError(
                f"required fields missing: {', '.join(missing)}", fields=missing
            )
        keyword_list = [str(k) for k in keywords]
        with self.db.write() as cur:
            notebook = cur.execute(
                "SELECT * FROM notebooks WHERE id = ?", (notebook_id,)
            ).fetchone()
            if notebook is None:
                raise NotFoundError(f"notebook {notebook_id} does not exist")
            if notebook["archived"]:
                raise ArchivedNotebookError(
                    f"notebook {notebook_id} is archived and locked against insertion"
                )
            entry_id = self.db.next_id(cur, "entries")
            stamp = self.db.stamp()
            cur.execute(
                "INSERT INTO entries (id, notebook_id, title, description, keywords,"
                " file_name, file_digest, file_size, file_path, author, created_utc)"
                " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    entry_id,
                    notebook_id,
                    title,
                    description,
                    json.dumps(keyword_list),
                    file.filename if file else None,
                    file.content_digest if file else None,
                    file.size_bytes if file else None,
                    file.stored_path if file else None,
                    author,
                    stamp,
                ),
            )
            self.db.emit(cur, AuditKind.NEW_ENTRY, author, str(entry_id), title)
        return Entry(
            entry_id, notebook_id, title, description, tuple(keyword_list),
            file, author, parse_ts(stamp),
        )

    def get_entry(self, entry_id: int) -> Entry:
        with self.db.read() as cur:
            row = cur.execute("SELECT * FROM entries WHERE id = ?", (entry_id,)).fetchone()
        if row is None:
            raise NotFoundError(f"entry {entry_id} does not exist")
        return _entry_from_row(row)

    def list_entries(self, notebook_id: Optional[int] = None) -> list[Entry]:
        """Reverse chronological; equal stamps break toward the higher id."""
        query = "SELECT * FROM entries"
        args: tuple = ()
        if notebook_id is not None:
            self.get_notebook(notebook_id)
            query += " WHERE notebook_id = ?"
            args = (notebook_id,)
        query += " ORDER BY created_utc DESC, id DESC"
        with self.db.read() as cur:
            rows = cur.execute(query, args).fetchall()
        return [_entry_from_row(r) for r in rows]

    def table_of_contents(self, notebook_id: int) -> list[tuple[int, str, str]]:
        self.get_notebook(notebook_id)
        with self.db.read() as cur:
            rows = cur.execute(
                "SELECT id, title, created_utc FROM entries"
                " WHERE notebook_id = ? ORDER BY id",
                (notebook_id,),
            ).fetchall()
        return [(r["id"], r["title"], r["created_utc"]) for r in rows]

    # -- comments -----------------------------------------------------

    def create_comment(
        self,
        entry_id: int,
        text: str,
        file: Optional[FileAttachment] = None,
        author: str = "",
    ) -> Comment:
        if not text.strip():
            raise ValidationError("comment text must be non-empty", fields=["text"])
        with self.db.write() as cur:
            entry = cur.execute(
                "SELECT * FROM entries WHERE id = ?", (entry_id,)
            ).fetchone()
            if entry is None:
                raise NotFoundError(f"entry {entry_id} does not exist")
            notebook = cur.execute(
                "SELECT * FROM notebooks WHERE id = ?", (entry["notebook_id"],)
            ).fetchone()
            if notebook["archived"]:
                raise ArchivedNotebookError(
                    f"notebook {notebook['id']} is archived and locked against insertion"
                )
            comment_id = self.db.next_id(cur, "comments")
            stamp = self.db.stamp()
            cur.execute(
                "INSERT INTO comments (id, entry_id, text, file_name, file_digest,"
                " file_size, file_path, author, created_utc)"
                " VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (
                    comment_id,
                    entry_id,
                    text,
                    file.filename if file else None,
                    file.content_digest if file else None,
                    file.size_bytes if file else None,
                    file.stored_path if file else None,
                    author,
                    stamp,
                ),
            )
            self.db.emit(cur, AuditKind.NEW_COMMENT, author, str(comment_id), f"entry {entry_id}")
        return Comment(comment_id, entry_id, text, file, author, parse_ts(stamp))

    def get_comment(self, comment_id: int) -> Comment:
        with self.db.read() as cur:
            row = cur.execute("SELECT * FROM comments WHERE id = ?", (comment_id,)).fetchone()
        if row is None:
            raise NotFoundError(f"comment {comment_id} does not exist")
        return _comment_from_row(row)

    def list_comments(self, entry_id: int) -> list[Comment]:
        self.get_entry(entry_id)
        with self.db.read() as cur:
            rows = cur.execute(
                "SELECT * FROM comments WHERE entry_id = ? ORDER BY id", (entry_id,)
            ).fetchall()
        return [_comment_from_row(r) for r in rows]

    # -- notarizations ------------------------------------------------

    def notarize_entry(self, entry_id: int, notary: str) -> Notarization:
        with self.db.write() as cur:
            entry = cur.execute(
                "SELECT id FROM entries WHERE id = ?", (entry_id,)
            ).fetchone()
            if entry is None:
                raise NotFoundError(f"entry {entry_id} does not exist")
            notarization_id = self.db.next_id(cur, "notarizations")
            stamp = self.db.stamp()
            cur.execute(
                "INSERT INTO notarizations (id, entry_id, notary, created_utc)"
                " VALUES (?, ?, ?, ?)",
                (notarization_id, entry_id, notary, stamp),
            )
            self.db.emit(cur, AuditKind.NOTARIZE, notary, str(entry_id), f"entry {entry_id}")
        return Notarization(notarization_id, entry_id, notary, parse_ts(stamp))

    def list_notarizations(self, entry_id: int) -> list[Notarization]:
        with self.db.read() as cur:
            rows = cur.execute(
                "SELECT * FROM notarizations WHERE entry_id = ? ORDER BY id", (entry_id,)
            ).fetchall()
        return [
            Notarization(r["id"], r["entry_id"], r["notary"], parse_ts(r["created_utc"]))
            for r in rows
        ]

    # -- analysis results ----------------------------------------------

    def store_result(
        self, owner: str, kind: str, payload: Iterable[tuple[str, str]]
    ) -> AnalysisResult:
        if kind not in RESULT_KINDS:
            raise UnsupportedKindError(
                f"results of kind {kind!r} are not persisted"
            )
        pairs = [(str(k), str(v)) for k, v in payload]
        if not pairs:
            raise ValidationError("result payload must be non-empty", fields=["payload"])
        with self.db.write() as cur:
            result_id = self.db.next_id(cur, "results")
            stamp = self.db.stamp()
            cur.execute(
                "INSERT INTO results (id, owner, kind, payload, created_utc)"
                " VALUES (?, ?, ?, ?, ?)",
                (result_id, owner, kind, json.dumps(pairs), stamp),
            )
            self.db.emit(cur, AuditKind.RESULT_STORED, owner, str(result_id), kind)
        return AnalysisResult(
            result_id, owner, kind, tuple((k, v) for k, v in pairs), parse_ts(stamp)
        )

    def list_results(self, owner: str) -> list[AnalysisResult]:
        with self.db.read() as cur:
            rows = cur.execute(
                "SELECT * FROM results WHERE owner = ? ORDER BY id", (owner,)
            ).fetchall()
        return [
            AnalysisResult(
                r["id"],
                r["owner"],
                r["kind"],
                tuple((k, v) for k, v in json.loads(r["payload"])),
                parse_ts(r["created_utc"]),
            )
            for r in rows
        ]
