"""Timestamped backup of the text dump plus attachments to a remote store.

Two transports: real FTP (passive mode) and a local-directory stand-in with
the same surface, so the full path is exercisable without a server. Nothing
local is ever modified by a backup; a transport fault surfaces as a
BackupError naming whatever was uploaded before the failure.
"""

from __future__ import annotations

import ftplib
import io
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Protocol

from .config import BackupConfig
from .db import Database, parse_ts
from .dump import export_text_dump
from .errors import BackupError
from .models import AuditKind

REMOTE_DIR = "cynote_database"


@dataclass(frozen=True)
class BackupManifest:
    remote_dir: str
    dump_name: str
    attachment_names: list[str]
    created_utc: datetime


class BackupTransport(Protocol):
    def ensure_dir(self, path: str) -> None: ...

    def upload(self, path: str, data: bytes) -> None: ...

    def close(self) -> None: ...


class LocalDirTransport:
    """Filesystem transport used for tests and offline deployments."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def ensure_dir(self, path: str) -> None:
        (self.root / path).mkdir(parents=True, exist_ok=True)

    def upload(self, path: str, data: bytes) -> None:
        target = self.root / path
        target.parent.mkdir(parents=True, exist_ok=True)
        target.write_bytes(data)

    def close(self) -> None:
        pass


class FtpTransport:
    """RFC 959 client in passive mode; directories created as needed."""

    def __init__(self, host: str, port: int, user: str, password: str, ftp_factory=ftplib.FTP):
        self._ftp = ftp_factory()
        self._ftp.connect(host, port)
        self._ftp.login(user=user, passwd=password)
        self._ftp.set_pasv(True)

    def ensure_dir(self, path: str) -> None:
        for part in self._walk(path):
            try:
                self._ftp.mkd(part)
            except ftplib.error_perm:
                pass  # already exists

    def upload(self, path: str, data: bytes) -> None:
        parent = path.rsplit("/", 1)[0] if "/" in path else ""
        if parent:
            self.ensure_dir(parent)
        self._ftp.storbinary(f"STOR {path}", io.BytesIO(data))

    def close(self) -> None:
        try:
            self._ftp.quit()
        except ftplib.all_errors:
            self._ftp.close()

    @staticmethod
    def _walk(path: str) -> list[str]:
        parts = []
        current = ""
        for piece in path.split("/"):
            current = f"{current}/{piece}" if current else piece
            parts.append(current)
        return parts


def make_transport(config: BackupConfig) -> BackupTransport:
    if config.mode == "localdir":
        return LocalDirTransport(config.local_path)
    return FtpTransport(config.host, config.port, config.user, config.password)


class BackupService:
    def __init__(self, db: Database, files_dir: str | Path):
        self.db = db
        self.files_dir = Path(files_dir)
        self._last_stamp = ""

    def _next_stamp(self) -> str:
        """Second-resolution UTC stamp, forced strictly increasing."""
        stamp = parse_ts(self.db.stamp()).strftime("%Y%m%d%H%M%S")
        if self._last_stamp and stamp <= self._last_stamp:
            bumped = datetime.strptime(self._last_stamp, "%Y%m%d%H%M%S") + timedelta(seconds=1)
            stamp = bumped.strftime("%Y%m%d%H%M%S")
        self._last_stamp = stamp
        return stamp

    def _attachments(self) -> list[tuple[str, Path]]:
        """(flattened remote name, local path) for every referenced attachment."""
        with self.db.read() as cur:
            paths = {
                row["file_path"]
                for table in ("entries", "comments")
                for row in cur.execute(
                    f"SELECT DISTINCT file_path FROM {table} WHERE file_path IS NOT NULL"
                ).fetchall()
            }
        return sorted(
            (stored.replace("/", "_"), self.files_dir / stored) for stored in paths
        )

    def backup(self, transport: BackupTransport, actor: str) -> BackupManifest:
        stamp = self._next_stamp()
        dump_name = f"cynote_{stamp}.txt"
        files_dir_name = f"cynote_{stamp}_files"
        dump_bytes = export_text_dump(self.db).to_bytes()
        uploaded: list[str] = []
        try:
            transport.ensure_dir(REMOTE_DIR)
            transport.upload(f"{REMOTE_DIR}/{dump_name}", dump_bytes)
            attachments = self._attachments()
            if attachments:
                transport.ensure_dir(f"{REMOTE_DIR}/{files_dir_name}")
            for remote_name, local_path in attachments:
                transport.upload(
                    f"{REMOTE_DIR}/{files_dir_name}/{remote_name}",
                    local_path.read_bytes(),
                )
                uploaded.append(remote_name)
        except Exception as exc:
            with self.db.write() as cur:
                self.db.emit(
                    cur,
                    AuditKind.BACKUP,
                    actor,
                    dump_name,
                    f"failed: {exc}; uploaded before failure: {uploaded or 'nothing'}",
                )
            raise BackupError(f"backup failed: {exc}", uploaded=uploaded) from exc
        created = self.db.stamp()
        with self.db.write() as cur:
            self.db.emit(
                cur,
                AuditKind.BACKUP,
                actor,
                dump_name,
                f"uploaded dump and {len(uploaded)} attachment(s)",
            )
        return BackupManifest(REMOTE_DIR, dump_name, uploaded, parse_ts(created))
