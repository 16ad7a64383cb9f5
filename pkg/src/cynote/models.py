"""Domain records. Content rows are immutable once written."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import Optional


class AuditKind(str, Enum):
    NEW_ACCOUNT = "new_account"
    LOGIN_SUCCESS = "login_success"
    LOGIN_FAILURE = "login_failure"
    LOGOUT = "logout"
    AUTHORIZE = "authorize"
    DEAUTHORIZE = "deauthorize"
    NEW_NOTEBOOK = "new_notebook"
    NEW_ENTRY = "new_entry"
    NEW_COMMENT = "new_comment"
    NOTARIZE = "notarize"
    ARCHIVE = "archive"
    UNARCHIVE = "unarchive"
    SIGNATURE_GENERATION = "signature_generation"
    PASSWORD_CHANGE_SUCCESS = "password_change_success"
    PASSWORD_CHANGE_FAILURE = "password_change_failure"
    BACKUP = "backup"
    RESULT_STORED = "result_stored"


@dataclass(frozen=True)
class FileAttachment:
    filename: str
    content_digest: str  # sha256 hex of the file bytes
    size_bytes: int
    stored_path: str


@dataclass(frozen=True)
class Notebook:
    id: int
    title: str
    creator: str
    created_utc: datetime
    archived: bool


@dataclass(frozen=True)
class Entry:
    id: int
    notebook_id: int
    title: str
    description: str
    keywords: tuple[str, ...]
    file: Optional[FileAttachment]
    author: str
    created_utc: datetime


@dataclass(frozen=True)
class Comment:
    id: int
    entry_id: int
    text: str
    file: Optional[FileAttachment]
    author: str
    created_utc: datetime


@dataclass(frozen=True)
class Notarization:
    id: int
    entry_id: int
    notary: str
    created_utc: datetime


@dataclass(frozen=True)
class AnalysisResult:
    id: int
    owner: str
    kind: str  # "primer" or "sequence"
    payload: tuple[tuple[str, str], ...]
    created_utc: datetime


@dataclass(frozen=True)
class AuditEvent:
    id: int
    kind: AuditKind
    actor: str
    target: Optional[str]
    detail: str
    utc: datetime


@dataclass(frozen=True)
class User:
    id: int
    username: str
    password_digest: str  # hex
    salt: str  # hex, >= 16 octets
    iterations: int
    password_changed_utc: datetime
    authorized: bool
    created_utc: datetime


@dataclass(frozen=True)
class Session:
    token: str
    username: str
    issued_utc: datetime
    expires_utc: datetime


@dataclass(frozen=True)
class SignatureRecord:
    id: int
    record_kind: str  # "entry" or "comment"
    record_id: int
    md5: str
    sha1: str
    sha224: str
    sha256: str
    sha384: str
    sha512: str
    batch_id: int
    generated_utc: datetime
    actor: str


@dataclass(frozen=True)
class VerificationReport:
    record_kind: str
    record_id: int
    status: str  # "consistent" | "tampered" | "unsigned"
    first_divergent_batch: Optional[int]
    details: dict[str, bool]  # algorithm -> matched across all batches
