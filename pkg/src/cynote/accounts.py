"""User lifecycle, session authentication, password aging, and audit queries.

Passwords are stored as salted PBKDF2-HMAC-SHA256 digests (200k iterations)
and compared with hmac.compare_digest. Login failures are answered with one
uniform error so usernames cannot be probed, while the audit detail records
the true reason and the running consecutive-failure count. That count is
derived from the log itself: failures for a username since its last success.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import sqlite3
import threading
from datetime import datetime, timedelta
from typing import Optional

from .db import Database, format_ts, parse_ts
from .errors import (
    ChangePasswordError,
    InvalidCredentialsError,
    NotAuthorizedError,
    NotFoundError,
    PasswordExpiredError,
    PolicyError,
    StaleSessionError,
    UniquenessError,
    ValidationError,
)
from .models import AuditEvent, AuditKind, Session, User

PBKDF2_ITERATIONS = 200_000
SALT_BYTES = 16
TOKEN_BYTES = 32  # 256-bit session tokens


def _derive(password: str, salt: bytes, iterations: int) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations)


def _user_from_row(row: sqlite3.Row) -> User:
    return User(
        id=row["id"],
        username=row["username"],
        password_digest=row["password_digest"],
        salt=row["salt"],
        iterations=row["iterations"],
        password_changed_utc=parse_ts(row["password_changed_utc"]),
        authorized=bool(row["authorized"]),
        created_utc=parse_ts(row["created_utc"]),
    )


class AccountService:
    def __init__(
        self,
        db: Database,
        max_age_days: int = 90,
        min_length: int = 8,
        session_ttl_minutes: int = 60,
    ):
        self.db = db
        self.max_age_days = max_age_days
        self.min_length = min_length
        self.session_ttl = timedelta(minutes=session_ttl_minutes)
        self._sessions: dict[str, Session] = {}
        self._sessions_lock = threading.Lock()

    # -- helpers --------------------------------------------------------

    def _now(self) -> datetime:
        return parse_ts(self.db.stamp())

    def _check_policy(self, password: str) -> None:
        if len(password) < self.min_length:
            raise PolicyError(
                f"password must be at least {self.min_length} characters"
            )

    def get_user(self, username: str) -> User:
        with self.db.read() as cur:
            row = cur.execute(
                "SELECT * FROM users WHERE username = ?", (username,)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"user {username!r} does not exist")
        return _user_from_row(row)

    def _verify_password(self, row: sqlite3.Row, password: str) -> bool:
        expected = bytes.fromhex(row["password_digest"])
        actual = _derive(password, bytes.fromhex(row["salt"]), row["iterations"])
        return hmac.compare_digest(expected, actual)

    def _consecutive_failures(self, cur: sqlite3.Cursor, username: str) -> int:
        row = cur.execute(
            "SELECT COUNT(*) AS n FROM audit_events"
            " WHERE kind = ? AND actor = ? AND id > COALESCE("
            "   (SELECT MAX(id) FROM audit_events WHERE kind = ? AND actor = ?), 0)",
            (
                AuditKind.LOGIN_FAILURE.value,
                username,
                AuditKind.LOGIN_SUCCESS.value,
                username,
            ),
        ).fetchone()
        return row["n"]

    # -- account lifecycle ----------------------------------------------

    def create_account(self, username: str, password: str) -> User:
        if not username.strip():
            raise ValidationError("username must be non-empty", fields=["username"])
        self._check_policy(password)
        salt = secrets.token_bytes(SALT_BYTES)
        digest = _derive(password, salt, PBKDF2_ITERATIONS)
        # failure events must outlive the transaction, so raise only after commit
        failure: Exception | None = None
        with self.db.write() as cur:
            existing = cur.execute(
                "SELECT id FROM users WHERE username = ?", (username,)
            ).fetchone()
            if existing is not None:
                self.db.emit(
                    cur,
                    AuditKind.NEW_ACCOUNT,
                    username,
                    None,
                    "rejected: duplicate username",
                )
                failure = UniquenessError(f"username {username!r} is already taken")
            else:
                user_id = self.db.next_id(cur, "users")
                first_account = user_id == 1
                stamp = self.db.stamp()
                cur.execute(
                    "INSERT INTO users (id, username, password_digest, salt, iterations,"
                    " password_changed_utc, authorized, created_utc)"
                    " VALUES (?, ?, ?, ?, ?, ?, ?, ?)",
                    (
                        user_id,
                        username,
                        digest.hex(),
                        salt.hex(),
                        PBKDF2_ITERATIONS,
                        stamp,
                        1 if first_account else 0,
                        stamp,
                    ),
                )
                detail = "bootstrap account (auto-authorized)" if first_account else "created"
                self.db.emit(cur, AuditKind.NEW_ACCOUNT, username, None, detail)
        if failure is not None:
            raise failure
        return self.get_user(username)

    def _set_authorization(self, actor: str, target: str, authorized: bool) -> User:
        self.require_authorized(actor)
        with self.db.write() as cur:
            row = cur.execute(
                "SELECT * FROM users WHERE username = ?", (target,)
            ).fetchone()
            if row is None:
                raise NotFoundError(f"user {target!r} does not exist")
            cur.execute(
                "UPDATE users SET authorized = ? WHERE username = ?",
                (1 if authorized else 0, target),
            )
            kind = AuditKind.AUTHORIZE if authorized else AuditKind.DEAUTHORIZE
            self.db.emit(cur, kind, actor, target, "")
        if not authorized:
            self._drop_sessions_for(target)
        return self.get_user(target)

    def authorize_user(self, actor: str, target: str) -> User:
        return self._set_authorization(actor, target, True)

    def deauthorize_user(self, actor: str, target: str) -> User:
        """Deauthorization also kills the target's live sessions immediately."""
        return self._set_authorization(actor, target, False)

    def require_authorized(self, username: str) -> User:
        user = self.get_user(username)
        if not user.authorized:
            raise NotAuthorizedError(f"user {username!r} is not authorized")
        return user

    # -- login / logout ---------------------------------------------------

    def login(self, username: str, password: str, now: Optional[datetime] = None) -> Session:
        now = now or self._now()
        failure: Exception | None = None
        with self.db.write() as cur:
            row = cur.execute(
                "SELECT * FROM users WHERE username = ?", (username,)
            ).fetchone()
            if row is None or not self._verify_password(row, password):
                reason = "unknown user" if row is None else "wrong password"
                failure = InvalidCredentialsError("invalid credentials")
            elif not row["authorized"]:
                reason = "user not authorized"
                failure = NotAuthorizedError(f"user {username!r} is not authorized")
            else:
                age_days = (
                    now - parse_ts(row["password_changed_utc"])
                ).total_seconds() / 86400.0
                if age_days > self.max_age_days:
                    reason = f"password expired ({age_days:.1f} days old)"
                    failure = PasswordExpiredError(
                        f"password is {age_days:.1f} days old; change it to continue",
                        age_days=age_days,
                    )
            if failure is not None:
                count = self._consecutive_failures(cur, username) + 1
                self.db.emit(
                    cur,
                    AuditKind.LOGIN_FAILURE,
                    username,
                    None,
                    f"{reason}; consecutive failures: {count}",
                )
            else:
                self.db.emit(cur, AuditKind.LOGIN_SUCCESS, username, None, "")
        if failure is not None:
            raise failure
        token = secrets.token_hex(TOKEN_BYTES)
        session = Session(token, username, now, now + self.session_ttl)
        with self._sessions_lock:
            self._sessions[token] = session
        return session

    def logout(self, token: str) -> None:
        with self._sessions_lock:
            session = self._sessions.pop(token, None)
        if session is None:
            raise StaleSessionError("session token is unknown or already logged out")
        with self.db.write() as cur:
            self.db.emit(cur, AuditKind.LOGOUT, session.username, None, "")

    def _drop_sessions_for(self, username: str) -> None:
        with self._sessions_lock:
            for token in [t for t, s in self._sessions.items() if s.username == username]:
                del self._sessions[token]

    def authenticate(self, token: str, now: Optional[datetime] = None) -> User:
        """Resolve a bearer token to an authorized, password-current user."""
        with self._sessions_lock:
            session = self._sessions.get(token)
        if session is None:
            raise StaleSessionError("session token is unknown or expired")
        now = now or self._now()
        if now >= session.expires_utc:
            with self._sessions_lock:
                self._sessions.pop(token, None)
            raise StaleSessionError("session has expired")
        user = self.get_user(session.username)
        if not user.authorized:
            raise NotAuthorizedError(f"user {user.username!r} is no longer authorized")
        check = self.password_age_check(user.username, now)
        if check["must_change"]:
            raise PasswordExpiredError(
                "password has aged out; change it to continue",
                age_days=check["age_days"],
            )
        return user

    # -- password management ----------------------------------------------

    def change_password(
        self, username: str, old: str, new: str, now: Optional[datetime] = None
    ) -> None:
        now = now or self._now()
        reason: str | None = None
        with self.db.write() as cur:
            row = cur.execute(
                "SELECT * FROM users WHERE username = ?", (username,)
            ).fetchone()
            if row is None or not self._verify_password(row, old):
                reason = "old password mismatch"
            elif new == old:
                reason = "new password equals old"
            elif len(new) < self.min_length:
                reason = (
                    f"policy violation: password must be at least"
                    f" {self.min_length} characters"
                )
            if reason is not None:
                self.db.emit(
                    cur, AuditKind.PASSWORD_CHANGE_FAILURE, username, None, reason
                )
            else:
                salt = secrets.token_bytes(SALT_BYTES)
                digest = _derive(new, salt, PBKDF2_ITERATIONS)
                cur.execute(
                    "UPDATE users SET password_digest = ?, salt = ?, iterations = ?,"
                    " password_changed_utc = ? WHERE username = ?",
                    (digest.hex(), salt.hex(), PBKDF2_ITERATIONS, format_ts(now), username),
                )
                self.db.emit(cur, AuditKind.PASSWORD_CHANGE_SUCCESS, username, None, "")
        if reason is not None:
            raise ChangePasswordError(reason)

    def password_age_check(
        self, username: str, now: Optional[datetime] = None
    ) -> dict[str, float | bool]:
        user = self.get_user(username)
        now = now or self._now()
        age_days = (now - user.password_changed_utc).total_seconds() / 86400.0
        return {"age_days": age_days, "must_change": age_days > self.max_age_days}

    # -- audit queries ------------------------------------------------------

    def query_audit(
        self,
        kind: Optional[AuditKind] = None,
        actor: Optional[str] = None,
        start: Optional[datetime] = None,
        end: Optional[datetime] = None,
    ) -> list[AuditEvent]:
        """Events in id order, optionally filtered by kind, actor, and time."""
        clauses = []
        args: list = []
        if kind is not None:
            clauses.append("kind = ?")
            args.append(kind.value)
        if actor is not None:
            clauses.append("actor = ?")
            args.append(actor)
        if start is not None:
            clauses.append("utc >= ?")
            args.append(format_ts(start))
        if end is not None:
            clauses.append("utc <= ?")
            args.append(format_ts(end))
        query = "SELECT * FROM audit_events"
        if clauses:
            query += " WHERE " + " AND ".join(clauses)
        query += " ORDER BY id"
        with self.db.read() as cur:
            rows = cur.execute(query, args).fetchall()
        return [
            AuditEvent(
                r["id"], AuditKind(r["kind"]), r["actor"], r["target"], r["detail"],
                parse_ts(r["utc"]),
            )
            for r in rows
        ]
