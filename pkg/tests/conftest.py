from __future__ import annotations

import sqlite3
from datetime import datetime, timedelta
from pathlib import Path

import pytest

from cynote.config import Config
from cynote.service import CynoteService

FIXTURES = Path(__file__).parent / "fixtures"

PASSWORD = "s3cretpw!"


class FakeClock:
    """Injectable clock; tests advance it to exercise aging and expiry."""

    def __init__(self, start: datetime | None = None):
        self.now = start or datetime(2026, 1, 1, 12, 0, 0)

    def __call__(self) -> datetime:
        return self.now

    def advance(self, **kwargs) -> None:
        self.now += timedelta(**kwargs)


def make_config(tmp_path: Path, **overrides) -> Config:
    raw = {
        "store": {
            "path": str(tmp_path / "cynote.db"),
            "files_dir": str(tmp_path / "files"),
        },
        "blast": {"cache_dir": str(tmp_path / "blast_cache"), "mode": "replay"},
        "backup": {"mode": "localdir", "local_path": str(tmp_path / "backups")},
    }
    for section, values in overrides.items():
        raw.setdefault(section, {}).update(values)
    return Config.from_dict(raw)


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def service(tmp_path, clock):
    svc = CynoteService(make_config(tmp_path), clock=clock)
    yield svc
    svc.close()


@pytest.fixture
def seeded(service):
    """Service with a bootstrap user, a notebook, an entry, and a comment."""
    service.accounts.create_account("ng", PASSWORD)
    service.create_notebook("ng", "General Journal")
    service.create_entry("ng", 1, "New entry #1", "testing entry", ["pcr"])
    service.create_comment("ng", 1, "follow-up")
    return service


def raw_sql(service: CynoteService, statement: str, args: tuple = ()) -> None:
    """Out-of-band tampering: edits the storage file underneath the API."""
    conn = sqlite3.connect(str(service.db.path))
    try:
        conn.execute(statement, args)
        conn.commit()
    finally:
        conn.close()
