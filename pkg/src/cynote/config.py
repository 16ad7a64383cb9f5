"""Service configuration.

Loaded from a JSON file of nested sections; every key has a default so an
empty file (or none at all) yields a runnable single-user setup rooted at
``var/``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .errors import ValidationError


@dataclass
class StoreConfig:
    path: str = "var/cynote.db"
    files_dir: str = "var/files"


@dataclass
class PolicyConfig:
    max_age_days: int = 90
    min_length: int = 8


@dataclass
class SessionConfig:
    ttl_minutes: int = 60


@dataclass
class BlastConfig:
    endpoint: str = "https://blast.ncbi.nlm.nih.gov/Blast.cgi"
    cache_dir: str = "var/blast_cache"
    mode: str = "replay"  # "live" or "replay"


@dataclass
class BackupConfig:
    host: str = ""
    port: int = 21
    user: str = ""
    password: str = ""
    mode: str = "localdir"  # "ftp" or "localdir"
    local_path: str = "var/backups"


@dataclass
class ServerConfig:
    bind: str = "127.0.0.1"
    port: int = 8000
    max_upload_mib: int = 32
    cors_origins: list[str] = field(default_factory=lambda: ["*"])


@dataclass
class Config:
    store: StoreConfig = field(default_factory=StoreConfig)
    policy: PolicyConfig = field(default_factory=PolicyConfig)
    session: SessionConfig = field(default_factory=SessionConfig)
    blast: BlastConfig = field(default_factory=BlastConfig)
    backup: BackupConfig = field(default_factory=BackupConfig)
    server: ServerConfig = field(default_factory=ServerConfig)

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "Config":
        sections = {
            "store": StoreConfig,
            "policy": PolicyConfig,
            "session": SessionConfig,
            "blast": BlastConfig,
            "backup": BackupConfig,
            "server": ServerConfig,
        }
        kwargs = {}
        for name, section_cls in sections.items():
            values = raw.get(name, {})
            if not isinstance(values, dict):
                raise ValidationError(f"config section {name!r} must be an object")
            known = section_cls.__dataclass_fields__
            unknown = set(values) - set(known)
            if unknown:
                raise ValidationError(
                    f"unknown config keys in {name}: {', '.join(sorted(unknown))}"
                )
            kwargs[name] = section_cls(**values)
        unknown_sections = set(raw) - set(sections)
        if unknown_sections:
            raise ValidationError(
                f"unknown config sections: {', '.join(sorted(unknown_sections))}"
            )
        cfg = cls(**kwargs)
        if cfg.policy.max_age_days <= 0:
            raise ValidationError("policy.max_age_days must be positive")
        if cfg.backup.mode not in ("ftp", "localdir"):
            raise ValidationError("backup.mode must be 'ftp' or 'localdir'")
        if cfg.blast.mode not in ("live", "replay"):
            raise ValidationError("blast.mode must be 'live' or 'replay'")
        return cfg

    @classmethod
    def load(cls, path: str | Path | None = None) -> "Config":
        if path is None:
            return cls()
        text = Path(path).read_text(encoding="utf-8")
        return cls.from_dict(json.loads(text) if text.strip() else {})
