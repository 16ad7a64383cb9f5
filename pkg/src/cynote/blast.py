"""Replayable similarity-search client for the public BLAST URL API.

The HTTP hop is isolated behind an injectable transport callable; every raw
response is cached under a digest of the request so the same query replays
deterministically with no network. ``mode="replay"`` never opens a socket.
"""

from __future__ import annotations

import hashlib
import os
import re
import time
import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from .errors import ParseError, ServiceUnavailableError, ValidationError

PROGRAMS = ("blastn", "blastp", "blastx", "tblastn", "tblastx")

# transport(url, form_data or None) -> response body text
Transport = Callable[[str, Optional[dict]], str]


@dataclass(frozen=True)
class BlastRequest:
    program: str
    database: str
    sequence: str

    def __post_init__(self):
        if self.program not in PROGRAMS:
            raise ValidationError(
                f"unknown BLAST program {self.program!r}", fields=["program"]
            )
        if not self.database.strip():
            raise ValidationError("database must be non-empty", fields=["database"])
        if not self.sequence.strip():
            raise ValidationError("sequence must be non-empty", fields=["sequence"])

    def digest(self) -> str:
        canonical = "\n".join(
            (self.program, self.database, self.sequence.strip().upper())
        )
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class BlastHit:
    hit_id: str
    score: float
    e_value: float


@dataclass(frozen=True)
class BlastResult:
    request: BlastRequest
    raw: str
    hits: tuple[BlastHit, ...]
    from_cache: bool


def _urllib_transport(url: str, data: Optional[dict]) -> str:
    encoded = urllib.parse.urlencode(data).encode("ascii") if data else None
    with urllib.request.urlopen(url, data=encoded, timeout=60) as response:
        return response.read().decode("utf-8", errors="replace")


def parse_hits(raw: str) -> tuple[BlastHit, ...]:
    """Hit list from a BlastOutput XML document: id, best bit-score, best e-value."""
    try:
        root = ET.fromstring(raw)
    except ET.ParseError as exc:
        raise ParseError(f"unparseable BLAST response: {exc}", raw=raw) from exc
    if root.tag != "BlastOutput":
        raise ParseError(f"unexpected root element {root.tag!r}", raw=raw)
    hits = []
    for hit in root.iter("Hit"):
        hit_id = hit.findtext("Hit_id") or hit.findtext("Hit_accession") or ""
        best_score = None
        best_evalue = None
        for hsp in hit.iter("Hsp"):
            score_text = hsp.findtext("Hsp_bit-score")
            evalue_text = hsp.findtext("Hsp_evalue")
            if score_text is None or evalue_text is None:
                raise ParseError("Hsp missing bit-score or e-value", raw=raw)
            score = float(score_text)
            evalue = float(evalue_text)
            if best_score is None or score > best_score:
                best_score = score
                best_evalue = evalue
        if best_score is None:
            raise ParseError(f"hit {hit_id!r} has no HSPs", raw=raw)
        hits.append(BlastHit(hit_id, best_score, best_evalue))
    return tuple(hits)


class BlastClient:
    def __init__(
        self,
        cache_dir: str | Path,
        mode: str = "replay",
        endpoint: str = "https://blast.ncbi.nlm.nih.gov/Blast.cgi",
        transport: Transport | None = None,
        poll_interval: float = 5.0,
        max_polls: int = 120,
    ):
        if mode not in ("live", "replay"):
            raise ValidationError("blast mode must be 'live' or 'replay'", fields=["mode"])
        self.cache_dir = Path(cache_dir)
        self.mode = mode
        self.endpoint = endpoint
        self.transport = transport or _urllib_transport
        self.poll_interval = poll_interval
        self.max_polls = max_polls

    def _cache_path(self, request: BlastRequest) -> Path:
        return self.cache_dir / f"{request.digest()}.xml"

    def query(self, request: BlastRequest) -> BlastResult:
        cached = self._cache_path(request)
        if cached.exists():
            raw = cached.read_text(encoding="utf-8")
            return BlastResult(request, raw, parse_hits(raw), from_cache=True)
        if self.mode == "replay":
            raise ServiceUnavailableError(
                "no cached response for this query and live lookups are disabled"
            )
        raw = self._submit_and_poll(request)
        hits = parse_hits(raw)  # reject garbage before caching it
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        tmp = cached.with_suffix(".tmp")
        tmp.write_text(raw, encoding="utf-8")
        os.replace(tmp, cached)
        return BlastResult(request, raw, hits, from_cache=False)

    def _submit_and_poll(self, request: BlastRequest) -> str:
        try:
            submitted = self.transport(
                self.endpoint,
                {
                    "CMD": "Put",
                    "PROGRAM": request.program,
                    "DATABASE": request.database,
                    "QUERY": request.sequence,
                },
            )
        except ServiceUnavailableError:
            raise
        except Exception as exc:
            raise ServiceUnavailableError(f"BLAST submit failed: {exc}") from exc
        rid_match = re.search(r"RID\s*=\s*(\S+)", submitted)
        if not rid_match:
            raise ParseError("submit response carried no RID", raw=submitted)
        rid = rid_match.group(1)
        for _ in range(self.max_polls):
            try:
                status = self.transport(
                    self.endpoint,
                    {"CMD": "Get", "RID": rid, "FORMAT_OBJECT": "SearchInfo"},
                )
            except Exception as exc:
                raise ServiceUnavailableError(f"BLAST poll failed: {exc}") from exc
            if "Status=READY" in status:
                break
            if "Status=UNKNOWN" in status or "Status=FAILED" in status:
                raise ServiceUnavailableError(f"BLAST search {rid} failed remotely")
            time.sleep(self.poll_interval)
        else:
            raise ServiceUnavailableError(f"BLAST search {rid} never became ready")
        try:
            return self.transport(
                self.endpoint,
                {"CMD": "Get", "RID": rid, "FORMAT_TYPE": "XML"},
            )
        except Exception as exc:
            raise ServiceUnavailableError(f"BLAST fetch failed: {exc}") from exc
