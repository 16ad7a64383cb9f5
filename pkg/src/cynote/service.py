"""Facade wiring the store, accounts, integrity, analysis, and backup together.

Content-mutating calls check that the acting user is currently authorized
before they touch the store, so deauthorization takes effect immediately
across every surface.
"""

from __future__ import annotations

from datetime import datetime
from typing import Callable, Iterable, Optional

from . import primer as primer_mod
from . import sequence as sequence_mod
from .accounts import AccountService
from .backup import BackupManifest, BackupService, BackupTransport, make_transport
from .blast import BlastClient, BlastRequest, BlastResult
from .config import Config
from .db import Database
from .dump import TextDump, export_text_dump
from .errors import ValidationError
from .integrity import IntegrityService
from .models import (
    AnalysisResult,
    Comment,
    Entry,
    FileAttachment,
    Notarization,
    Notebook,
    VerificationReport,
)
from .primer import IonConditions
from .store import NotebookStore


class CynoteService:
    def __init__(self, config: Config | None = None, clock: Callable[[], datetime] | None = None):
        self.config = config or Config()
        self.db = Database(self.config.store.path, clock=clock)
        self.store = NotebookStore(self.db, self.config.store.files_dir)
        self.accounts = AccountService(
            self.db,
            max_age_days=self.config.policy.max_age_days,
            min_length=self.config.policy.min_length,
            session_ttl_minutes=self.config.session.ttl_minutes,
        )
        self.integrity = IntegrityService(self.db, self.store)
        self.backups = BackupService(self.db, self.config.store.files_dir)
        self.blast = BlastClient(
            cache_dir=self.config.blast.cache_dir,
            mode=self.config.blast.mode,
            endpoint=self.config.blast.endpoint,
        )

    def close(self) -> None:
        self.db.close()

    # -- content operations (actor must be authorized) -------------------

    def create_notebook(self, actor: str, title: str) -> Notebook:
        self.accounts.require_authorized(actor)
        return self.store.create_notebook(title, actor)

    def set_archive_state(self, actor: str, notebook_id: int, archived: bool) -> Notebook:
        self.accounts.require_authorized(actor)
        return self.store.set_archive_state(notebook_id, archived, actor)

    def create_entry(
        self,
        actor: str,
        notebook_id: int,
        title: str,
        description: str,
        keywords: Iterable[str] = (),
        file: Optional[FileAttachment] = None,
    ) -> Entry:
        self.accounts.require_authorized(actor)
        return self.store.create_entry(
            notebook_id, title, description, keywords, file, author=actor
        )

    def create_comment(
        self,
        actor: str,
        entry_id: int,
        text: str,
        file: Optional[FileAttachment] = None,
    ) -> Comment:
        self.accounts.require_authorized(actor)
        return self.store.create_comment(entry_id, text, file, author=actor)

    def notarize_entry(self, actor: str, entry_id: int) -> Notarization:
        self.accounts.require_authorized(actor)
        return self.store.notarize_entry(entry_id, actor)

    def generate_signatures(self, actor: str) -> int:
        self.accounts.require_authorized(actor)
        return self.integrity.generate_signature_batch(actor)

    def verify_record(self, record_kind: str, record_id: int) -> VerificationReport:
        return self.integrity.verify_record(record_kind, record_id)

    def store_result(
        self, actor: str, kind: str, payload: Iterable[tuple[str, str]]
    ) -> AnalysisResult:
        self.accounts.require_authorized(actor)
        return self.store.store_result(actor, kind, payload)

    # -- analysis ---------------------------------------------------------

    def analyze_primer_pair(
        self, actor: str, left: str, right: str, ions: IonConditions
    ) -> AnalysisResult:
        """Run the pair analysis and persist the report as a primer result."""
        self.accounts.require_authorized(actor)
        report = primer_mod.analyze_primer_pair(left, right, ions)
        return self.store.store_result(actor, "primer", report)

    def sequence_transform(self, actor: str, operation: str, sequence: str) -> AnalysisResult:
        self.accounts.require_authorized(actor)
        transforms = {
            "complement": sequence_mod.complement,
            "reverse_complement": sequence_mod.reverse_complement,
            "transcribe": sequence_mod.transcribe,
            "back_transcribe": sequence_mod.back_transcribe,
            "translate": sequence_mod.translate,
            "back_translate": sequence_mod.back_translate,
        }
        if operation not in transforms:
            raise ValidationError(
                f"unknown transform {operation!r}", fields=["operation"]
            )
        output = transforms[operation](sequence)
        payload = [("operation", operation), ("input", sequence), ("output", output)]
        return self.store.store_result(actor, "sequence", payload)

    def sequence_protein_report(self, actor: str, sequence: str) -> AnalysisResult:
        self.accounts.require_authorized(actor)
        report = sequence_mod.protein_report(sequence)
        helix, turn, sheet = report["secondary_structure_fractions"]
        payload = [
            ("Sequence", sequence_mod.clean_protein(sequence)),
            ("Composition counts", repr(report["composition"]["counts"])),
            ("Composition proportions", repr(report["composition"]["proportions"])),
            ("Molecular weight (Da)", repr(report["molecular_weight"])),
            ("Aromaticity", repr(report["aromaticity"])),
            ("Instability index", repr(report["instability_index"])),
            ("Flexibility profile", repr(report["flexibility_profile"])),
            ("Isoelectric point (pH)", repr(report["isoelectric_point"])),
            ("Helix fraction", repr(helix)),
            ("Turn fraction", repr(turn)),
            ("Sheet fraction", repr(sheet)),
        ]
        return self.store.store_result(actor, "sequence", payload)

    def sequence_restriction_map(
        self, actor: str, sequence: str, enzyme_names: Optional[list[str]] = None
    ) -> AnalysisResult:
        self.accounts.require_authorized(actor)
        enzymes = sequence_mod.default_enzymes()
        if enzyme_names is not None:
            known = {e.name: e for e in enzymes}
            unknown = [n for n in enzyme_names if n not in known]
            if unknown:
                raise ValidationError(
                    f"unknown enzyme(s): {', '.join(unknown)}", fields=["enzymes"]
                )
            enzymes = [known[n] for n in enzyme_names]
        hits = sequence_mod.restriction_map(sequence, enzymes)
        payload = [("Sequence", sequence.strip().upper())]
        if hits:
            payload.extend(
                (name, f"site at {pos}, cut after base {cut}")
                for name, pos, cut in hits
            )
        else:
            payload.append(("Sites", "none found"))
        return self.store.store_result(actor, "sequence", payload)

    def blast_query(self, actor: str, request: BlastRequest) -> tuple[BlastResult, AnalysisResult]:
        self.accounts.require_authorized(actor)
        result = self.blast.query(request)
        payload = [
            ("Program", request.program),
            ("Database", request.database),
            ("Query", request.sequence),
        ]
        if result.hits:
            payload.extend(
                (hit.hit_id, f"score {hit.score}, e-value {hit.e_value}")
                for hit in result.hits
            )
        else:
            payload.append(("Hits", "none"))
        stored = self.store.store_result(actor, "sequence", payload)
        return result, stored

    # -- export / backup ---------------------------------------------------

    def export_dump(self) -> TextDump:
        return export_text_dump(self.db)

    def backup(self, actor: str, transport: BackupTransport | None = None) -> BackupManifest:
        self.accounts.require_authorized(actor)
        own_transport = transport is None
        if transport is None:
            transport = make_transport(self.config.backup)
        try:
            return self.backups.backup(transport, actor)
        finally:
            if own_transport:
                transport.close()
