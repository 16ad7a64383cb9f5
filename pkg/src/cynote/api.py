"""JSON HTTP API.

Routes follow the application/controller/function scheme
(``/cynote/<controller>/<function>``). Requests carry JSON bodies, or
multipart form data when attaching a file; authenticated routes take
``Authorization: Bearer <token>``. Handlers validate payloads themselves so
a 422 always names the offending fields. There is deliberately no route
that updates or deletes notebook content.
"""

from __future__ import annotations

import json
from typing import Any, Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from starlette.middleware.cors import CORSMiddleware

from .blast import BlastRequest
from .db import format_ts
from .errors import (
    ArchivedNotebookError,
    BackupError,
    ChangePasswordError,
    CynoteError,
    DomainError,
    InvalidCredentialsError,
    NotAuthorizedError,
    NotFoundError,
    ParseError,
    PasswordExpiredError,
    PayloadTooLargeError,
    PolicyError,
    ServiceUnavailableError,
    StaleSessionError,
    UniquenessError,
    UnsupportedKindError,
    ValidationError,
)
from .models import (
    AnalysisResult,
    Comment,
    Entry,
    Notarization,
    Notebook,
    User,
    VerificationReport,
)
from .primer import IonConditions
from .service import CynoteService
from .stats import (
    Sample,
    Table2x2,
    TableRxC,
    chi_square_2x2,
    chi_square_gof,
    chi_square_rxc,
    cohens_kappa,
    descriptive,
    gk_gamma,
    kendall_tau_a,
    kendall_tau_c,
    linear_regression_pearson,
    mcnemar,
    odds_ratio,
    phi_coefficient,
    proportion_difference,
    relative_risk,
    z_correlated_proportions,
)

CHANGE_PASSWORD_ROUTE = "/cynote/account/changepassword"

_STATUS = {
    ValidationError: 422,
    DomainError: 422,
    UnsupportedKindError: 422,
    PolicyError: 422,
    ChangePasswordError: 422,
    NotFoundError: 404,
    ArchivedNotebookError: 409,
    UniquenessError: 409,
    InvalidCredentialsError: 401,
    StaleSessionError: 401,
    NotAuthorizedError: 403,
    PasswordExpiredError: 403,
    PayloadTooLargeError: 413,
    ParseError: 502,
    BackupError: 503,
    ServiceUnavailableError: 503,
}


def _error_response(exc: CynoteError) -> JSONResponse:
    status = _STATUS.get(type(exc), 500)
    body: dict[str, Any] = {"code": exc.code, "message": exc.message}
    if isinstance(exc, ValidationError) and exc.fields:
        body["fields"] = exc.fields
    if isinstance(exc, PasswordExpiredError):
        body["change_password_route"] = CHANGE_PASSWORD_ROUTE
    if isinstance(exc, BackupError):
        body["uploaded"] = exc.uploaded
    return JSONResponse(body, status_code=status)


# -- payload helpers ------------------------------------------------------


class _Payload:
    """Field extraction with collected validation errors."""

    def __init__(self, data: dict[str, Any]):
        self.data = data
        self.bad: list[str] = []

    def text(self, field: str, required: bool = True) -> Optional[str]:
        value = self.data.get(field)
        if value is None or (isinstance(value, str) and not value.strip()):
            if required:
                self.bad.append(field)
            return None
        if not isinstance(value, str):
            self.bad.append(field)
            return None
        return value

    def integer(self, field: str, required: bool = True) -> Optional[int]:
        value = self.data.get(field)
        if value is None or value == "":
            if required:
                self.bad.append(field)
            return None
        if isinstance(value, bool):
            self.bad.append(field)
            return None
        try:
            return int(value)
        except (TypeError, ValueError):
            self.bad.append(field)
            return None

    def number(self, field: str, required: bool = True) -> Optional[float]:
        value = self.data.get(field)
        if value is None or value == "":
            if required:
                self.bad.append(field)
            return None
        try:
            return float(value)
        except (TypeError, ValueError):
            self.bad.append(field)
            return None

    def check(self) -> None:
        if self.bad:
            raise ValidationError(
                f"invalid or missing field(s): {', '.join(self.bad)}", fields=self.bad
            )


def _keywords(raw: Any) -> list[str]:
    if raw is None or raw == "":
        return []
    if isinstance(raw, list):
        return [str(k) for k in raw]
    if isinstance(raw, str):
        return [part.strip() for part in raw.split(",") if part.strip()]
    raise ValidationError("keywords must be a list or comma-separated text", fields=["keywords"])


def _notebook_json(notebook: Notebook) -> dict:
    return {
        "id": notebook.id,
        "title": notebook.title,
        "creator": notebook.creator,
        "created_utc": format_ts(notebook.created_utc),
        "archived": notebook.archived,
    }


def _file_json(entry_file) -> Optional[dict]:
    if entry_file is None:
        return None
    return {
        "filename": entry_file.filename,
        "content_digest": entry_file.content_digest,
        "size_bytes": entry_file.size_bytes,
    }


def _entry_json(entry: Entry) -> dict:
    return {
        "id": entry.id,
        "notebook_id": entry.notebook_id,
        "title": entry.title,
        "description": entry.description,
        "keywords": list(entry.keywords),
        "file": _file_json(entry.file),
        "author": entry.author,
        "created_utc": format_ts(entry.created_utc),
    }


def _comment_json(comment: Comment) -> dict:
    return {
        "id": comment.id,
        "entry_id": comment.entry_id,
        "text": comment.text,
        "file": _file_json(comment.file),
        "author": comment.author,
        "created_utc": format_ts(comment.created_utc),
    }


def _notarization_json(notarization: Notarization) -> dict:
    return {
        "id": notarization.id,
        "entry_id": notarization.entry_id,
        "notary": notarization.notary,
        "created_utc": format_ts(notarization.created_utc),
    }


def _result_json(result: AnalysisResult) -> dict:
    return {
        "id": result.id,
        "owner": result.owner,
        "kind": result.kind,
        "payload": [[key, value] for key, value in result.payload],
        "created_utc": format_ts(result.created_utc),
    }


def _verification_json(report: VerificationReport) -> dict:
    return {
        "record_kind": report.record_kind,
        "record_id": report.record_id,
        "status": report.status,
        "first_divergent_batch": report.first_divergent_batch,
        "details": report.details,
    }


def create_app(service: CynoteService) -> FastAPI:
    app = FastAPI(title="cynote", docs_url=None, redoc_url=None)
    app.state.service = service
    if service.config.server.cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=service.config.server.cors_origins,
            allow_methods=["GET", "POST"],
            allow_headers=["Authorization", "Content-Type"],
        )
    max_upload = service.config.server.max_upload_mib * 1024 * 1024

    @app.exception_handler(CynoteError)
    async def _on_service_error(request: Request, exc: CynoteError):
        return _error_response(exc)

    async def _body(request: Request) -> tuple[dict[str, Any], Optional[tuple[str, bytes]]]:
        """(fields, attachment) from a JSON or multipart request."""
        content_type = request.headers.get("content-type", "")
        declared = request.headers.get("content-length")
        if declared and declared.isdigit() and int(declared) > max_upload:
            raise PayloadTooLargeError("request body exceeds the upload cap")
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            fields: dict[str, Any] = {}
            attachment = None
            for key, value in form.multi_items():
                if hasattr(value, "filename") and value.filename:
                    data = await value.read()
                    if len(data) > max_upload:
                        raise PayloadTooLargeError("attachment exceeds the upload cap")
                    attachment = (value.filename, data)
                else:
                    fields[key] = value
            return fields, attachment
        if not await request.body():
            return {}, None
        try:
            parsed = json.loads(await request.body())
        except json.JSONDecodeError:
            raise ValidationError("request body is not valid JSON")
        if not isinstance(parsed, dict):
            raise ValidationError("request body must be a JSON object")
        return parsed, None

    def _bearer(request: Request) -> User:
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise StaleSessionError("missing bearer token")
        return service.accounts.authenticate(header[7:].strip())

    # -- account controller -------------------------------------------

    @app.post("/cynote/account/newaccount")
    async def newaccount(request: Request):
        fields, _ = await _body(request)
        payload = _Payload(fields)
        username = payload.text("username")
        password = payload.text("password")
        payload.check()
        user = service.accounts.create_account(username, password)
        return {"username": user.username, "authorized": user.authorized}

    @app.post("/cynote/account/login")
    async def login(request: Request):
        fields, _ = await _body(request)
        payload = _Payload(fields)
        username = payload.text("username")
        password = payload.text("password")
        payload.check()
        session = service.accounts.login(username, password)
        return {
            "token": session.token,
            "username": session.username,
            "issued_utc": format_ts(session.issued_utc),
            "expires_utc": format_ts(session.expires_utc),
        }

    @app.post("/cynote/account/logout")
    async def logout(request: Request):
        header = request.headers.get("authorization", "")
        if not header.lower().startswith("bearer "):
            raise StaleSessionError("missing bearer token")
        service.accounts.logout(header[7:].strip())
        return {"ok": True}

    @app.post("/cynote/account/changepassword")
    async def changepassword(request: Request):
        fields, _ = await _body(request)
        payload = _Payload(fields)
        username = payload.text("username")
        old = payload.text("old_password")
        new = payload.text("new_password")
        payload.check()
        service.accounts.change_password(username, old, new)
        return {"ok": True}

    @app.post("/cynote/account/authorize")
    async def authorize(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        target = payload.text("target")
        payload.check()
        updated = service.accounts.authorize_user(user.username, target)
        return {"username": updated.username, "authorized": updated.authorized}

    @app.post("/cynote/account/deauthorize")
    async def deauthorize(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        target = payload.text("target")
        payload.check()
        updated = service.accounts.deauthorize_user(user.username, target)
        return {"username": updated.username, "authorized": updated.authorized}

    # -- cynote (notebook) controller ----------------------------------

    @app.post("/cynote/cynote/new_notebook")
    async def new_notebook(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        title = payload.text("title")
        payload.check()
        notebook = service.create_notebook(user.username, title)
        return _notebook_json(notebook)

    @app.get("/cynote/cynote/notebooks")
    async def notebooks(request: Request):
        _bearer(request)
        return [_notebook_json(n) for n in service.store.list_notebooks()]

    @app.post("/cynote/cynote/new_entry")
    async def new_entry(request: Request):
        user = _bearer(request)
        fields, attachment = await _body(request)
        payload = _Payload(fields)
        notebook_id = payload.integer("notebook_id")
        title = payload.text("title")
        description = payload.text("description")
        payload.check()
        keywords = _keywords(fields.get("keywords"))
        stored_file = None
        if attachment is not None:
            stored_file = service.store.save_attachment(*attachment)
        entry = service.create_entry(
            user.username, notebook_id, title, description, keywords, stored_file
        )
        return _entry_json(entry)

    @app.post("/cynote/cynote/new_comment")
    async def new_comment(request: Request):
        user = _bearer(request)
        fields, attachment = await _body(request)
        payload = _Payload(fields)
        entry_id = payload.integer("entry_id")
        text = payload.text("text")
        payload.check()
        stored_file = None
        if attachment is not None:
            stored_file = service.store.save_attachment(*attachment)
        comment = service.create_comment(user.username, entry_id, text, stored_file)
        return _comment_json(comment)

    @app.get("/cynote/cynote/list_entries")
    async def list_entries(request: Request):
        _bearer(request)
        notebook_id = request.query_params.get("notebook_id")
        if notebook_id is not None:
            if not notebook_id.isdigit():
                raise ValidationError("notebook_id must be an integer", fields=["notebook_id"])
            notebook_id = int(notebook_id)
        entries = service.store.list_entries(notebook_id)
        return [_entry_json(e) for e in entries]

    @app.get("/cynote/cynote/entry")
    async def entry_thread(request: Request):
        _bearer(request)
        raw = request.query_params.get("entry_id", "")
        if not raw.isdigit():
            raise ValidationError("entry_id must be an integer", fields=["entry_id"])
        entry = service.store.get_entry(int(raw))
        comments = service.store.list_comments(entry.id)
        notarizations = service.store.list_notarizations(entry.id)
        return {
            "entry": _entry_json(entry),
            "comments": [_comment_json(c) for c in comments],
            "notarizations": [_notarization_json(n) for n in notarizations],
        }

    @app.get("/cynote/cynote/toc")
    async def toc(request: Request):
        _bearer(request)
        raw = request.query_params.get("notebook_id", "")
        if not raw.isdigit():
            raise ValidationError("notebook_id must be an integer", fields=["notebook_id"])
        rows = service.store.table_of_contents(int(raw))
        return [
            {"entry_id": entry_id, "title": title, "created_utc": created}
            for entry_id, title, created in rows
        ]

    @app.post("/cynote/cynote/notarize")
    async def notarize(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        entry_id = payload.integer("entry_id")
        payload.check()
        notarization = service.notarize_entry(user.username, entry_id)
        return _notarization_json(notarization)

    @app.post("/cynote/cynote/archive")
    async def archive(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        notebook_id = payload.integer("notebook_id")
        payload.check()
        notebook = service.set_archive_state(user.username, notebook_id, True)
        return _notebook_json(notebook)

    @app.post("/cynote/cynote/unarchive")
    async def unarchive(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        notebook_id = payload.integer("notebook_id")
        payload.check()
        notebook = service.set_archive_state(user.username, notebook_id, False)
        return _notebook_json(notebook)

    @app.post("/cynote/cynote/generate_signatures")
    async def generate_signatures(request: Request):
        user = _bearer(request)
        batch_id = service.generate_signatures(user.username)
        return {"batch_id": batch_id}

    @app.get("/cynote/cynote/verify")
    async def verify(request: Request):
        _bearer(request)
        record_kind = request.query_params.get("record_kind", "")
        raw_id = request.query_params.get("record_id", "")
        bad = []
        if record_kind not in ("entry", "comment"):
            bad.append("record_kind")
        if not raw_id.isdigit():
            bad.append("record_id")
        if bad:
            raise ValidationError(
                f"invalid or missing field(s): {', '.join(bad)}", fields=bad
            )
        return _verification_json(service.verify_record(record_kind, int(raw_id)))

    @app.get("/cynote/cynote/results")
    async def results(request: Request):
        user = _bearer(request)
        return [_result_json(r) for r in service.store.list_results(user.username)]

    # -- primer controller ----------------------------------------------

    @app.post("/cynote/primer/analyze")
    async def primer_analyze(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        left = payload.text("left")
        right = payload.text("right")
        monovalent = payload.number("monovalent_mM")
        divalent = payload.number("divalent_mM")
        concentration = payload.number("primer_concentration_M")
        payload.check()
        ions = IonConditions(monovalent, divalent, concentration)
        result = service.analyze_primer_pair(user.username, left, right, ions)
        return _result_json(result)

    # -- sequence controller ----------------------------------------------

    @app.post("/cynote/sequence/transform")
    async def sequence_transform(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        operation = payload.text("operation")
        seq = payload.text("sequence")
        payload.check()
        result = service.sequence_transform(user.username, operation, seq)
        return _result_json(result)

    @app.post("/cynote/sequence/protein")
    async def sequence_protein(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        seq = payload.text("sequence")
        payload.check()
        result = service.sequence_protein_report(user.username, seq)
        return _result_json(result)

    @app.post("/cynote/sequence/restriction")
    async def sequence_restriction(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        seq = payload.text("sequence")
        payload.check()
        enzymes = fields.get("enzymes")
        if enzymes is not None and not isinstance(enzymes, list):
            raise ValidationError("enzymes must be a list of names", fields=["enzymes"])
        result = service.sequence_restriction_map(user.username, seq, enzymes)
        return _result_json(result)

    @app.post("/cynote/sequence/blast")
    async def sequence_blast(request: Request):
        user = _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        program = payload.text("program")
        database = payload.text("database")
        seq = payload.text("sequence")
        payload.check()
        blast_result, stored = service.blast_query(
            user.username, BlastRequest(program, database, seq)
        )
        return {
            "hits": [
                {"id": hit.hit_id, "score": hit.score, "e_value": hit.e_value}
                for hit in blast_result.hits
            ],
            "from_cache": blast_result.from_cache,
            "stored_result": _result_json(stored),
        }

    # -- statistics controller (results are returned, never stored) -------

    @app.post("/cynote/statistics/descriptive")
    async def statistics_descriptive(request: Request):
        _bearer(request)
        fields, _ = await _body(request)
        values = fields.get("values")
        if not isinstance(values, list) or not values:
            raise ValidationError("values must be a non-empty list", fields=["values"])
        try:
            sample = Sample.of([float(v) for v in values])
        except (TypeError, ValueError):
            raise ValidationError("values must be numbers", fields=["values"])
        return descriptive(sample)

    @app.post("/cynote/statistics/regression")
    async def statistics_regression(request: Request):
        _bearer(request)
        fields, _ = await _body(request)
        xs = fields.get("xs")
        ys = fields.get("ys")
        bad = [
            name
            for name, value in (("xs", xs), ("ys", ys))
            if not isinstance(value, list) or not value
        ]
        if bad:
            raise ValidationError(
                f"invalid or missing field(s): {', '.join(bad)}", fields=bad
            )
        try:
            xs = [float(v) for v in xs]
            ys = [float(v) for v in ys]
        except (TypeError, ValueError):
            raise ValidationError("xs and ys must be numbers", fields=["xs", "ys"])
        return linear_regression_pearson(xs, ys)

    @app.post("/cynote/statistics/table2x2")
    async def statistics_table2x2(request: Request):
        _bearer(request)
        fields, _ = await _body(request)
        payload = _Payload(fields)
        a = payload.integer("a")
        b = payload.integer("b")
        c = payload.integer("c")
        d = payload.integer("d")
        payload.check()
        table = Table2x2(a, b, c, d)

        def _maybe(fn, *args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except DomainError as exc:
                return {"undefined": exc.message}

        def _test_json(test):
            return (
                {"statistic": test.statistic, "df": test.df, "p_value": test.p_value,
                 "method": test.method}
                if not isinstance(test, dict)
                else test
            )

        return {
            "phi": _maybe(phi_coefficient, table),
            "kappa": _maybe(cohens_kappa, table),
            "p1_minus_p2": _maybe(proportion_difference, table),
            "relative_risk": _maybe(relative_risk, table),
            "odds_ratio": _maybe(odds_ratio, table),
            "z_correlated": _test_json(_maybe(z_correlated_proportions, table)),
            "chi_square": _test_json(_maybe(chi_square_2x2, table, yates=False)),
            "chi_square_yates": _test_json(_maybe(chi_square_2x2, table, yates=True)),
            "mcnemar": _test_json(_maybe(mcnemar, table, yates=False)),
            "mcnemar_yates": _test_json(_maybe(mcnemar, table, yates=True)),
        }

    @app.post("/cynote/statistics/tablerxc")
    async def statistics_tablerxc(request: Request):
        """Grid input runs the RxC battery; observed+expected runs goodness of fit."""
        _bearer(request)
        fields, _ = await _body(request)
        if "observed" in fields:
            observed = fields.get("observed")
            expected = fields.get("expected_proportions")
            bad = []
            if not isinstance(observed, list) or not observed:
                bad.append("observed")
            if not isinstance(expected, list) or not expected:
                bad.append("expected_proportions")
            if bad:
                raise ValidationError(
                    f"invalid or missing field(s): {', '.join(bad)}", fields=bad
                )
            test = chi_square_gof(observed, [float(p) for p in expected])
            return {
                "statistic": test.statistic, "df": test.df, "p_value": test.p_value,
                "method": test.method,
            }
        counts = fields.get("counts")
        if not isinstance(counts, list) or not all(isinstance(r, list) for r in counts):
            raise ValidationError("counts must be a grid of integers", fields=["counts"])
        table = TableRxC.of(counts)

        def _maybe(fn, *args):
            try:
                return fn(*args)
            except DomainError as exc:
                return {"undefined": exc.message}

        chi = _maybe(chi_square_rxc, table)
        if not isinstance(chi, dict):
            chi = {
                "statistic": chi.statistic, "df": chi.df, "p_value": chi.p_value,
                "method": chi.method,
            }
        return {
            "chi_square": chi,
            "gamma": _maybe(gk_gamma, table),
            "tau_a": _maybe(kendall_tau_a, table),
            "tau_c": _maybe(kendall_tau_c, table),
        }

    # -- savedatabase controller -------------------------------------------

    @app.post("/cynote/savedatabase/backup")
    async def savedatabase_backup(request: Request):
        user = _bearer(request)
        manifest = service.backup(user.username)
        return {
            "remote_dir": manifest.remote_dir,
            "dump_name": manifest.dump_name,
            "attachment_names": manifest.attachment_names,
            "created_utc": format_ts(manifest.created_utc),
        }

    return app
