"""Command-line entry points: serve the API, manage accounts, export,
back up, and verify integrity."""

from __future__ import annotations

import argparse
import getpass
import sys
from pathlib import Path

from .api import create_app
from .config import Config
from .errors import CynoteError
from .integrity import GAP_CHECK_TABLES
from .service import CynoteService


def _service(args) -> CynoteService:
    return CynoteService(Config.load(args.config))


def cmd_serve(args) -> int:
    import uvicorn

    service = _service(args)
    app = create_app(service)
    uvicorn.run(app, host=service.config.server.bind, port=service.config.server.port)
    return 0


def cmd_newaccount(args) -> int:
    service = _service(args)
    password = args.password or getpass.getpass("Password: ")
    user = service.accounts.create_account(args.username, password)
    state = "authorized" if user.authorized else "awaiting authorization"
    print(f"created account {user.username!r} ({state})")
    return 0


def cmd_export(args) -> int:
    service = _service(args)
    data = service.export_dump().to_bytes()
    if args.out == "-":
        sys.stdout.buffer.write(data)
    else:
        Path(args.out).write_bytes(data)
        print(f"wrote {len(data)} bytes to {args.out}")
    return 0


def cmd_backup(args) -> int:
    service = _service(args)
    manifest = service.backup(args.username)
    print(f"backed up as {manifest.remote_dir}/{manifest.dump_name}")
    print(f"attachments: {len(manifest.attachment_names)}")
    return 0


def cmd_verify(args) -> int:
    service = _service(args)
    problems = 0
    for table in GAP_CHECK_TABLES:
        gaps = service.integrity.detect_sequence_gaps(table)
        if gaps:
            problems += 1
            print(f"GAPS {table}: missing ids {gaps}")
        else:
            print(f"ok   {table}: no gaps")
    for report in service.integrity.verify_all():
        line = f"{report.record_kind} {report.record_id}: {report.status}"
        if report.status == "tampered":
            problems += 1
            line += f" (first divergent batch {report.first_divergent_batch})"
        print(line)
    return 1 if problems else 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="cynote", description="append-only electronic laboratory notebook service"
    )
    parser.add_argument("--config", default=None, help="path to a JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("serve", help="run the HTTP API").set_defaults(func=cmd_serve)

    new_account = sub.add_parser("newaccount", help="create a user account")
    new_account.add_argument("username")
    new_account.add_argument("--password", default=None, help="omit to be prompted")
    new_account.set_defaults(func=cmd_newaccount)

    export = sub.add_parser("export", help="write the human-readable text dump")
    export.add_argument("--out", default="-", help="output path, - for stdout")
    export.set_defaults(func=cmd_export)

    backup = sub.add_parser("backup", help="back up dump and attachments")
    backup.add_argument("username", help="acting user (must be authorized)")
    backup.set_defaults(func=cmd_backup)

    verify = sub.add_parser("verify", help="check id gaps and signatures")
    verify.set_defaults(func=cmd_verify)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CynoteError as exc:
        print(f"error ({exc.code}): {exc.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
