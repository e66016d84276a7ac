"""Administrator command line: provisioning, batch I/O, reports, simulation.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 invariant
violation (simulation only).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Any

from .domain import PlatformError, Role, User
from .runtime import ENV_BIND, ENV_DATA_DIR, open_platform_from_env
from .simulate import (
    SimulationConfig,
    SimulationInvariantError,
    SimulationParameterError,
    run_simulation,
)
from .spectrum import InvolvementProfile, classify
from .workflow import ImportItem

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INVARIANT = 3

# profiles actually published in the involvement-spectrum mapping; anything
# else is classified by rule extrapolation and the output says so
PUBLISHED_PROFILES = {"EEEE", "EECS", "ESSS", "SSCS", "CCCC"}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_VALIDATION):
        super().__init__(message)
        self.exit_code = exit_code


class Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit 2; that slot is for I/O
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_VALIDATION)


def _resolve_actor(platform, actor_id: str | None, role: Role) -> User:
    wf = platform.workflow
    if actor_id:
        return wf.get_user(actor_id)
    matches = platform.store.query("user", {"role": role.value})
    if len(matches) == 1:
        return User.from_doc(matches[0].payload, matches[0].version)
    raise CliError(
        f"--actor required: found {len(matches)} users with role {role.value}"
    )


def _read_import_file(path: Path) -> list[ImportItem]:
    """Parse an NDJSON import file; any malformed line rejects the whole file."""
    try:
        raw = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_IO)
    items: list[ImportItem] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CliError(f"line {lineno}: not valid JSON ({exc.msg})")
        if not isinstance(doc, dict) or not isinstance(doc.get("en"), str) or not doc["en"].strip():
            raise CliError(f'line {lineno}: expected {{"en": <non-blank string>, "id": <optional string>}}')
        sid = doc.get("id")
        if sid is not None and (not isinstance(sid, str) or not sid.strip()):
            raise CliError(f'line {lineno}: "id" must be a non-empty string when present')
        items.append(ImportItem(english_text=doc["en"], sentence_id=sid))
    if not items:
        raise CliError("import file contains no records")
    return items


def cmd_users(args) -> int:
    platform = open_platform_from_env(args.data_dir)
    try:
        if args.users_command == "create":
            user, credential = platform.workflow.create_user(
                args.name, Role(args.role), user_id=args.id, credential=args.credential
            )
            print(f"created {user.role.value} {user.id} ({user.display_name})")
            print(f"credential: {credential}")
        else:
            for rec in platform.store.query("user"):
                u = rec.payload
                print(
                    f"{u['id']}  {u['role']:<10}  {u['display_name']}  "
                    f"approved={u['approved_count']} submitted={u['submitted_count']}"
                )
        return EXIT_OK
    finally:
        platform.close()


def cmd_import(args) -> int:
    items = _read_import_file(Path(args.file))
    platform = open_platform_from_env(args.data_dir)
    try:
        actor = _resolve_actor(platform, args.actor, Role.ADMIN)
        summary = platform.workflow.import_batch(actor, args.batch, items)
        print(f"imported {summary.imported}, skipped {summary.skipped_duplicates}")
        return EXIT_OK
    finally:
        platform.close()


def cmd_export(args) -> int:
    platform = open_platform_from_env(args.data_dir)
    try:
        actor = _resolve_actor(platform, args.actor, Role.ADMIN)
        records = platform.workflow.export_approved(actor, mark_exported=args.mark)
        try:
            with open(args.out, "w", encoding="utf-8") as f:
                for record in records:
                    f.write(json.dumps(record.to_line(), ensure_ascii=False) + "\n")
        except OSError as exc:
            raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO)
        print(f"exported {len(records)} records")
        return EXIT_OK
    finally:
        platform.close()


def cmd_stats(args) -> int:
    platform = open_platform_from_env(args.data_dir)
    try:
        print(platform.analytics.stats_report())
        for batch in platform.analytics.batches():
            counts = platform.analytics.progress(batch)
            summary = " ".join(f"{k}={v}" for k, v in counts.items() if v)
            print(f"batch {batch}: {summary or 'empty'}")
        return EXIT_OK
    finally:
        platform.close()


def cmd_ledger(args) -> int:
    platform = open_platform_from_env(args.data_dir)
    try:
        ledger = platform.ledger
        if args.ledger_command == "contribute":
            entry = ledger.contribute(args.member, args.amount_toea)
            print(f"recorded contribution seq={entry.seq} amount={entry.amount_minor} toea")
        elif args.ledger_command == "disburse":
            entry = ledger.disburse(args.translator, args.amount_toea)
            print(f"recorded disbursement seq={entry.seq} amount={entry.amount_minor} toea")
        elif args.ledger_command == "export":
            try:
                with open(args.out, "w", encoding="utf-8") as f:
                    for entry in ledger.entries():
                        f.write(json.dumps(entry.to_doc(), ensure_ascii=False) + "\n")
            except OSError as exc:
                raise CliError(f"cannot write {args.out}: {exc}", EXIT_IO)
            print(f"exported {len(ledger.entries())} entries")
        else:
            print(ledger.report())
        return EXIT_OK
    finally:
        platform.close()


def _spectrum_line(name: str, profile: InvolvementProfile) -> str:
    level = classify(profile)
    codes = " ".join(profile.codes())
    return f"{name:<28} {codes}   {level.level}  {level.label}"


def cmd_spectrum(args) -> int:
    if args.batch:
        path = Path(args.batch)
        try:
            raw = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc}", EXIT_IO)
        print(f"{'work':<28} I D O G  level")
        extrapolated = False
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                profile = InvolvementProfile.from_codes(
                    doc["codes"], bool(doc.get("consultation_only", False))
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise CliError(f"line {lineno}: {exc}")
            name = doc.get("name", f"line {lineno}")
            print(_spectrum_line(name, profile))
            extrapolated = extrapolated or profile.codes() not in PUBLISHED_PROFILES
        if extrapolated:
            print("note: some profiles fall outside the published mapping; their levels are rule-based extrapolations")
        return EXIT_OK

    profile = InvolvementProfile.from_codes(args.codes, args.consultation)
    level = classify(profile)
    print(f"level {level.level}: {level.label}")
    if profile.codes() not in PUBLISHED_PROFILES:
        print("note: profile falls outside the published mapping; the level is a rule-based extrapolation")
    return EXIT_OK


def cmd_simulate(args) -> int:
    config = SimulationConfig(
        sentences=args.sentences,
        translators=args.translators,
        reviewers=args.reviewers,
        p1=args.p1,
        p2=args.p2,
        seed=args.seed,
        check_every=args.check_every,
    )
    if args.data_dir:
        result = run_simulation(config, args.data_dir)
    else:
        with tempfile.TemporaryDirectory(prefix="corpusforge-sim-") as tmp:
            result = run_simulation(config, tmp)
    print(result.report)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .api import create_app

    platform = open_platform_from_env(args.data_dir)
    app = create_app(platform, ui_dir=args.ui_dir)
    host, _, port = (args.bind or os.environ.get(ENV_BIND, "127.0.0.1:8321")).rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return EXIT_OK


def build_parser() -> Parser:
    parser = Parser(prog="corpusforge", description="community parallel-corpus platform")
    parser.add_argument("--data-dir", default=None, help=f"data directory (or ${ENV_DATA_DIR})")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("users", help="provision and inspect users")
    usub = p.add_subparsers(dest="users_command", required=True)
    pc = usub.add_parser("create")
    pc.add_argument("--name", required=True)
    pc.add_argument("--role", required=True, choices=[r.value for r in Role])
    pc.add_argument("--id", default=None)
    pc.add_argument("--credential", default=None)
    pc.set_defaults(func=cmd_users)
    pl = usub.add_parser("list")
    pl.set_defaults(func=cmd_users)

    p = sub.add_parser("import", help="import a batch of English source lines")
    p.add_argument("file")
    p.add_argument("--batch", required=True)
    p.add_argument("--actor", default=None, help="admin user id (default: the sole admin)")
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("export", help="export approved pairs as NDJSON")
    p.add_argument("out")
    p.add_argument("--mark", action="store_true", help="transition exported sentences to exported")
    p.add_argument("--actor", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("stats", help="corpus and participation report")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("ledger", help="incentive ledger operations")
    lsub = p.add_subparsers(dest="ledger_command", required=True)
    lr = lsub.add_parser("report")
    lr.set_defaults(func=cmd_ledger)
    lc = lsub.add_parser("contribute")
    lc.add_argument("--member", required=True)
    lc.add_argument("--amount-toea", type=int, required=True)
    lc.set_defaults(func=cmd_ledger)
    ld = lsub.add_parser("disburse")
    ld.add_argument("--translator", required=True)
    ld.add_argument("--amount-toea", type=int, required=True)
    ld.set_defaults(func=cmd_ledger)
    le = lsub.add_parser("export")
    le.add_argument("out")
    le.set_defaults(func=cmd_ledger)

    p = sub.add_parser("spectrum", help="community-involvement classification")
    p.add_argument("codes", nargs="?", default=None, help="4 letters I/D/O/G from E, S, C")
    p.add_argument("--consultation", action="store_true",
                   help="community consulted only (no data or labor contributed)")
    p.add_argument("--batch", default=None, help="NDJSON file of profiles to classify")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("simulate", help="deterministic full-pipeline simulation")
    p.add_argument("--sentences", type=int, default=2000)
    p.add_argument("--translators", type=int, default=77)
    p.add_argument("--reviewers", type=int, default=4)
    p.add_argument("--p1", type=float, default=0.91)
    p.add_argument("--p2", type=float, default=8 / 9)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--check-every", type=int, default=500)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--bind", default=None, help=f"host:port (or ${ENV_BIND})")
    p.add_argument("--ui-dir", default=None, help="static directory for the web client")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "spectrum" and not args.batch and not args.codes:
        print("error: provide a 4-letter profile or --batch FILE", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except SimulationInvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (SimulationParameterError, PlatformError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
