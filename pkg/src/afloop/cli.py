"""Command line interface.

Subcommands that need the harness configuration load it from --config or the
AFLOOP_CONFIG environment variable. `deps` and `check` also work standalone
on a file with explicit options.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request
from pathlib import Path

from .api import SECRET_HEADER, serve_api
from .checker import SpawnFailure, run_check
from .config import (
    DEFAULT_BOUNDARY_MARKER,
    ConfigError,
    HarnessConfig,
    default_config_path,
    load_config,
)
from .deps import build_graph, compute_recadmit
from .ledger import GuardViolation, create_backup, ledger_lock, read_ledger
from .orchestrator import Orchestrator
from .parser import ParseError, parse_items, resolve_boundary
from .reports import (
    format_deps_line,
    format_progress_line,
    growth_csv,
    growth_table,
    major_theorems,
    section_progress,
)
from .session import TmuxProvider


def _load_config(args) -> HarnessConfig:
    path = getattr(args, "config", None) or default_config_path()
    if path is None:
        raise ConfigError("no config: pass --config or set AFLOOP_CONFIG")
    return load_config(Path(path))


def _analyzed(text: str, marker: str):
    items = parse_items(text)
    graph = build_graph(items, resolve_boundary(text, marker))
    compute_recadmit(graph)
    return items, graph


def cmd_deps(args) -> int:
    text = Path(args.file).read_text()
    _, graph = _analyzed(text, args.marker)
    for record in graph.in_order():
        print(format_deps_line(record))
    for name, dep in graph.forward_refs:
        print(f"(forward reference: {name} mentions {dep})", file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    if args.command:
        template, timeout = args.command, args.timeout or 30.0
    else:
        config = _load_config(args)
        template = config.checker_template
        timeout = args.timeout or config.checker_timeout
    try:
        result = run_check(template, Path(args.file), timeout)
    except SpawnFailure as exc:
        print(f"spawn failure: {exc}", file=sys.stderr)
        return 2
    print(f"{result.status.value} ({result.duration:.2f}s)")
    if result.output:
        sys.stdout.write(result.output)
    return 0 if result.status.value == "success" else 1


def cmd_backup(args) -> int:
    config = _load_config(args)
    text = config.working_file.read_text()
    with ledger_lock(config.ledger_dir):
        outcome = create_backup(
            text, config.ledger_dir, args.note, justified_shrink=args.justify_shrink
        )
    if isinstance(outcome, GuardViolation):
        print(f"rejected: {outcome.kind.value}: {outcome.detail}", file=sys.stderr)
        return 1
    print(f"wrote {outcome.file_name} ({outcome.line_count} lines)")
    return 0


def cmd_report(args) -> int:
    config = _load_config(args)
    if args.what == "growth":
        rows = growth_table(read_ledger(config.ledger_dir), args.stride or config.stride)
        if args.csv:
            sys.stdout.write(growth_csv(rows))
        else:
            for number, lines in rows:
                print(f"{number}\t{lines}")
        return 0
    entries = read_ledger(config.ledger_dir)
    if not entries:
        print("no backups yet", file=sys.stderr)
        return 1
    text = (config.ledger_dir / entries[-1].file_name).read_text()
    items, graph = _analyzed(text, config.boundary_marker)
    if args.what == "sections":
        for status in section_progress(graph, items):
            print(format_progress_line(status))
    else:  # major
        for name, lines, dep_count in major_theorems(graph, args.min_lines):
            print(f"{name}\t{lines}\t{dep_count}")
    return 0


def cmd_override(args) -> int:
    config = _load_config(args)
    body = json.dumps({"text": args.text}).encode()
    request = urllib.request.Request(
        f"http://127.0.0.1:{config.api_port}/override",
        data=body,
        headers={"Content-Type": "application/json", SECRET_HEADER: config.api_secret},
        method="POST",
    )
    try:
        with urllib.request.urlopen(request, timeout=10) as response:
            payload = json.loads(response.read())
    except urllib.error.HTTPError as exc:
        print(f"rejected ({exc.code}): {exc.read().decode(errors='replace')}", file=sys.stderr)
        return 1
    except urllib.error.URLError as exc:
        print(f"harness unreachable: {exc.reason}", file=sys.stderr)
        return 1
    print(f"queued; pending overrides: {payload['status']['pending_overrides']}")
    return 0


def _run_loop(args, with_api: bool) -> int:
    config = _load_config(args)
    provider = TmuxProvider(target=config.tmux_target)
    orchestrator = Orchestrator(config, provider)
    server = None
    lock = ledger_lock(config.ledger_dir)
    try:
        lock.acquire(timeout=0)
    except Exception:
        print(f"another writer holds {lock.lock_file}", file=sys.stderr)
        return 1
    try:
        if with_api:
            server = serve_api(orchestrator, config.api_port)
            print(f"api listening on 127.0.0.1:{config.api_port}")
        print(f"supervising {config.working_file} every {config.idle.interval:.0f}s")
        orchestrator.run()
    except KeyboardInterrupt:
        print("stopping")
    finally:
        if server is not None:
            server.shutdown()
        lock.release()
    return 0


def cmd_run(args) -> int:
    return _run_loop(args, with_api=False)


def cmd_serve(args) -> int:
    return _run_loop(args, with_api=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afloop",
        description="Supervise a coding agent growing a proof-script file.",
    )
    parser.add_argument("--config", help="config file (default: $AFLOOP_CONFIG)")
    # accepted both before and after the subcommand
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--config", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command_name", required=True)

    p_deps = sub.add_parser(
        "deps", parents=[shared], help="print dependency/admit lines for a file"
    )
    p_deps.add_argument("file")
    p_deps.add_argument("--marker", default=DEFAULT_BOUNDARY_MARKER)
    p_deps.set_defaults(func=cmd_deps)

    p_check = sub.add_parser("check", parents=[shared], help="run the proof checker on a file")
    p_check.add_argument("file")
    p_check.add_argument("--command", help="checker template with {file} placeholder")
    p_check.add_argument("--timeout", type=float)
    p_check.set_defaults(func=cmd_check)

    p_backup = sub.add_parser(
        "backup", parents=[shared], help="snapshot the working file into the ledger"
    )
    p_backup.add_argument("--note", required=True)
    p_backup.add_argument("--justify-shrink", action="store_true")
    p_backup.set_defaults(func=cmd_backup)

    p_report = sub.add_parser(
        "report", parents=[shared], help="print growth, section, or major-theorem reports"
    )
    p_report.add_argument("what", choices=["growth", "sections", "major"])
    p_report.add_argument("--stride", type=int)
    p_report.add_argument("--csv", action="store_true")
    p_report.add_argument("--min-lines", type=int, default=300)
    p_report.set_defaults(func=cmd_report)

    p_override = sub.add_parser(
        "override", parents=[shared], help="queue a one-shot prompt for the live loop"
    )
    p_override.add_argument("text")
    p_override.set_defaults(func=cmd_override)

    p_run = sub.add_parser("run", parents=[shared], help="run the supervision loop")
    p_run.set_defaults(func=cmd_run)

    p_serve = sub.add_parser(
        "serve", parents=[shared], help="run the loop plus the local HTTP API"
    )
    p_serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
