"""The long-running control loop.

Each tick: capture the agent's pane; if the last two captures are identical
(the agent is idle) inject exactly one prompt — a pending violation alert,
else the oldest unconsumed operator override, else the standing prompt. Then
scan the ledger directory for backups the agent wrote: enforce numbering and
shrink rules, diff the protected region against the last accepted snapshot,
run the proof checker, rebuild the dependency graph, and emit DEPS/PROGRESS
files. Violations never stop the loop; they are logged once, surfaced in the
status, and (configurably) turned into an alert injection.

All durable state lives on disk (ledger directory + JSONL event log), so a
restarted orchestrator reconstructs its counts exactly.
"""

from __future__ import annotations

import datetime as _dt
import hashlib
import threading
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import ledger as ledger_mod
from .checker import SpawnFailure, run_check
from .config import HarnessConfig
from .deps import DepGraph, build_graph, compute_recadmit, bottleneck_ranking
from .events import EventLog, replay
from .ledger import GuardViolation, ViolationKind, backup_number, validate_edit
from .parser import (
    EditRegionPolicy,
    MarkerNotFound,
    ParseError,
    ProofItem,
    parse_items,
)
from .reports import (
    format_deps_line,
    growth_table,
    section_progress,
    write_deps_file,
    write_progress_file,
)
from .session import (
    FileMissing,
    ProviderUnavailable,
    SessionDriver,
    SessionProvider,
    SessionSnapshot,
    WatchdogState,
    is_idle,
    maybe_refresh_checkpoint,
    rollback_session,
    watchdog_check,
)


class EmptyOverride(ValueError):
    pass


class AlreadyPaused(RuntimeError):
    pass


class NotPaused(RuntimeError):
    pass


@dataclass
class OverrideRequest:
    text: str
    submitted_at: float
    consumed: bool = False


@dataclass
class _SeenBackup:
    sha: str
    stat: tuple[int, int]  # (size, mtime_ns)
    accepted: bool


def _iso(ts: float | None) -> str | None:
    if ts is None:
        return None
    return _dt.datetime.fromtimestamp(ts, _dt.timezone.utc).isoformat()


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class Orchestrator:
    def __init__(
        self,
        config: HarnessConfig,
        provider: SessionProvider,
        clock: Callable[[], float] = time.time,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.config = config
        self.clock = clock
        self.sleep = sleep
        self.driver = SessionDriver(
            provider,
            capture_dir=config.capture_dir,
            injection_log=config.injection_log,
            policy=config.idle,
            clock=clock,
            sleep=sleep,
            keep_all=config.keep_all_captures,
        )
        self.events = EventLog(config.log_file)
        self.lock = threading.RLock()

        self._overrides: deque[OverrideRequest] = deque()
        self._alerts: deque[str] = deque()
        self._paused = False
        self._stop = threading.Event()
        self._prev_snapshot: SessionSnapshot | None = None
        self._seen: dict[int, _SeenBackup] = {}
        self._baseline_number = 0
        self._baseline_text: str | None = None
        self._last_checker: dict | None = None
        self._last_injection_at: float | None = None
        self._latest_graph: DepGraph | None = None
        self._latest_items: list[ProofItem] = []
        self._latest_deps_number = 0
        self._last_checkpoint_refresh = self.clock()

        self.config.ledger_dir.mkdir(parents=True, exist_ok=True)
        self._recover_from_disk()

    # -- crash recovery --------------------------------------------------

    def _recover_from_disk(self) -> None:
        on_disk = {
            n: path
            for path in self.config.ledger_dir.iterdir()
            if (n := backup_number(path.name)) is not None and path.is_file()
        }
        analyzed: set[int] = set()
        replayed = False
        for event in replay(self.config.log_file):
            if event.get("event") != "backup_processed":
                continue
            number = event.get("number")
            if number not in on_disk:
                continue
            replayed = True
            path = on_disk[number]
            stat = path.stat()
            sha = _sha256(path.read_bytes())
            logged_sha = event.get("sha256", "")
            if logged_sha and sha != logged_sha:
                self._violation(
                    GuardViolation(
                        ViolationKind.BACKUP_OVERWRITE,
                        f"bck{number} changed while the orchestrator was down",
                    ),
                    number=number,
                )
            self._seen[number] = _SeenBackup(
                sha=sha,
                stat=(stat.st_size, stat.st_mtime_ns),
                accepted=bool(event.get("accepted")),
            )
            if event.get("analyzed"):
                analyzed.add(number)
            if event.get("checker") is not None:
                self._last_checker = {"backup": number, **event["checker"]}
        if not replayed:
            # no usable log: treat every backup with a DEPS file as accepted
            for number, path in on_disk.items():
                if (self.config.ledger_dir / f"DEPS{number}").exists():
                    stat = path.stat()
                    self._seen[number] = _SeenBackup(
                        sha=_sha256(path.read_bytes()),
                        stat=(stat.st_size, stat.st_mtime_ns),
                        accepted=True,
                    )
                    analyzed.add(number)
        accepted = [n for n, seen in self._seen.items() if seen.accepted and n in on_disk]
        if not accepted:
            return
        number = max(accepted)
        self._baseline_number = number
        self._baseline_text = on_disk[number].read_text()
        # counts come from the newest backup that actually analyzed pre-crash
        for candidate in sorted(analyzed, reverse=True):
            try:
                self._analyze(candidate, on_disk[candidate].read_text(), write_files=False)
                return
            except ParseError as exc:
                self.events.append(
                    "recovery_error", self.clock(), number=candidate, error=str(exc)
                )

    # -- public control surface ------------------------------------------

    def enqueue_override(self, text: str) -> OverrideRequest:
        if not text:
            raise EmptyOverride("override text must be non-empty")
        request = OverrideRequest(text=text, submitted_at=self.clock())
        with self.lock:
            self._overrides.append(request)
        self.events.append("override_enqueued", self.clock(), text=text[:200])
        return request

    def pause(self) -> dict:
        with self.lock:
            if self._paused:
                raise AlreadyPaused()
            self._paused = True
        self.events.append("paused", self.clock())
        return self.status()

    def resume(self) -> dict:
        with self.lock:
            if not self._paused:
                raise NotPaused()
            self._paused = False
        self.events.append("resumed", self.clock())
        return self.status()

    def stop(self) -> None:
        self._stop.set()

    # -- status / payloads -------------------------------------------------

    def status(self) -> dict:
        with self.lock:
            graph = self._latest_graph
            admits = recadmits = total = 0
            if graph is not None:
                records = graph.in_order()
                total = len(records)
                admits = sum(1 for r in records if r.direct_admit)
                recadmits = sum(1 for r in records if r.recadmit)
            return {
                "last_backup_number": self._baseline_number,
                "last_checker_result": self._last_checker,
                "last_injection_at": _iso(self._last_injection_at),
                "paused": self._paused,
                "admit_count": admits,
                "recadmit_count": recadmits,
                "total_items": total,
                "pending_overrides": sum(1 for o in self._overrides if not o.consumed),
            }

    def deps_payload(self) -> dict:
        with self.lock:
            graph = self._latest_graph
            records = []
            if graph is not None:
                for record in graph.in_order():
                    records.append(
                        {
                            "name": record.name,
                            "kind": record.kind_letter,
                            "lines": record.lines,
                            "admit": record.direct_admit,
                            "recadmit": bool(record.recadmit),
                            "deps": [{"name": n, "kind": k} for n, k in record.deps],
                            "line": format_deps_line(record),
                        }
                    )
            return {"backup_number": self._latest_deps_number, "records": records}

    def sections_payload(self) -> dict:
        with self.lock:
            if self._latest_graph is None:
                graph, items = DepGraph(), []
            else:
                graph, items = self._latest_graph, self._latest_items
            statuses = section_progress(graph, items)
        return {
            "sections": [
                {
                    "section": s.section,
                    "level": s.level.value,
                    "stated": s.stated_count,
                    "proved": s.proved_count,
                    "total": s.total_count,
                }
                for s in statuses
            ]
        }

    def bottlenecks_payload(self) -> dict:
        with self.lock:
            graph = self._latest_graph
            rows = bottleneck_ranking(graph) if graph is not None else []
        return {"rows": [{"name": name, "blocked_count": count} for name, count in rows]}

    def growth_payload(self, stride: int | None = None) -> dict:
        stride = stride or self.config.stride
        entries = ledger_mod.read_ledger(self.config.ledger_dir)
        rows = growth_table(entries, stride)
        return {
            "stride": stride,
            "rows": [{"number": n, "lines": lines} for n, lines in rows],
        }

    # -- the loop ----------------------------------------------------------

    def tick(self) -> None:
        """One iteration; safe to call directly in tests."""
        paused = self._paused
        try:
            snapshot = self.driver.capture()
        except ProviderUnavailable as exc:
            # session gone (multiplexer restart, detach): keep processing
            # backups, try capturing again next tick
            self.events.append("session_unavailable", self.clock(), error=str(exc))
            self._prev_snapshot = None
        else:
            previous = self._prev_snapshot
            self._prev_snapshot = snapshot
            if not paused and previous is not None and is_idle(previous, snapshot):
                self._inject_one()
        if not paused:
            self._scan_ledger()
        self._run_watchdog()

    def run(
        self,
        max_ticks: int | None = None,
        stop_when: Callable[["Orchestrator"], bool] | None = None,
    ) -> None:
        ticks = 0
        while not self._stop.is_set():
            self.tick()
            ticks += 1
            if max_ticks is not None and ticks >= max_ticks:
                return
            if stop_when is not None and stop_when(self):
                return
            self.sleep(self.config.idle.interval)

    # -- injection ----------------------------------------------------------

    def _inject_one(self) -> None:
        with self.lock:
            if self._alerts:
                kind, text = "alert", self._alerts.popleft()
            else:
                override = next((o for o in self._overrides if not o.consumed), None)
                if override is not None:
                    override.consumed = True
                    kind, text = "override", override.text
                else:
                    kind, text = "standing", self.config.idle.standing_prompt
        self.driver.inject_prompt(text)
        self._last_injection_at = self.clock()
        self.events.append("injection", self.clock(), kind=kind, text=text[:120])

    # -- ledger scan ----------------------------------------------------------

    def _scan_ledger(self) -> None:
        directory = self.config.ledger_dir
        found: dict[int, Path] = {}
        for path in directory.iterdir():
            number = backup_number(path.name)
            if number is not None and path.is_file():
                found[number] = path

        self._detect_overwrites(found)

        new_numbers = sorted(n for n in found if n not in self._seen)
        for number in new_numbers:
            self._process_backup(number, found[number])

    def _detect_overwrites(self, found: dict[int, Path]) -> None:
        for number, seen in list(self._seen.items()):
            path = found.get(number)
            if path is None:
                continue
            stat = path.stat()
            current = (stat.st_size, stat.st_mtime_ns)
            if current == seen.stat:
                continue
            sha = _sha256(path.read_bytes())
            if sha != seen.sha:
                self._violation(
                    GuardViolation(
                        ViolationKind.BACKUP_OVERWRITE,
                        f"bck{number} was rewritten after being recorded",
                    ),
                    number=number,
                )
                seen.sha = sha
            seen.stat = current

    def _process_backup(self, number: int, path: Path) -> None:
        data = path.read_bytes()
        text = data.decode("utf-8", errors="replace")
        sha = _sha256(data)
        stat = path.stat()
        violations: list[GuardViolation] = []
        accepted = True

        max_seen = max(self._seen, default=0)
        if number <= max_seen:
            violations.append(
                GuardViolation(
                    ViolationKind.NON_MONOTONIC_NUMBER,
                    f"bck{number} appeared after bck{max_seen}",
                )
            )
            accepted = False

        if accepted and self._baseline_text is not None:
            new_count = ledger_mod.line_count(text)
            old_count = ledger_mod.line_count(self._baseline_text)
            if new_count < old_count:
                note_path = self.config.ledger_dir / f"CHANGES{number}"
                note = note_path.read_text() if note_path.exists() else ""
                if ledger_mod.SHRINK_MARKER not in note:
                    violations.append(
                        GuardViolation(
                            ViolationKind.UNJUSTIFIED_SHRINK,
                            f"bck{number} shrank from {old_count} to {new_count} lines "
                            f"with no justification in CHANGES{number}",
                        )
                    )
                    accepted = False

        if accepted and self._baseline_text is not None:
            try:
                policy = EditRegionPolicy.resolve(
                    self._baseline_text, self.config.boundary_marker
                )
            except MarkerNotFound as exc:
                self.events.append(
                    "guard_skipped", self.clock(), number=number, error=str(exc)
                )
            else:
                violation = validate_edit(self._baseline_text, text, policy)
                if violation is not None:
                    # the snapshot is still the agent's current state: flag it,
                    # keep analyzing, and move the baseline forward so the same
                    # breach is not re-reported on every later backup
                    violations.append(violation)

        checker_summary = None
        if accepted:
            try:
                result = run_check(self.config.checker_template, path, self.config.checker_timeout)
                checker_summary = {
                    "status": result.status.value,
                    "duration": round(result.duration, 3),
                    "output": result.output[:400],
                }
            except SpawnFailure as exc:
                checker_summary = {"status": "spawn-failure", "error": str(exc)}
            self._last_checker = {"backup": number, **checker_summary}

        analyzed = False
        if accepted:
            try:
                self._analyze(number, text, write_files=True)
                analyzed = True
            except ParseError as exc:
                self.events.append(
                    "backup_error", self.clock(), number=number, error=str(exc)
                )
            self._baseline_number = number
            self._baseline_text = text

        self._seen[number] = _SeenBackup(
            sha=sha, stat=(stat.st_size, stat.st_mtime_ns), accepted=accepted
        )
        for violation in violations:
            self._violation(violation, number=number)
        self.events.append(
            "backup_processed",
            self.clock(),
            number=number,
            sha256=sha,
            accepted=accepted,
            analyzed=analyzed,
            violations=[v.kind.value for v in violations],
            checker=checker_summary,
        )

    def _analyze(self, number: int, text: str, write_files: bool) -> None:
        items = parse_items(text)
        try:
            boundary = EditRegionPolicy.resolve(text, self.config.boundary_marker).boundary_line
        except MarkerNotFound:
            boundary = 1  # no marker yet: the whole file is the region
        graph = build_graph(items, boundary)
        compute_recadmit(graph)
        for name, dep in graph.forward_refs:
            self.events.append(
                "forward_reference", self.clock(), number=number, item=name, dep=dep
            )
        with self.lock:
            self._latest_graph = graph
            self._latest_items = items
            self._latest_deps_number = number
        if not write_files:
            return
        try:
            write_deps_file(graph, number, self.config.ledger_dir)
            write_progress_file(section_progress(graph, items), number, self.config.ledger_dir)
        except FileExistsError as exc:
            self.events.append("report_exists", self.clock(), number=number, error=str(exc))

    def _violation(self, violation: GuardViolation, number: int) -> None:
        self.events.append(
            "violation",
            self.clock(),
            kind=violation.kind.value,
            number=number,
            detail=violation.detail,
        )
        if self.config.alert_on_violation:
            with self.lock:
                self._alerts.append(
                    f"Protocol violation detected ({violation.kind.value}): "
                    f"{violation.detail}. Re-read the rules file, do not repeat this, "
                    "and salvage any useful work before continuing."
                )

    # -- watchdog ----------------------------------------------------------

    def _run_watchdog(self) -> None:
        watchdog = self.config.watchdog
        if watchdog is None:
            return
        try:
            state = watchdog_check(watchdog)
        except FileMissing:
            return  # session not started yet; nothing to police
        if state is not WatchdogState.OVER:
            if self.config.auto_checkpoint and maybe_refresh_checkpoint(
                watchdog, self._last_checkpoint_refresh, self.clock()
            ):
                self._last_checkpoint_refresh = self.clock()
                self.events.append("checkpoint_refreshed", self.clock())
            return
        try:
            archive = rollback_session(watchdog, now=self.clock())
            self.events.append(
                "session_rollback", self.clock(), archive=archive.name
            )
        except Exception as exc:
            self.events.append("rollback_failed", self.clock(), error=str(exc))
