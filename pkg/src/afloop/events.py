"""Append-only JSONL event log, the orchestrator's durable audit trail."""

from __future__ import annotations

import datetime as _dt
import json
import threading
from pathlib import Path
from typing import Any, Iterator


class EventLog:
    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, event: str, now: float, **fields: Any) -> dict:
        record = {
            "ts": _dt.datetime.fromtimestamp(now, _dt.timezone.utc).isoformat(),
            "event": event,
            **fields,
        }
        line = json.dumps(record, sort_keys=False)
        with self._lock:
            with self.path.open("a") as fh:
                fh.write(line + "\n")
        return record


def replay(path: Path) -> Iterator[dict]:
    """Yield logged events; unreadable lines are skipped, not fatal."""
    path = Path(path)
    if not path.exists():
        return
    with path.open() as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError:
                continue
