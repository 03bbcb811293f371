"""Numbered backup ledger: ``bck<N>`` snapshots paired with ``CHANGES<N>``
notes, never overwritten, numbers strictly increasing, shrinking snapshots
rejected unless explicitly justified.

Line counts follow ``wc -l`` (newline count). Backups made by an external
actor (the agent) are judged by the same rules when scanned; such a backup
justifies a shrink by carrying the SHRINK_MARKER token in its CHANGES note.
"""

from __future__ import annotations

import datetime as _dt
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from filelock import FileLock

# An agent-written CHANGES note containing this token acknowledges the size
# decrease, mirroring the explicit flag operators pass to create_backup.
SHRINK_MARKER = "SHRINK-JUSTIFIED"

_DIGITS = re.compile(r"[^0-9]+")


class ViolationKind(str, Enum):
    PRE_BOUNDARY_EDIT = "PreBoundaryEdit"
    BACKUP_OVERWRITE = "BackupOverwrite"
    NON_MONOTONIC_NUMBER = "NonMonotonicNumber"
    UNJUSTIFIED_SHRINK = "UnjustifiedShrink"


@dataclass(frozen=True)
class GuardViolation:
    kind: ViolationKind
    detail: str

    def __post_init__(self):
        if not self.detail:
            raise ValueError("violation detail must not be empty")


@dataclass(frozen=True)
class BackupEntry:
    number: int
    file_name: str
    line_count: int
    created_at: float
    changes_note: str
    justified_shrink: bool

    @property
    def timestamp(self) -> str:
        return _dt.datetime.fromtimestamp(self.created_at, _dt.timezone.utc).isoformat()


def ledger_lock(ledger_dir: Path) -> FileLock:
    """Advisory single-writer lock; concurrent readers need no lock."""
    return FileLock(str(Path(ledger_dir) / ".afloop.lock"))


def line_count(text: str) -> int:
    """Complete lines, as wc -l counts them."""
    return text.count("\n")


def backup_number(name: str) -> int | None:
    """Digits extracted from a bck* file name, or None when unusable."""
    if not name.startswith("bck"):
        return None
    digits = _DIGITS.sub("", name)
    return int(digits) if digits else None


def next_backup_number(existing_names: list[str]) -> int:
    numbers = [n for n in (backup_number(name) for name in existing_names) if n is not None]
    return max(numbers) + 1 if numbers else 1


def read_ledger(ledger_dir: Path) -> list[BackupEntry]:
    """Entries reconstructed from disk, ascending by number."""
    entries = []
    for path in Path(ledger_dir).iterdir():
        number = backup_number(path.name)
        if number is None or not path.is_file():
            continue
        text = path.read_text()
        note_path = Path(ledger_dir) / f"CHANGES{number}"
        note = note_path.read_text() if note_path.exists() else ""
        entries.append(
            BackupEntry(
                number=number,
                file_name=path.name,
                line_count=line_count(text),
                created_at=path.stat().st_mtime,
                changes_note=note,
                justified_shrink=SHRINK_MARKER in note,
            )
        )
    entries.sort(key=lambda e: e.number)
    return entries


def latest_entry(ledger_dir: Path) -> BackupEntry | None:
    entries = read_ledger(ledger_dir)
    return entries[-1] if entries else None


def create_backup(
    working_text: str,
    ledger_dir: Path,
    note: str,
    justified_shrink: bool = False,
    now: float | None = None,
) -> BackupEntry | GuardViolation:
    """Write the next-numbered bck/CHANGES pair, refusing overwrites and
    unjustified shrinks. Nothing is written when a violation is returned."""
    ledger_dir = Path(ledger_dir)
    number = next_backup_number([p.name for p in ledger_dir.iterdir()])
    target = ledger_dir / f"bck{number}"
    note_target = ledger_dir / f"CHANGES{number}"
    if target.exists() or note_target.exists():
        return GuardViolation(
            ViolationKind.BACKUP_OVERWRITE, f"{target.name} already exists"
        )

    count = line_count(working_text)
    previous = latest_entry(ledger_dir)
    if previous is not None and count < previous.line_count and not justified_shrink:
        return GuardViolation(
            ViolationKind.UNJUSTIFIED_SHRINK,
            f"bck{number} would shrink {previous.file_name} "
            f"from {previous.line_count} to {count} lines without justification",
        )

    target.write_text(working_text)
    note_target.write_text(note)
    if now is None:
        now = target.stat().st_mtime
    return BackupEntry(
        number=number,
        file_name=target.name,
        line_count=count,
        created_at=now,
        changes_note=note,
        justified_shrink=justified_shrink,
    )


def validate_edit(old_text: str, new_text: str, policy) -> GuardViolation | None:
    """None when every line strictly before the boundary is byte-identical;
    otherwise a PreBoundaryEdit naming the first differing line."""
    boundary = policy.boundary_line
    old_lines = old_text.split("\n")
    new_lines = new_text.split("\n")
    for i in range(boundary - 1):
        old_line = old_lines[i] if i < len(old_lines) else None
        new_line = new_lines[i] if i < len(new_lines) else None
        if old_line != new_line:
            return GuardViolation(
                ViolationKind.PRE_BOUNDARY_EDIT,
                f"line {i + 1} changed before boundary line {boundary}",
            )
    return None
