"""Serialization of analysis results into the working artifact formats.

DEPS files carry one line per region item:

    name: lines:12, admit:NO, recadmit:NO, deps(2):[topology_on:D,topology_sub_Power:T].

PROGRESS files carry exactly one line per textbook section (12 through 50,
39 lines total) with a coarse maturity level. The level thresholds and the
stub test (statement body shorter than 8 tokens, or "stub" in the name) are
declared heuristics, not ground truth.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .deps import DepGraph, DepRecord
from .ledger import BackupEntry
from .parser import ItemKind, ProofItem, mask_comments

SECTION_RANGE = range(12, 51)  # sections 12..50, 39 of them
DEFAULT_MIN_LINES = 300
STUB_TOKEN_THRESHOLD = 8

_EXERCISE_NAME = re.compile(r"^ex\d+_")
_DEPS_LINE = re.compile(
    r"^(?P<name>[A-Za-z_][A-Za-z0-9_]*): lines:(?P<lines>\d+), "
    r"admit:(?P<admit>YES|NO), recadmit:(?P<recadmit>YES|NO), "
    r"deps\((?P<count>\d+)\):\[(?P<deps>[^\]]*)\]\.$"
)


class SectionLevel(str, Enum):
    STUBS_ONLY = "StubsOnly"
    STATED = "Stated"
    PARTIALLY_PROVED = "PartiallyProved"
    MOSTLY_COMPLETE = "MostlyComplete"
    COMPLETE = "Complete"
    EXERCISES_COMPLETE = "ExercisesComplete"


@dataclass(frozen=True)
class SectionStatus:
    section: int
    level: SectionLevel
    stated_count: int
    proved_count: int
    total_count: int


def _yn(flag: bool) -> str:
    return "YES" if flag else "NO"


def format_deps_line(record: DepRecord) -> str:
    deps = ",".join(f"{name}:{kind}" for name, kind in record.deps)
    return (
        f"{record.name}: lines:{record.lines}, admit:{_yn(record.direct_admit)}, "
        f"recadmit:{_yn(bool(record.recadmit))}, deps({len(record.deps)}):[{deps}]."
    )


def parse_deps_line(line: str) -> DepRecord:
    """Inverse of format_deps_line; raises ValueError on malformed lines."""
    m = _DEPS_LINE.match(line)
    if not m:
        raise ValueError(f"not a DEPS line: {line!r}")
    deps_field = m.group("deps")
    deps: list[tuple[str, str]] = []
    if deps_field:
        for chunk in deps_field.split(","):
            name, _, kind = chunk.partition(":")
            if kind not in ("D", "T"):
                raise ValueError(f"bad dep kind in {chunk!r}")
            deps.append((name, kind))
    if len(deps) != int(m.group("count")):
        raise ValueError(f"deps arity mismatch in {line!r}")
    return DepRecord(
        name=m.group("name"),
        kind_letter="T",  # not recoverable from the line; irrelevant for round-trip of printed fields
        lines=int(m.group("lines")),
        direct_admit=m.group("admit") == "YES",
        deps=deps,
        recadmit=m.group("recadmit") == "YES",
    )


def write_deps_file(graph: DepGraph, backup_number: int, directory: Path) -> Path:
    path = Path(directory) / f"DEPS{backup_number}"
    if path.exists():
        raise FileExistsError(f"{path} already exists; DEPS files are never overwritten")
    body = "".join(format_deps_line(r) + "\n" for r in graph.in_order())
    path.write_text(body)
    return path


def _statement_body_tokens(statement_text: str) -> int:
    _, _, body = mask_comments(statement_text).partition(":")
    return len(body.split())


def is_stub(item: ProofItem) -> bool:
    if "stub" in item.name:
        return True
    return _statement_body_tokens(item.statement_text) < STUB_TOKEN_THRESHOLD


def is_exercise(name: str) -> bool:
    return bool(_EXERCISE_NAME.match(name))


def section_progress(graph: DepGraph, items: list[ProofItem]) -> list[SectionStatus]:
    """One status per section 12..50; items without a section tag (or outside
    the region) are not counted anywhere."""
    region_items = [
        it
        for it in items
        if it.name in graph.records
        and it.kind in (ItemKind.DEFINITION, ItemKind.THEOREM, ItemKind.AXIOM)
        and it.section_tag is not None
    ]
    statuses = []
    for section in SECTION_RANGE:
        members = [it for it in region_items if it.section_tag == section]
        total = len(members)
        stated = [it for it in members if not is_stub(it)]
        proved = [it for it in stated if not it.direct_admit]
        exercises = [it for it in members if is_exercise(it.name)]
        core = [it for it in members if not is_exercise(it.name)]
        core_done = all(not it.direct_admit and not is_stub(it) for it in core)

        if total == 0 or not stated:
            level = SectionLevel.STUBS_ONLY
        elif len(proved) == total:
            level = (
                SectionLevel.EXERCISES_COMPLETE if exercises else SectionLevel.COMPLETE
            )
        elif core and core_done:
            level = SectionLevel.COMPLETE  # only exercises remain
        else:
            ratio = len(proved) / total
            if ratio >= 0.8:
                level = SectionLevel.MOSTLY_COMPLETE
            elif ratio >= 0.5:
                level = SectionLevel.PARTIALLY_PROVED
            else:
                level = SectionLevel.STATED
        statuses.append(
            SectionStatus(
                section=section,
                level=level,
                stated_count=len(stated),
                proved_count=len(proved),
                total_count=total,
            )
        )
    return statuses


def format_progress_line(status: SectionStatus) -> str:
    return (
        f"§{status.section}: {status.level.value} "
        f"(stated {status.stated_count}/{status.total_count}, "
        f"proved {status.proved_count}/{status.total_count})"
    )


def write_progress_file(
    statuses: list[SectionStatus], backup_number: int, directory: Path
) -> Path:
    path = Path(directory) / f"PROGRESS{backup_number}"
    if path.exists():
        raise FileExistsError(f"{path} already exists")
    path.write_text("".join(format_progress_line(s) + "\n" for s in statuses))
    return path


def growth_table(entries: list[BackupEntry], stride: int) -> list[tuple[int, int]]:
    """(number, line_count) for every entry whose number divides by stride."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    rows = [(e.number, e.line_count) for e in entries if e.number % stride == 0]
    rows.sort()
    return rows


def growth_csv(rows: list[tuple[int, int]]) -> str:
    return "commit,lines\n" + "".join(f"{n},{lines}\n" for n, lines in rows)


def major_theorems(
    graph: DepGraph, min_lines: int = DEFAULT_MIN_LINES
) -> list[tuple[str, int, int]]:
    """Fully proved theorems longer than min_lines, largest first; an item
    counts only when neither it nor anything it depends on is admitted."""
    rows = []
    for decl_index, record in enumerate(graph.in_order()):
        if record.kind_letter != "T" or record.direct_admit or record.recadmit:
            continue
        if record.lines > min_lines:
            rows.append((record.name, record.lines, len(record.deps), decl_index))
    rows.sort(key=lambda r: (-r[1], r[3]))
    return [(name, lines, dep_count) for name, lines, dep_count, _ in rows]
