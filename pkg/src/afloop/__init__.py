"""afloop: a checker-agnostic harness that supervises a coding agent
continuously growing one proof-script file.

The loop re-prompts the agent whenever its terminal goes idle, enforces the
work protocol (edit region, numbered backups with change notes, size
regression checks), runs the proof checker under a timeout, tracks theorem
dependencies and admit debt, writes DEPS/PROGRESS reports beside each backup,
and exposes a small local HTTP API for a steering dashboard.
"""

from .checker import CheckerResult, CheckStatus, SpawnFailure, run_check
from .config import HarnessConfig, load_config
from .deps import DepGraph, DepRecord, bottleneck_ranking, build_graph, compute_recadmit
from .ledger import (
    BackupEntry,
    GuardViolation,
    ViolationKind,
    create_backup,
    next_backup_number,
    read_ledger,
    validate_edit,
)
from .orchestrator import Orchestrator
from .parser import (
    EditRegionPolicy,
    ItemKind,
    ProofItem,
    parse_items,
    resolve_boundary,
    strip_comments,
)
from .reports import (
    SectionLevel,
    SectionStatus,
    format_deps_line,
    growth_table,
    major_theorems,
    parse_deps_line,
    section_progress,
    write_deps_file,
)
from .session import (
    IdlePolicy,
    SessionDriver,
    SessionFileWatchdog,
    SessionSnapshot,
    TmuxProvider,
    is_idle,
    rollback_session,
    watchdog_check,
)

__version__ = "0.1.0"

__all__ = [
    "BackupEntry",
    "CheckStatus",
    "CheckerResult",
    "DepGraph",
    "DepRecord",
    "EditRegionPolicy",
    "GuardViolation",
    "HarnessConfig",
    "IdlePolicy",
    "ItemKind",
    "Orchestrator",
    "ProofItem",
    "SectionLevel",
    "SectionStatus",
    "SessionDriver",
    "SessionFileWatchdog",
    "SessionSnapshot",
    "SpawnFailure",
    "TmuxProvider",
    "ViolationKind",
    "bottleneck_ranking",
    "build_graph",
    "compute_recadmit",
    "create_backup",
    "format_deps_line",
    "growth_table",
    "is_idle",
    "load_config",
    "major_theorems",
    "next_backup_number",
    "parse_deps_line",
    "parse_items",
    "read_ledger",
    "resolve_boundary",
    "rollback_session",
    "run_check",
    "section_progress",
    "strip_comments",
    "validate_edit",
    "watchdog_check",
    "write_deps_file",
]
