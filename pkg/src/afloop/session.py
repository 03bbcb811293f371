"""Terminal-session observation and steering.

A session provider abstracts the terminal multiplexer: it can capture the
visible pane, type text, and send the submit keystroke. The driver snapshots
the pane on a fixed cadence, archives every capture, decides idleness from
two byte-identical consecutive captures, and injects prompts. A separate
watchdog polices the agent runtime's session file against a hard size limit,
rolling back to an operator-supplied checkpoint when it overflows (the
oversized file is always archived first, never deleted).
"""

from __future__ import annotations

import datetime as _dt
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Protocol

DEFAULT_INTERVAL = 60.0
DEFAULT_SUBMIT_DELAY = 2.0
DEFAULT_KEEP_CAPTURES = 1000
# observed runtime ceiling for one continuous agent session
DEFAULT_SESSION_HARD_LIMIT = 252 * 2**20

DEFAULT_STANDING_PROMPT = (
    "Read the rules file and treat it as your work instructions. "
    "Keep working for as long as possible without stopping."
)


class ProviderUnavailable(Exception):
    pass


class FileMissing(Exception):
    pass


class CheckpointMissing(Exception):
    pass


class ArchiveFailure(Exception):
    pass


class SessionProvider(Protocol):
    def capture(self) -> str: ...

    def type_text(self, text: str) -> None: ...

    def submit(self) -> None: ...


@dataclass(frozen=True)
class SessionSnapshot:
    text: str
    taken_at: float


@dataclass
class IdlePolicy:
    interval: float = DEFAULT_INTERVAL
    standing_prompt: str = DEFAULT_STANDING_PROMPT
    submit_delay: float = DEFAULT_SUBMIT_DELAY

    def __post_init__(self):
        if self.interval <= 0:
            raise ValueError("interval must be positive")
        if self.submit_delay < 0:
            raise ValueError("submit_delay must be non-negative")


@dataclass
class SessionFileWatchdog:
    session_file: Path
    checkpoint: Path
    hard_limit: int = DEFAULT_SESSION_HARD_LIMIT


class WatchdogState(Enum):
    UNDER = "Under"
    OVER = "Over"


def is_idle(a: SessionSnapshot, b: SessionSnapshot) -> bool:
    """Byte equality, no trimming: any change at all counts as activity."""
    return a.text == b.text


def _timestamp(now: float) -> str:
    return _dt.datetime.fromtimestamp(now, _dt.timezone.utc).strftime("%Y%m%dT%H%M%S.%fZ")


def _fresh_path(directory: Path, stem: str, suffix: str) -> Path:
    path = directory / f"{stem}{suffix}"
    counter = 1
    while path.exists():
        path = directory / f"{stem}_{counter}{suffix}"
        counter += 1
    return path


class TmuxProvider:
    """Shells out to tmux; target selects a session/pane when given."""

    def __init__(self, target: str | None = None, tmux_bin: str = "tmux"):
        self.target = target
        self.tmux_bin = tmux_bin

    def _run(self, *args: str) -> str:
        cmd = [self.tmux_bin, *args]
        try:
            result = subprocess.run(cmd, capture_output=True, text=True, timeout=10)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ProviderUnavailable(f"tmux call failed: {exc}") from exc
        if result.returncode != 0:
            raise ProviderUnavailable(f"tmux exited {result.returncode}: {result.stderr.strip()}")
        return result.stdout

    def _target_args(self) -> list[str]:
        return ["-t", self.target] if self.target else []

    def capture(self) -> str:
        return self._run("capture-pane", "-p", "-S", "-1", *self._target_args())

    def type_text(self, text: str) -> None:
        self._run("send-keys", *self._target_args(), "-l", text)

    def submit(self) -> None:
        self._run("send-keys", *self._target_args(), "Enter")


class SessionDriver:
    """Owns capture archiving and prompt injection for one session."""

    def __init__(
        self,
        provider: SessionProvider,
        capture_dir: Path,
        injection_log: Path,
        policy: IdlePolicy | None = None,
        clock: Callable[[], float] = time.time,
        sleep: Callable[[float], None] = time.sleep,
        keep_captures: int = DEFAULT_KEEP_CAPTURES,
        keep_all: bool = False,
    ):
        self.provider = provider
        self.capture_dir = Path(capture_dir)
        self.injection_log = Path(injection_log)
        self.policy = policy or IdlePolicy()
        self.clock = clock
        self.sleep = sleep
        self.keep_captures = keep_captures
        self.keep_all = keep_all
        self.capture_dir.mkdir(parents=True, exist_ok=True)

    def capture(self) -> SessionSnapshot:
        """Snapshot the pane and archive it under a timestamped name."""
        now = self.clock()
        text = self.provider.capture()
        path = _fresh_path(self.capture_dir, f"capture_{_timestamp(now)}", ".txt")
        path.write_text(text)
        if not self.keep_all:
            self._prune()
        return SessionSnapshot(text=text, taken_at=now)

    def _prune(self) -> None:
        captures = sorted(self.capture_dir.glob("capture_*.txt"))
        for stale in captures[: max(0, len(captures) - self.keep_captures)]:
            stale.unlink()

    def inject_prompt(self, text: str, submit_delay: float | None = None) -> None:
        """Type the prompt, wait, submit; logged with a one-line record."""
        delay = self.policy.submit_delay if submit_delay is None else submit_delay
        if text:
            self.provider.type_text(text)
        if delay:
            self.sleep(delay)
        self.provider.submit()
        stamp = _dt.datetime.fromtimestamp(self.clock(), _dt.timezone.utc).isoformat()
        excerpt = text[:80].replace("\n", "\\n").replace("\t", " ")
        with self.injection_log.open("a") as fh:
            fh.write(f"{stamp}\tINJECT\t{excerpt}\n")


def watchdog_check(watchdog: SessionFileWatchdog) -> WatchdogState:
    session_file = Path(watchdog.session_file)
    if not session_file.exists():
        raise FileMissing(str(session_file))
    size = session_file.stat().st_size
    return WatchdogState.OVER if size >= watchdog.hard_limit else WatchdogState.UNDER


def rollback_session(
    watchdog: SessionFileWatchdog, now: float | None = None
) -> Path:
    """Archive the oversized session file, then atomically replace it with
    the checkpoint contents. Returns the archive path.

    Nothing is replaced unless the archive copy succeeded, so no bytes are
    ever lost.
    """
    session_file = Path(watchdog.session_file)
    checkpoint = Path(watchdog.checkpoint)
    if not session_file.exists():
        raise FileMissing(str(session_file))
    if not checkpoint.exists():
        raise CheckpointMissing(str(checkpoint))
    if checkpoint.stat().st_size >= watchdog.hard_limit:
        raise ValueError("checkpoint must be smaller than the hard limit")

    stamp = _timestamp(time.time() if now is None else now)
    archive = _fresh_path(session_file.parent, f"{session_file.name}.oversized_{stamp}", "")
    try:
        shutil.copy2(session_file, archive)
    except OSError as exc:
        raise ArchiveFailure(f"could not archive {session_file}: {exc}") from exc

    fd, tmp_name = tempfile.mkstemp(dir=str(session_file.parent), prefix=".rollback_")
    try:
        with open(fd, "wb") as tmp:
            tmp.write(checkpoint.read_bytes())
        Path(tmp_name).replace(session_file)
    except OSError:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    return archive


def maybe_refresh_checkpoint(
    watchdog: SessionFileWatchdog,
    last_refresh: float,
    now: float,
    min_age: float = 86400.0,
) -> bool:
    """Daily auto-snapshot: copy the session file over the checkpoint while
    it is still comfortably under half the hard limit."""
    session_file = Path(watchdog.session_file)
    if now - last_refresh < min_age or not session_file.exists():
        return False
    if session_file.stat().st_size >= watchdog.hard_limit / 2:
        return False
    fd, tmp_name = tempfile.mkstemp(dir=str(Path(watchdog.checkpoint).parent), prefix=".ckpt_")
    with open(fd, "wb") as tmp:
        tmp.write(session_file.read_bytes())
    Path(tmp_name).replace(watchdog.checkpoint)
    return True
