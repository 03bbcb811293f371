"""Run the configured proof checker on a file and classify the outcome.

The contract is silent-success: exit code 0 with no output at all (stdout and
stderr merged) means the file is correct. Any output, or a nonzero exit, is a
failure; exceeding the wall-clock limit kills the whole process group and
reports a timeout. The command is a shell-free argv template: split on
whitespace, with ``{file}`` substituted into matching tokens.
"""

from __future__ import annotations

import os
import signal
import subprocess
import time
from dataclasses import dataclass
from enum import Enum
from pathlib import Path


class SpawnFailure(Exception):
    """The checker command could not be started at all."""


class CheckStatus(str, Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class CheckerResult:
    status: CheckStatus
    output: str
    duration: float


def build_argv(command_template: str, file: Path) -> list[str]:
    if command_template.count("{file}") != 1:
        raise ValueError("command template must contain {file} exactly once")
    return [tok.replace("{file}", str(file)) for tok in command_template.split()]


def run_check(command_template: str, file: Path, timeout: float) -> CheckerResult:
    """Spawn the checker, merge stdout+stderr, kill the process tree at the
    deadline. Raises SpawnFailure when the command cannot start."""
    if timeout <= 0:
        raise ValueError("timeout must be positive")
    argv = build_argv(command_template, file)
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.STDOUT,
            start_new_session=True,
        )
    except OSError as exc:
        raise SpawnFailure(f"cannot run {argv[0]!r}: {exc}") from exc

    try:
        raw, _ = proc.communicate(timeout=timeout)
        duration = time.monotonic() - start
        output = raw.decode("utf-8", errors="replace")
        if proc.returncode == 0 and not output.rstrip():
            return CheckerResult(CheckStatus.SUCCESS, output, duration)
        return CheckerResult(CheckStatus.FAILURE, output, duration)
    except subprocess.TimeoutExpired:
        try:
            os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
        except (ProcessLookupError, PermissionError):
            proc.kill()
        raw, _ = proc.communicate()
        duration = time.monotonic() - start
        output = raw.decode("utf-8", errors="replace") if raw else ""
        return CheckerResult(CheckStatus.TIMEOUT, output, duration)
