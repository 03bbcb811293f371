"""Deterministic test doubles: a scripted agent acting as both session
provider and file editor, stub checkers, and a virtual clock.

Scripts are plain line-oriented command files (shlex-tokenized, ``\\n`` and
``\\t`` escapes allowed inside quoted strings):

    prompt                 begin a step that waits for an injected prompt
    nowait                 begin a step that runs with the previous prompt
    append TEXT            append TEXT (plus newline) to the working file
    replace START END TEXT replace 1-based inclusive line range with TEXT
    sub OLD NEW            replace first occurrence of OLD with NEW
    backup NOTE            write the next bck/CHANGES pair
    backupnum N NOTE       write bck<N> explicitly (N may be +k for max+k)
    misbehave KIND         preboundary | shrink | numberskip | overwrite
"""

from __future__ import annotations

import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .ledger import backup_number, next_backup_number


class ScriptError(Exception):
    pass


@dataclass
class FakeClock:
    """Manually advanced time source; sleep() just moves the hands."""

    now: float = 1_700_000_000.0

    def __call__(self) -> float:
        return self.now

    def sleep(self, seconds: float) -> None:
        self.now += seconds


@dataclass
class AgentStep:
    await_prompt: bool = True
    commands: list[tuple] = field(default_factory=list)


def _unescape(token: str) -> str:
    return token.replace("\\n", "\n").replace("\\t", "\t")


def parse_script(text: str) -> list[AgentStep]:
    steps: list[AgentStep] = []
    for raw_line in text.splitlines():
        line = raw_line.strip()
        if not line or line.startswith("#"):
            continue
        words = shlex.split(line)
        cmd, args = words[0], words[1:]
        if cmd in ("prompt", "nowait"):
            steps.append(AgentStep(await_prompt=(cmd == "prompt")))
            continue
        if not steps:
            raise ScriptError("script must start with 'prompt' or 'nowait'")
        step = steps[-1]
        if cmd == "append" and len(args) == 1:
            step.commands.append(("append", _unescape(args[0])))
        elif cmd == "replace" and len(args) == 3:
            step.commands.append(("replace", int(args[0]), int(args[1]), _unescape(args[2])))
        elif cmd == "sub" and len(args) == 2:
            step.commands.append(("sub", _unescape(args[0]), _unescape(args[1])))
        elif cmd == "backup" and len(args) == 1:
            step.commands.append(("backup", args[0]))
        elif cmd == "backupnum" and len(args) == 2:
            step.commands.append(("backupnum", args[0], args[1]))
        elif cmd == "misbehave" and len(args) == 1:
            step.commands.append(("misbehave", args[0]))
        else:
            raise ScriptError(f"bad script line: {raw_line!r}")
    return steps


def load_script(path: Path) -> list[AgentStep]:
    return parse_script(Path(path).read_text())


class ScriptedAgent:
    """Session provider whose pane reflects script progress; each submitted
    prompt executes the next step (plus any trailing nowait steps).

    Once the script is exhausted the provider stays idle forever with a
    constant pane.
    """

    def __init__(self, steps: list[AgentStep], working_file: Path, ledger_dir: Path):
        self.steps = list(steps)
        self.working_file = Path(working_file)
        self.ledger_dir = Path(ledger_dir)
        self.provider_log: list[str] = []
        self.prompts_received: list[str] = []
        self.done = 0
        self._pane = "READY step=0\n>"
        self._typed: list[str] = []

    @property
    def exhausted(self) -> bool:
        return self.done >= len(self.steps)

    # -- session provider protocol -------------------------------------
    def capture(self) -> str:
        return self._pane

    def type_text(self, text: str) -> None:
        self.provider_log.append(f"TYPE:{text}")
        self._typed.append(text)
        self._pane = f"READY step={self.done}\n> {text[:40]}"

    def submit(self) -> None:
        self.provider_log.append("SUBMIT")
        prompt = "".join(self._typed)
        self._typed = []
        self.prompts_received.append(prompt)
        if self.exhausted:
            self._pane = "IDLE script exhausted\n>"
            return
        self._run_step()
        while not self.exhausted and not self.steps[self.done].await_prompt:
            self._run_step()
        self._pane = f"DONE step={self.done}\n>"

    # -- file actor -----------------------------------------------------
    def _run_step(self) -> None:
        step = self.steps[self.done]
        for command in step.commands:
            self._execute(command)
        self.done += 1

    def _read(self) -> str:
        return self.working_file.read_text()

    def _write(self, text: str) -> None:
        self.working_file.write_text(text)

    def _execute(self, command: tuple) -> None:
        kind = command[0]
        if kind == "append":
            text = self._read()
            if text and not text.endswith("\n"):
                text += "\n"
            self._write(text + command[1] + "\n")
        elif kind == "replace":
            _, start, end, replacement = command
            lines = self._read().split("\n")
            lines[start - 1 : end] = replacement.split("\n")
            self._write("\n".join(lines))
        elif kind == "sub":
            _, old, new = command
            text = self._read()
            if old not in text:
                raise ScriptError(f"sub target not found: {old!r}")
            self._write(text.replace(old, new, 1))
        elif kind == "backup":
            self._backup(next_backup_number(self._names()), command[1])
        elif kind == "backupnum":
            _, spec, note = command
            if spec.startswith("+"):
                number = self._max_number() + int(spec[1:])
            else:
                number = int(spec)
            self._backup(number, note)
        elif kind == "misbehave":
            self._misbehave(command[1])
        else:  # pragma: no cover - parse_script rejects unknown commands
            raise ScriptError(f"unknown command {kind!r}")

    def _names(self) -> list[str]:
        return [p.name for p in self.ledger_dir.iterdir()]

    def _max_number(self) -> int:
        numbers = [n for n in (backup_number(x) for x in self._names()) if n is not None]
        return max(numbers) if numbers else 0

    def _backup(self, number: int, note: str) -> None:
        (self.ledger_dir / f"bck{number}").write_text(self._read())
        (self.ledger_dir / f"CHANGES{number}").write_text(note)

    def _misbehave(self, kind: str) -> None:
        if kind == "preboundary":
            lines = self._read().split("\n")
            lines[0] = "(** tampered with the protected region **)"
            self._write("\n".join(lines))
            self._backup(next_backup_number(self._names()), "routine update")
        elif kind == "shrink":
            lines = self._read().split("\n")
            kept = lines[: max(1, len(lines) - 5)]
            self._write("\n".join(kept) + "\n")
            self._backup(next_backup_number(self._names()), "routine update")
        elif kind == "numberskip":
            top = self._max_number()
            taken = {backup_number(x) for x in self._names()}
            target = next(
                (n for n in range(top - 1, 0, -1) if n not in taken), None
            )
            if target is None:
                raise ScriptError("numberskip needs a free number below the max")
            self._backup(target, "late backup filed under an old number")
        elif kind == "overwrite":
            top = self._max_number()
            if top == 0:
                raise ScriptError("overwrite needs an existing backup")
            (self.ledger_dir / f"bck{top}").write_text(
                self._read() + "(** rewritten history **)\n"
            )
        else:
            raise ScriptError(f"unknown misbehavior {kind!r}")


# -- stub checkers -------------------------------------------------------


def _write_stub(directory: Path, name: str, body: str) -> str:
    path = Path(directory) / name
    path.write_text(body)
    return f"{sys.executable} {path} {{file}}"


def silent_checker(directory: Path) -> str:
    """Exit 0, print nothing: the silent-success case."""
    return _write_stub(directory, "checker_ok.py", "import sys\nsys.exit(0)\n")


def noisy_checker(directory: Path, message: str = "error at line 7") -> str:
    return _write_stub(
        directory, "checker_noisy.py", f"print({message!r})\nimport sys\nsys.exit(0)\n"
    )


def failing_checker(directory: Path, message: str = "type error") -> str:
    return _write_stub(
        directory,
        "checker_fail.py",
        f"import sys\nprint({message!r}, file=sys.stderr)\nsys.exit(1)\n",
    )


def sleepy_checker(directory: Path, seconds: float = 5.0) -> str:
    return _write_stub(
        directory, "checker_sleepy.py", f"import time\ntime.sleep({seconds})\n"
    )


def chatty_checker(directory: Path, size_bytes: int) -> str:
    """Prints roughly size_bytes of deterministic output."""
    body = (
        "import sys\n"
        f"chunk = ('0123456789abcdef' * 64) + chr(10)\n"
        f"n = {size_bytes} // len(chunk) + 1\n"
        "sys.stdout.write(chunk * n)\n"
    )
    return _write_stub(directory, "checker_chatty.py", body)
