"""Harness configuration: a flat ``key = value`` file, one option per line.

Blank lines and ``#`` comments are skipped. AFLOOP_CONFIG names the default
config path for the CLI.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path

from .session import (
    DEFAULT_SESSION_HARD_LIMIT,
    IdlePolicy,
    SessionFileWatchdog,
)

ENV_VAR = "AFLOOP_CONFIG"
DEFAULT_BOUNDARY_MARKER = "Section Topology."
DEFAULT_CHECKER_TIMEOUT = 30.0
DEFAULT_STRIDE = 100
DEFAULT_API_PORT = 8777


class ConfigError(Exception):
    pass


@dataclass
class HarnessConfig:
    working_file: Path
    ledger_dir: Path
    capture_dir: Path
    log_file: Path
    checker_template: str
    boundary_marker: str = DEFAULT_BOUNDARY_MARKER
    checker_timeout: float = DEFAULT_CHECKER_TIMEOUT
    idle: IdlePolicy = field(default_factory=IdlePolicy)
    watchdog: SessionFileWatchdog | None = None
    api_port: int = DEFAULT_API_PORT
    api_secret: str = ""
    stride: int = DEFAULT_STRIDE
    tmux_target: str | None = None
    alert_on_violation: bool = True
    keep_all_captures: bool = False
    auto_checkpoint: bool = False
    injection_log: Path | None = None

    def __post_init__(self):
        self.working_file = Path(self.working_file)
        self.ledger_dir = Path(self.ledger_dir)
        self.capture_dir = Path(self.capture_dir)
        self.log_file = Path(self.log_file)
        if self.injection_log is None:
            self.injection_log = self.capture_dir / "injections.log"
        if self.checker_timeout <= 0:
            raise ConfigError("checker_timeout must be positive")
        paths = [self.working_file, self.ledger_dir, self.capture_dir, self.log_file]
        if len({str(p) for p in paths}) != len(paths):
            raise ConfigError("working_file, ledger_dir, capture_dir, log_file must be distinct")


def parse_kv(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _as_bool(value: str) -> bool:
    if value.lower() in ("1", "true", "yes", "on"):
        return True
    if value.lower() in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def load_config(path: Path) -> HarnessConfig:
    values = parse_kv(Path(path).read_text())
    try:
        required = {
            "working_file": Path(values.pop("working_file")),
            "ledger_dir": Path(values.pop("ledger_dir")),
            "capture_dir": Path(values.pop("capture_dir")),
            "log_file": Path(values.pop("log_file")),
            "checker_template": values.pop("checker_template"),
        }
    except KeyError as exc:
        raise ConfigError(f"missing required config key {exc.args[0]!r}") from exc

    idle = IdlePolicy(
        interval=float(values.pop("interval", 60.0)),
        standing_prompt=values.pop("standing_prompt", IdlePolicy().standing_prompt),
        submit_delay=float(values.pop("submit_delay", 2.0)),
    )
    watchdog = None
    if "session_file" in values:
        try:
            watchdog = SessionFileWatchdog(
                session_file=Path(values.pop("session_file")),
                checkpoint=Path(values.pop("session_checkpoint")),
                hard_limit=int(values.pop("session_hard_limit", DEFAULT_SESSION_HARD_LIMIT)),
            )
        except KeyError as exc:
            raise ConfigError("session_file requires session_checkpoint") from exc

    config = HarnessConfig(
        **required,
        boundary_marker=values.pop("boundary_marker", DEFAULT_BOUNDARY_MARKER),
        checker_timeout=float(values.pop("checker_timeout", DEFAULT_CHECKER_TIMEOUT)),
        idle=idle,
        watchdog=watchdog,
        api_port=int(values.pop("api_port", DEFAULT_API_PORT)),
        api_secret=values.pop("api_secret", ""),
        stride=int(values.pop("stride", DEFAULT_STRIDE)),
        tmux_target=values.pop("tmux_target", None),
        alert_on_violation=_as_bool(values.pop("alert_on_violation", "true")),
        keep_all_captures=_as_bool(values.pop("keep_all_captures", "false")),
        auto_checkpoint=_as_bool(values.pop("auto_checkpoint", "false")),
        injection_log=Path(values.pop("injection_log")) if "injection_log" in values else None,
    )
    if values:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(values))}")
    return config


def default_config_path() -> Path | None:
    value = os.environ.get(ENV_VAR)
    return Path(value) if value else None
