from __future__ import annotations

import sys
import time

import pytest

from afloop.checker import CheckStatus, SpawnFailure, build_argv, run_check
from afloop.mocks import (
    chatty_checker,
    failing_checker,
    noisy_checker,
    silent_checker,
    sleepy_checker,
)


@pytest.fixture
def target(tmp_path):
    path = tmp_path / "work.mg"
    path.write_text("Definition d : p.\n")
    return path


class TestRunCheck:
    def test_silent_exit_zero_is_success(self, tmp_path, target):
        result = run_check(silent_checker(tmp_path), target, timeout=10)
        assert result.status is CheckStatus.SUCCESS
        assert result.output.rstrip() == ""

    def test_output_means_failure_even_on_exit_zero(self, tmp_path, target):
        result = run_check(noisy_checker(tmp_path), target, timeout=10)
        assert result.status is CheckStatus.FAILURE
        assert "error at line 7" in result.output

    def test_nonzero_exit_with_empty_output_is_failure(self, tmp_path, target):
        template = f"{sys.executable} -c import_sys_exit_stub{{file}}"
        # a real quiet-failure stub: exits 1 printing nothing
        stub = tmp_path / "quiet_fail.py"
        stub.write_text("import sys\nsys.exit(1)\n")
        result = run_check(f"{sys.executable} {stub} {{file}}", target, timeout=10)
        assert result.status is CheckStatus.FAILURE

    def test_stderr_is_captured_and_merged(self, tmp_path, target):
        result = run_check(failing_checker(tmp_path, "bad proof"), target, timeout=10)
        assert result.status is CheckStatus.FAILURE
        assert "bad proof" in result.output

    def test_sleeping_stub_times_out_within_grace(self, tmp_path, target):
        started = time.monotonic()
        result = run_check(sleepy_checker(tmp_path, seconds=5), target, timeout=1)
        wall = time.monotonic() - started
        assert result.status is CheckStatus.TIMEOUT
        assert result.duration <= 3.0
        assert wall <= 3.0  # never blocks longer than timeout + 2s grace

    def test_timeout_kills_child_process_group(self, tmp_path, target):
        spawner = tmp_path / "spawner.py"
        spawner.write_text(
            "import subprocess, sys, time\n"
            "subprocess.Popen([sys.executable, '-c', 'import time; time.sleep(30)'])\n"
            "time.sleep(30)\n"
        )
        started = time.monotonic()
        result = run_check(f"{sys.executable} {spawner} {{file}}", target, timeout=1)
        assert result.status is CheckStatus.TIMEOUT
        assert time.monotonic() - started <= 3.0

    def test_missing_binary_raises_spawn_failure(self, target):
        with pytest.raises(SpawnFailure):
            run_check("/no/such/binary-anywhere {file}", target, timeout=5)

    def test_large_output_is_lossless(self, tmp_path, target):
        size = 10 * 1024 * 1024
        result = run_check(chatty_checker(tmp_path, size), target, timeout=120)
        assert result.status is CheckStatus.FAILURE
        assert len(result.output.encode()) >= size
        chunk = ("0123456789abcdef" * 64) + "\n"
        assert result.output == chunk * (size // len(chunk) + 1)


class TestBuildArgv:
    def test_substitution_inside_token(self, tmp_path):
        argv = build_argv("megalodon -owned lib {file}", tmp_path / "a.mg")
        assert argv == ["megalodon", "-owned", "lib", str(tmp_path / "a.mg")]

    def test_embedded_placeholder(self, tmp_path):
        argv = build_argv("check --input={file}", tmp_path / "a.mg")
        assert argv[-1] == f"--input={tmp_path / 'a.mg'}"

    def test_template_must_have_exactly_one_placeholder(self):
        with pytest.raises(ValueError):
            build_argv("checker", "f")
        with pytest.raises(ValueError):
            build_argv("checker {file} {file}", "f")

    def test_timeout_must_be_positive(self, tmp_path, target=None):
        with pytest.raises(ValueError):
            run_check("x {file}", tmp_path / "a", timeout=0)
