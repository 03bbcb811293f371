from __future__ import annotations

import pathlib

import pytest

from afloop.config import HarnessConfig
from afloop.mocks import FakeClock, ScriptedAgent, load_script, silent_checker
from afloop.orchestrator import Orchestrator
from afloop.session import IdlePolicy

SCRIPTS = pathlib.Path(__file__).parent / "scripts"

INITIAL_WORKING_FILE = """\
(** core background library **)
Definition set_member : forall x X:set, prop.
Theorem set_member_refl : forall X:set, set_member X X.
admit.
Section Topology.
"""


@pytest.fixture
def workspace(tmp_path):
    """Working file + ledger dir + config wired to a silent stub checker."""
    working_file = tmp_path / "Math_Background.mg"
    working_file.write_text(INITIAL_WORKING_FILE)
    ledger_dir = tmp_path / "ledger"
    ledger_dir.mkdir()
    stub_dir = tmp_path / "stubs"
    stub_dir.mkdir()
    config = HarnessConfig(
        working_file=working_file,
        ledger_dir=ledger_dir,
        capture_dir=tmp_path / "captures",
        log_file=tmp_path / "events.jsonl",
        checker_template=silent_checker(stub_dir),
        boundary_marker="Section Topology.",
        checker_timeout=10,
        idle=IdlePolicy(interval=0.1, standing_prompt="continue the formalization work", submit_delay=0),
        api_secret="test-secret",
    )
    return config


def make_agent(config, script_name) -> ScriptedAgent:
    steps = load_script(SCRIPTS / script_name)
    return ScriptedAgent(steps, config.working_file, config.ledger_dir)


def make_orchestrator(config, agent, clock=None) -> Orchestrator:
    clock = clock or FakeClock()
    return Orchestrator(config, agent, clock=clock, sleep=clock.sleep)
