#!/usr/bin/env python3
"""Run the full supervision loop against the scripted mock agent.

No external binaries needed: the agent, the checker, and the clock are all
deterministic doubles. Prints the final DEPS file, section progress, and
bottleneck ranking so you can see what the harness produces.

Usage: python3 scripts/run_mock_loop.py [workdir]
"""

from __future__ import annotations

import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from afloop.config import HarnessConfig
from afloop.mocks import FakeClock, ScriptedAgent, load_script, silent_checker
from afloop.orchestrator import Orchestrator
from afloop.session import IdlePolicy

INITIAL_FILE = """\
(** core background library **)
Definition set_member : forall x X:set, prop.
Theorem set_member_refl : forall X:set, set_member X X.
admit.
Section Topology.
"""


def run(workdir: Path) -> Orchestrator:
    working_file = workdir / "Math_Background.mg"
    working_file.write_text(INITIAL_FILE)
    ledger_dir = workdir / "ledger"
    ledger_dir.mkdir()
    stub_dir = workdir / "stubs"
    stub_dir.mkdir()

    config = HarnessConfig(
        working_file=working_file,
        ledger_dir=ledger_dir,
        capture_dir=workdir / "captures",
        log_file=workdir / "events.jsonl",
        checker_template=silent_checker(stub_dir),
        idle=IdlePolicy(interval=0.1, standing_prompt="keep going", submit_delay=0),
    )
    agent = ScriptedAgent(
        load_script(ROOT / "tests" / "scripts" / "twelve_step.txt"),
        working_file,
        ledger_dir,
    )
    clock = FakeClock()
    orchestrator = Orchestrator(config, agent, clock=clock, sleep=clock.sleep)
    orchestrator.run(max_ticks=40)
    if not agent.exhausted:
        raise RuntimeError("mock agent did not finish its script")
    return orchestrator


def main() -> int:
    if len(sys.argv) > 1:
        workdir = Path(sys.argv[1])
        workdir.mkdir(parents=True, exist_ok=True)
    else:
        workdir = Path(tempfile.mkdtemp(prefix="afloop-demo-"))
    orchestrator = run(workdir)

    status = orchestrator.status()
    print(f"workdir: {workdir}")
    print(f"backups processed: {status['last_backup_number']}")
    print(f"items: {status['total_items']}  admits: {status['admit_count']}  "
          f"recursive admits: {status['recadmit_count']}")

    print("\n--- final DEPS ---")
    print((workdir / "ledger" / f"DEPS{status['last_backup_number']}").read_text(), end="")

    print("\n--- sections with content ---")
    for row in orchestrator.sections_payload()["sections"]:
        if row["total"]:
            print(f"§{row['section']}: {row['level']} "
                  f"(stated {row['stated']}/{row['total']}, proved {row['proved']}/{row['total']})")

    print("\n--- admit bottlenecks ---")
    for row in orchestrator.bottlenecks_payload()["rows"]:
        print(f"{row['name']} blocks {row['blocked_count']} item(s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
