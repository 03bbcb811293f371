#!/usr/bin/env python3
"""Regenerate the dashboard test fixture from the scripted end-to-end run.

Writes frontend/tests/fixtures/e2e_api.json with the exact JSON payloads the
HTTP API serves after the twelve-step mock run finishes.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))
sys.path.insert(0, str(ROOT / "scripts"))

from run_mock_loop import run  # noqa: E402


def main() -> int:
    workdir = Path(tempfile.mkdtemp(prefix="afloop-fixture-"))
    orchestrator = run(workdir)
    fixture = {
        "status": orchestrator.status(),
        "deps": orchestrator.deps_payload(),
        "sections": orchestrator.sections_payload(),
        "bottlenecks": orchestrator.bottlenecks_payload(),
        "growth": orchestrator.growth_payload(stride=1),
    }
    out = ROOT / "frontend" / "tests" / "fixtures" / "e2e_api.json"
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(fixture, indent=2) + "\n")
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
