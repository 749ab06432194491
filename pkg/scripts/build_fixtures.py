#!/usr/bin/env python3
"""Regenerate the checked-in cassette used by the replay pipeline tests.

The cassette simulates two deterministic "models": reference-v1 answers
every prompt with our own serialized reference trace for that program
and strategy (so audits score full marks), and empty-v1 returns nothing
(exercising the '-' scoring convention).  Entries carry a fixed
timestamp so reruns of this script are byte-reproducible.

Usage: python scripts/build_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from absint.cfront import translate_c_full  # noqa: E402
from absint.compositional import run_compositional, trace_text  # noqa: E402
from absint.llm import CASSETTE_VERSION, request_digest  # noqa: E402
from absint.prompts import build_prompt  # noqa: E402
from absint.transitional import run_transitional, step_log_text  # noqa: E402

FIXTURES = REPO / "tests" / "fixtures"
STAMP = "2025-11-20T00:00:00+00:00"

UNITS = [
    # (program, strategy, model, response kind)
    ("const.c", "compositional", "reference-v1", "reference"),
    ("count_by_2.c", "compositional", "reference-v1", "reference"),
    ("even.c", "compositional", "empty-v1", "empty"),
    ("const.c", "transitional", "reference-v1", "reference"),
    ("count_by_2.c", "transitional", "reference-v1", "reference"),
]


def reference_response(prog, strategy: str) -> str:
    if strategy == "compositional":
        return trace_text(run_compositional(prog))
    system, m, log = run_transitional(prog)
    return step_log_text(system, m, log)


def main() -> None:
    entries = {}
    for name, strategy, model, kind in UNITS:
        prog = translate_c_full((REPO / "corpus" / name).read_text("utf-8")).program
        prompt = build_prompt(strategy, prog)
        digest = request_digest("stub", model, 0.0, prompt)
        text = reference_response(prog, strategy) if kind == "reference" else ""
        entries[digest] = {
            "response_text": text,
            "finish_reason": "stop",
            "token_counts": {"prompt_tokens": 0, "completion_tokens": 0},
            "timestamp": STAMP,
        }
    doc = {"v": CASSETTE_VERSION, "entries": entries}
    out = FIXTURES / "cassette.json"
    out.write_text(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n", "utf-8")
    print(f"wrote {out} ({len(entries)} entries)")


if __name__ == "__main__":
    main()
