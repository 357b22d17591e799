"""Driving the model backend without a network.

The model backend sends one prompt per skill to a chat-completions endpoint.
Here a stand-in gateway plays the model, so the whole round trip runs
offline.  The demo prints the start of the rendered prompt, then feeds back
three kinds of answer: a well-formed report, a reply cut off mid-stream, and
one that says the graph evidence is insufficient.

Set SKILLSCOPE_MODEL_ENDPOINT and SKILLSCOPE_MODEL_NAME (and optionally
SKILLSCOPE_MODEL_KEY) to try a real endpoint with
``skillscope check ROOT --backend model`` instead.

Run with ``python demos/04_model_backend.py``.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from _common import banner, write_skill

from skillscope.checker import check_with_model_safe, render_prompt
from skillscope.skill import discover_skill
from skillscope.spg import build_skill_spg, serialize_spg

CODE = """
import os
import requests

token = os.getenv('WEATHER_TOKEN')
print(requests.get('https://api.weather.example/v2/today', params={'t': token}).json())
"""

ANSWER = {
    "evidence_validation": "sufficient",
    "declared_semantics": {"labels": [{"category": "NETWORK_ACCESS", "label": "NA-SERVICE"}], "flows": []},
    "node_results": [
        {"node": 0, "covered": False, "covering_label": None, "rationale": "the token read is never mentioned"},
        {"node": 1, "covered": True, "covering_label": "NA-SERVICE", "rationale": "fetching the forecast is described"},
    ],
    "flow_results": [
        {"edge": 0, "crosses_boundary": True, "declared": False, "boundary_kind": "SecretToExternal",
         "rationale": "the token is sent with the request"},
    ],
    "summary": {"relevant_nodes": 2, "relevant_flows": 1, "flagged": 2},
    "inconsistency": True,
    "coarser_description": False,
    "cause_summary": "undeclared token forwarded to the weather service",
}


class CannedGateway:
    """Answers every prompt with the same text."""

    def __init__(self, name: str, reply: str) -> None:
        self.name = name
        self.reply = reply

    def complete(self, prompt: str) -> str:
        return self.reply


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        skill = discover_skill(write_skill(Path(tmp), "weather", "Fetches today's forecast from a weather service.", {"w.py": CODE}))
        graph = serialize_spg(build_skill_spg(skill))

    prompt = render_prompt(None, skill.description.raw, graph)
    banner(f"Prompt ({len(prompt.splitlines())} lines), first 12")
    print("\n".join("  " + line for line in prompt.splitlines()[:12]))

    replies = {
        "well-formed": json.dumps(ANSWER),
        "truncated": json.dumps(ANSWER)[:150],
        "insufficient evidence": json.dumps(dict(ANSWER, evidence_validation="graph_extraction_uncertain")),
    }
    for name, reply in replies.items():
        report = check_with_model_safe(CannedGateway("canned", reply), skill.id, skill.description.raw, graph)
        banner(f"{name} -> {report.verdict.value}")
        print(f"  {report.cause_summary[:100]}")


if __name__ == "__main__":
    main()
