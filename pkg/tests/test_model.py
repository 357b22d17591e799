from __future__ import annotations

import io
import json
import re
import threading
import time
import urllib.error

import pytest

from skillscope.checker import check_with_model, check_with_model_safe, render_prompt
from skillscope.checker.model import (
    ENV_ENDPOINT,
    ENV_KEY,
    ENV_NAME,
    GatewayConfig,
    HttpChatGateway,
    RateLimiter,
    with_retries,
)
from skillscope.checker.report import Verdict, parse_model_output
from skillscope.errors import GatewayConfigError, MalformedModelOutput, SchemaError, TransportError
from skillscope.skill import discover_skill
from skillscope.spg import build_skill_spg, serialize_spg
from skillscope.taxonomy import load_taxonomy

from .conftest import FIXTURES, GOLDEN

TAXONOMY = load_taxonomy()


@pytest.fixture(scope="module")
def motivating():
    skill = discover_skill(FIXTURES / "motivating_skill", base=FIXTURES)
    return skill, serialize_spg(build_skill_spg(skill, TAXONOMY))


CANNED = {
    "evidence_validation": "sufficient",
    "declared_semantics": {
        "labels": [{"category": "FILE_READ", "label": "FR-DATA"}],
        "flows": [],
        "evidence": {"FR-DATA": "Read target files"},
    },
    "node_results": [
        {"node": 0, "covered": False, "covering_label": None, "rationale": "credential read is not described"},
        {"node": 1, "covered": False, "covering_label": None, "rationale": "outbound request is not described"},
    ],
    "flow_results": [
        {"edge": 0, "crosses_boundary": True, "declared": False, "boundary_kind": "SecretToExternal",
         "rationale": "key leaves the machine"},
    ],
    "summary": {"relevant_nodes": 2, "relevant_flows": 1, "flagged": 3},
    "inconsistency": True,
    "coarser_description": False,
    "cause_summary": "undeclared credential sent to a remote endpoint",
}


class StubGateway:
    name = "stub"

    def __init__(self, reply: str) -> None:
        self.reply = reply
        self.prompts: list[str] = []

    def complete(self, prompt: str) -> str:
        self.prompts.append(prompt)
        return self.reply


# -- prompt --------------------------------------------------------------------------


def test_prompt_matches_golden(motivating):
    skill, doc = motivating
    expected = (GOLDEN / "motivating_skill.prompt.txt").read_text(encoding="utf-8")
    assert render_prompt(None, skill.description.raw, doc) == expected
    assert render_prompt(TAXONOMY, skill.description.raw, doc) == expected


def test_prompt_section_order(motivating):
    skill, doc = motivating
    text = render_prompt(TAXONOMY, skill.description.raw, doc)
    positions = [text.index(f"## {name}\n") for name in ("System Role", "Input", "Audit Tasks", "Core Principles", "Output")]
    assert positions == sorted(positions)
    assert "graph_extraction_uncertain" in text


def test_prompt_taxonomy_block(motivating):
    skill, doc = motivating
    text = render_prompt(TAXONOMY, skill.description.raw, doc)
    headers = re.findall(r"^#### (\S+)$", text, flags=re.M)
    assert headers == list(TAXONOMY.category_ids) and len(headers) == 11
    block = text[text.index("#### "):text.index("### SKILL.md")]
    listed = re.findall(r"^- ([A-Z]+-[A-Z]+):", block, flags=re.M)
    assert sorted(listed) == sorted(lab.code for lab in TAXONOMY.labels)


def test_prompt_requires_valid_graph(motivating):
    skill, doc = motivating
    broken = dict(doc)
    broken.pop("stats")
    with pytest.raises(SchemaError):
        render_prompt(TAXONOMY, skill.description.raw, broken)


# -- gateway results -------------------------------------------------------------------


def test_canned_report_passes_through(motivating):
    skill, doc = motivating
    gw = StubGateway(json.dumps(CANNED))
    report = check_with_model(gw, skill.id, skill.description.raw, doc, TAXONOMY)
    assert len(gw.prompts) == 1
    assert report.backend == "Model(stub)"
    assert report.verdict is Verdict.INCONSISTENT
    out = report.to_json()
    for key in ("evidence_validation", "inconsistency", "coarser_description", "cause_summary", "summary"):
        assert out[key] == CANNED[key]
    assert out["declared_semantics"] == CANNED["declared_semantics"]
    assert [f["edge"] for f in out["flow_results"]] == [0]
    assert (out["flow_results"][0]["source"], out["flow_results"][0]["target"]) == (0, 1)


def test_fenced_reply_is_accepted(motivating):
    skill, doc = motivating
    gw = StubGateway("```json\n" + json.dumps(CANNED) + "\n```")
    assert check_with_model(gw, skill.id, skill.description.raw, doc).verdict is Verdict.INCONSISTENT


def test_truncated_reply(motivating):
    skill, doc = motivating
    gw = StubGateway(json.dumps(CANNED)[:200])
    with pytest.raises(MalformedModelOutput) as info:
        check_with_model(gw, skill.id, skill.description.raw, doc)
    assert info.value.raw == gw.reply
    report = check_with_model_safe(gw, skill.id, skill.description.raw, doc)
    assert report.verdict is Verdict.UNCERTAIN
    assert "malformed" in report.cause_summary


def test_uncertain_status(motivating):
    skill, doc = motivating
    reply = dict(CANNED, evidence_validation="graph_extraction_uncertain")
    report = check_with_model(StubGateway(json.dumps(reply)), skill.id, skill.description.raw, doc)
    assert report.verdict is Verdict.UNCERTAIN


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("summary"),
        lambda d: d.__setitem__("evidence_validation", "maybe"),
        lambda d: d["flow_results"][0].__setitem__("edge", 5),
        lambda d: d["flow_results"][0].__setitem__("boundary_kind", "Sideways"),
        lambda d: d["summary"].__setitem__("flagged", 0),
    ],
)
def test_schema_violations(mutate):
    doc = json.loads(json.dumps(CANNED))
    mutate(doc)
    with pytest.raises(MalformedModelOutput):
        parse_model_output(json.dumps(doc), "s", "Model(x)", ((0, 1),))


# -- transport -----------------------------------------------------------------------------


class FakeResponse(io.BytesIO):
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False


def chat_reply(content: str) -> FakeResponse:
    return FakeResponse(json.dumps({"choices": [{"message": {"content": content}}]}).encode())


class FakeOpener:
    def __init__(self, outcomes):
        self.outcomes = list(outcomes)
        self.requests = []

    def __call__(self, request, timeout=None):
        self.requests.append(request)
        outcome = self.outcomes.pop(0)
        if isinstance(outcome, Exception):
            raise outcome
        return outcome


def http_error(code: int) -> urllib.error.HTTPError:
    return urllib.error.HTTPError("http://x", code, "err", {}, None)


def gateway(outcomes, sleeps):
    config = GatewayConfig("http://model.invalid/v1/chat/completions", "m1", key="sekrit")
    return HttpChatGateway(config, sleep=sleeps.append, opener=FakeOpener(outcomes))


def test_request_shape():
    sleeps: list[float] = []
    gw = gateway([chat_reply("hi")], sleeps)
    assert gw.complete("prompt text") == "hi"
    req = gw._open.requests[0]
    body = json.loads(req.data)
    assert body["temperature"] == 0 and body["model"] == "m1"
    assert body["messages"] == [{"role": "user", "content": "prompt text"}]
    assert req.get_header("Authorization") == "Bearer sekrit"
    assert sleeps == []


@pytest.mark.parametrize("failure", [http_error(503), http_error(429), urllib.error.URLError("down")])
def test_transport_errors_are_retried(failure):
    sleeps: list[float] = []
    gw = gateway([failure, failure, chat_reply("ok")], sleeps)
    assert gw.complete("p") == "ok"
    assert sleeps == [1.0, 2.0]


def test_retries_are_bounded():
    sleeps: list[float] = []
    gw = gateway([http_error(500)] * 3, sleeps)
    with pytest.raises(TransportError):
        gw.complete("p")
    assert len(gw._open.requests) == 3 and sleeps == [1.0, 2.0]


def test_client_errors_are_not_retried():
    sleeps: list[float] = []
    gw = gateway([http_error(400), chat_reply("never")], sleeps)
    with pytest.raises(GatewayConfigError):
        gw.complete("p")
    assert len(gw._open.requests) == 1 and sleeps == []


def test_non_chat_reply_is_malformed_and_not_retried():
    sleeps: list[float] = []
    gw = gateway([FakeResponse(b"<html>"), chat_reply("x")], sleeps)
    with pytest.raises(MalformedModelOutput):
        gw.complete("p")
    assert len(gw._open.requests) == 1


def test_with_retries_backoff():
    calls = []

    def flaky():
        calls.append(1)
        if len(calls) < 3:
            raise TransportError("x")
        return "done"

    sleeps: list[float] = []
    assert with_retries(flaky, base_delay=0.5, sleep=sleeps.append) == "done"
    assert sleeps == [0.5, 1.0]


def test_config_from_env():
    env = {ENV_ENDPOINT: "http://e/v1", ENV_NAME: "m", ENV_KEY: "k"}
    assert GatewayConfig.from_env(env) == GatewayConfig("http://e/v1", "m", "k")
    assert GatewayConfig.from_env({ENV_ENDPOINT: "http://e", ENV_NAME: "m"}).key is None
    with pytest.raises(GatewayConfigError, match=ENV_NAME):
        GatewayConfig.from_env({ENV_ENDPOINT: "http://e"})
    with pytest.raises(GatewayConfigError, match=ENV_ENDPOINT):
        GatewayConfig.from_env({})


def test_rate_limiter_caps_concurrency():
    limiter = RateLimiter(in_flight=2)
    active = []
    peak = []
    lock = threading.Lock()

    def work():
        with limiter:
            with lock:
                active.append(1)
                peak.append(len(active))
            time.sleep(0.02)
            with lock:
                active.pop()

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert max(peak) <= 2


def test_rate_limiter_spaces_starts():
    limiter = RateLimiter(in_flight=4, min_interval=0.02)
    starts = []
    for _ in range(3):
        with limiter:
            starts.append(time.monotonic())
    assert starts[2] - starts[0] >= 0.035


# -- batch behavior ------------------------------------------------------------------------


class DownGateway:
    name = "down"

    def complete(self, prompt: str) -> str:
        raise TransportError("connection refused")


def test_pipeline_outage_is_uncertain():
    from skillscope.pipeline import check_skill

    skill = discover_skill(FIXTURES / "motivating_skill", base=FIXTURES)
    scan, report = check_skill(skill, TAXONOMY, gateway=DownGateway())
    assert scan.spg is not None
    assert report.verdict is Verdict.UNCERTAIN and "unavailable" in report.cause_summary


def test_pipeline_skips_model_when_nothing_parsed():
    from skillscope.pipeline import check_skill

    gw = StubGateway(json.dumps(CANNED))
    skill = discover_skill(FIXTURES / "go_skill", base=FIXTURES)
    scan, report = check_skill(skill, TAXONOMY, gateway=gw)
    assert scan.spg is None and gw.prompts == []
    assert report.verdict is Verdict.UNCERTAIN
