import json

import httpx
import pytest

from jguard_sidecar.generate import (
    PROMPT_TEMPLATE,
    AuthenticationError,
    ChatApiConfig,
    generate_chatgpt_corpus,
    generate_to_file,
)


def _ok_response(text="generated article body"):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def _capture_transport(captured, responses=None):
    responses = list(responses or [])

    def handler(request: httpx.Request) -> httpx.Response:
        captured.append(request)
        if responses:
            return responses.pop(0)
        return _ok_response()

    return httpx.MockTransport(handler)


@pytest.fixture
def api_key(monkeypatch):
    monkeypatch.setenv("OPENAI_API_KEY", "test-key")


@pytest.mark.acceptance("C10 generation dry-run sends the prompt and sampling params")
def test_c10_request_body_prompt_and_sampling(api_key):
    captured = []
    config = ChatApiConfig(retry_wait=0.0)
    articles = generate_chatgpt_corpus(["Mayor opens new bridge"], config,
                                       transport=_capture_transport(captured))
    assert len(captured) == 1
    body = json.loads(captured[0].content)
    assert body["messages"][0]["content"] == \
        PROMPT_TEMPLATE.format(headline="Mayor opens new bridge")
    assert body["temperature"] == 0.5
    assert body["top_p"] == 1
    assert body["max_tokens"] == 1024
    assert body["model"] == "gpt-3.5-turbo"
    assert captured[0].headers["authorization"] == "Bearer test-key"
    assert articles[0]["label"] == 1
    assert articles[0]["generator"] == "chatgpt"


def test_two_headlines_two_articles(api_key):
    captured = []
    config = ChatApiConfig(retry_wait=0.0)
    articles = generate_chatgpt_corpus(["headline one", "headline two"], config,
                                       transport=_capture_transport(captured))
    assert len(articles) == 2
    assert [a["id"] for a in articles] == ["chatgpt-00000", "chatgpt-00001"]
    assert all(a["label"] == 1 and a["generator"] == "chatgpt" for a in articles)


def test_retries_transient_failures(api_key):
    captured = []
    responses = [httpx.Response(500), httpx.Response(429), _ok_response("after retries")]
    config = ChatApiConfig(retry_wait=0.0, max_retries=3)
    articles = generate_chatgpt_corpus(["headline"], config,
                                       transport=_capture_transport(captured, responses))
    assert len(captured) == 3
    assert articles[0]["text"] == "after retries"


def test_exhausted_retries_skip_headline(api_key, caplog):
    responses = [httpx.Response(500)] * 3 + [_ok_response("second ok")]
    config = ChatApiConfig(retry_wait=0.0, max_retries=3)
    with caplog.at_level("WARNING"):
        articles = generate_chatgpt_corpus(["bad", "good"], config,
                                           transport=_capture_transport([], responses))
    assert [a["text"] for a in articles] == ["second ok"]
    assert any("skipping" in rec.message for rec in caplog.records)


def test_unauthorized_aborts_without_partial_file(api_key, tmp_path):
    out = tmp_path / "corpus.jsonl"
    responses = [_ok_response("first"), httpx.Response(401)]
    config = ChatApiConfig(retry_wait=0.0)
    with pytest.raises(AuthenticationError):
        generate_to_file(["one", "two"], config, str(out),
                         transport=_capture_transport([], responses))
    assert not out.exists()


def test_missing_api_key_rejected(monkeypatch):
    monkeypatch.delenv("OPENAI_API_KEY", raising=False)
    with pytest.raises(AuthenticationError):
        generate_chatgpt_corpus(["x"], ChatApiConfig(), transport=_capture_transport([]))
