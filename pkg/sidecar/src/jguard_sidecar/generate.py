"""Batch generation of labeled news corpora through a chat-completions API.

One request per headline with the fixed prompt template and sampling
parameters (temperature 0.5, top_p 1, 1024-token cap). Credentials come
only from the environment. Transient failures (429/5xx/network) are
retried with backoff and then logged and skipped; authentication failures
abort immediately so no partial output is ever written.
"""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass

import httpx

from .corpusio import write_jsonl

log = logging.getLogger(__name__)

PROMPT_TEMPLATE = "Generate a news article with the {headline}."


class AuthenticationError(RuntimeError):
    pass


@dataclass
class ChatApiConfig:
    model: str = "gpt-3.5-turbo"
    base_url: str = "https://api.openai.com/v1"
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 0.5
    top_p: float = 1.0
    max_tokens: int = 1024
    max_retries: int = 3
    retry_wait: float = 1.0
    min_interval: float = 0.0  # simple rate limit between requests
    timeout: float = 60.0


def _request_body(config: ChatApiConfig, headline: str) -> dict:
    return {
        "model": config.model,
        "temperature": config.temperature,
        "top_p": config.top_p,
        "max_tokens": config.max_tokens,
        "messages": [
            {"role": "user", "content": PROMPT_TEMPLATE.format(headline=headline)},
        ],
    }


def generate_chatgpt_corpus(headlines: list[str], config: ChatApiConfig,
                            transport: httpx.BaseTransport | None = None) -> list[dict]:
    """One AI-labeled article per headline; failed headlines are skipped
    after retries. Returns corpus records (not yet written to disk)."""
    api_key = os.environ.get(config.api_key_env)
    if not api_key:
        raise AuthenticationError(
            f"no API key in environment variable {config.api_key_env}")

    articles = []
    with httpx.Client(base_url=config.base_url, transport=transport,
                      timeout=config.timeout,
                      headers={"Authorization": f"Bearer {api_key}"}) as client:
        for i, headline in enumerate(headlines):
            if config.min_interval > 0 and i > 0:
                time.sleep(config.min_interval)
            text = _generate_one(client, config, headline)
            if text is None:
                log.warning("skipping headline %r after %d attempts", headline,
                            config.max_retries)
                continue
            articles.append({
                "id": f"chatgpt-{i:05d}",
                "text": text,
                "label": 1,
                "generator": "chatgpt",
            })
    return articles


def _generate_one(client: httpx.Client, config: ChatApiConfig, headline: str) -> str | None:
    body = _request_body(config, headline)
    for attempt in range(1, config.max_retries + 1):
        try:
            resp = client.post("/chat/completions", json=body)
        except httpx.HTTPError as e:
            log.warning("attempt %d/%d for %r failed: %s", attempt,
                        config.max_retries, headline, e)
            if attempt < config.max_retries:
                time.sleep(config.retry_wait * attempt)
            continue
        if resp.status_code in (401, 403):
            raise AuthenticationError(f"API rejected credentials ({resp.status_code})")
        if resp.status_code == 429 or resp.status_code >= 500:
            log.warning("attempt %d/%d for %r got status %d", attempt,
                        config.max_retries, headline, resp.status_code)
            if attempt < config.max_retries:
                time.sleep(config.retry_wait * attempt)
            continue
        resp.raise_for_status()
        return resp.json()["choices"][0]["message"]["content"]
    return None


def generate_to_file(headlines: list[str], config: ChatApiConfig, path: str,
                     transport: httpx.BaseTransport | None = None) -> int:
    """Generate and write the corpus file only after every request settled,
    so an aborted run leaves no partial file."""
    articles = generate_chatgpt_corpus(headlines, config, transport=transport)
    write_jsonl(articles, path)
    return len(articles)


def read_headlines(path: str | os.PathLike) -> list[str]:
    with open(path, encoding="utf-8") as f:
        return [line.strip() for line in f if line.strip()]
