"""Concrete judge and perplexity providers.

Local deterministic implementations (scripted judges, a Laplace-smoothed
unigram language model) cover tests and offline runs; the HTTP variants talk
to chat-completion-style and perplexity endpoints, with bearer tokens read
from environment variables so credentials stay out of argv and reports.
"""

from __future__ import annotations

import math
import os
import re
from typing import Iterable, Mapping, Sequence

import httpx

from .corpus import Sentence
from .errors import ConfigurationError
from .metrics import PerplexityProvider  # noqa: F401  (re-exported protocol)

JUDGE_TOKEN_ENV = "GECEVAL_JUDGE_TOKEN"
PPL_TOKEN_ENV = "GECEVAL_PPL_TOKEN"

_SOURCE_LINE = re.compile(r"^Source sentence: (.*)$", re.MULTILINE)


class ScriptedJudge:
    """Replays a fixed sequence of completions, one per call."""

    def __init__(self, responses: Sequence[str]):
        self._responses = list(responses)
        self._next = 0

    @classmethod
    def constant(cls, answer: str) -> "ConstantJudge":
        return ConstantJudge(answer)

    def complete(self, prompt: str) -> str:
        if self._next >= len(self._responses):
            raise ConfigurationError(
                f"judge script exhausted after {len(self._responses)} calls")
        response = self._responses[self._next]
        self._next += 1
        return response


class ConstantJudge:
    def __init__(self, answer: str):
        self._answer = answer

    def complete(self, prompt: str) -> str:
        return self._answer


class MappingJudge:
    """Answers by the source sentence extracted from the rendered prompt.

    Robust under concurrent calls and case reordering, unlike an
    order-scripted judge; pairs with the shipped prompt template's
    ``Source sentence:`` line.
    """

    def __init__(self, by_source: Mapping[str, str], default: str | None = None):
        self._by_source = dict(by_source)
        self._default = default

    def complete(self, prompt: str) -> str:
        match = _SOURCE_LINE.search(prompt)
        if match is None:
            raise ConfigurationError("prompt has no 'Source sentence:' line")
        source = match.group(1)
        if source in self._by_source:
            return self._by_source[source]
        if self._default is not None:
            return self._default
        raise ConfigurationError(f"no scripted answer for source {source!r}")


def _bearer_headers(token_env: str) -> dict[str, str]:
    token = os.environ.get(token_env)
    if not token:
        raise ConfigurationError(
            f"environment variable {token_env} is not set (API token)")
    return {"Authorization": f"Bearer {token}"}


class HttpChatJudge:
    """Chat-completion endpoint as a judge: one user message in, text out."""

    def __init__(self, url: str, *, model: str | None = None,
                 token_env: str = JUDGE_TOKEN_ENV, timeout: float = 30.0,
                 transport: httpx.BaseTransport | None = None):
        self._url = url
        self._model = model
        self._client = httpx.Client(timeout=timeout, transport=transport,
                                    headers=_bearer_headers(token_env))

    def complete(self, prompt: str) -> str:
        body: dict = {"messages": [{"role": "user", "content": prompt}]}
        if self._model:
            body["model"] = self._model
        response = self._client.post(self._url, json=body)
        response.raise_for_status()
        return response.json()["choices"][0]["message"]["content"]

    def close(self):
        self._client.close()


class HttpMetaJudge:
    """Remote candidate picker for the ensemble meta-model fallback.

    POST {"source": ..., "candidates": [...]} -> {"choice": index}.
    """

    def __init__(self, url: str, *, token_env: str = JUDGE_TOKEN_ENV,
                 timeout: float = 30.0,
                 transport: httpx.BaseTransport | None = None):
        self._url = url
        self._client = httpx.Client(timeout=timeout, transport=transport,
                                    headers=_bearer_headers(token_env))

    def choose(self, source, candidates) -> int:
        response = self._client.post(self._url, json={
            "source": source.text,
            "candidates": [c.text for c in candidates],
        })
        response.raise_for_status()
        return int(response.json()["choice"])

    def close(self):
        self._client.close()


class UnigramPerplexity:
    """Laplace-smoothed unigram language model over lowercased tokens.

    Deterministic given its training lines; useful as an offline stand-in
    wherever a perplexity provider is required.
    """

    def __init__(self, train_lines: Iterable[str]):
        self._counts: dict[str, int] = {}
        self._total = 0
        for line in train_lines:
            for token in line.lower().split():
                self._counts[token] = self._counts.get(token, 0) + 1
                self._total += 1
        self._vocab = len(self._counts) + 1  # +1 for the unseen token class

    def perplexity(self, sentence: Sentence) -> float:
        tokens = [t.lower() for t in sentence.tokens]
        if not tokens:
            return float(self._total + self._vocab)
        log_prob = 0.0
        for token in tokens:
            count = self._counts.get(token, 0)
            log_prob += math.log((count + 1) / (self._total + self._vocab))
        return math.exp(-log_prob / len(tokens))


class HttpPerplexity:
    """Remote perplexity endpoint: POST {"text": ...} -> {"perplexity": ...}."""

    def __init__(self, url: str, *, token_env: str = PPL_TOKEN_ENV,
                 timeout: float = 30.0,
                 transport: httpx.BaseTransport | None = None):
        self._url = url
        self._client = httpx.Client(timeout=timeout, transport=transport,
                                    headers=_bearer_headers(token_env))

    def perplexity(self, sentence: Sentence) -> float:
        response = self._client.post(self._url, json={"text": sentence.text})
        response.raise_for_status()
        value = float(response.json()["perplexity"])
        if value <= 0:
            raise ConfigurationError(f"endpoint returned non-positive perplexity {value}")
        return value

    def close(self):
        self._client.close()
