"""Generation-provider seam: deterministic offline mock and HTTP remote.

Call sites build an instruction string with a structured ``[kind]`` or
``[kind:param]`` marker plus a natural-language ask, and a list of context
documents. A remote model answers the ask; the mock dispatches on the
marker and produces fixed templates so every pipeline is reproducible
offline. The instruction markers and templates are part of the public
test contract.
"""

from __future__ import annotations

import csv
import os
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence

import httpx

from .errors import ProviderUnavailable
from .similarity import EMBED_DIM, HashEmbeddingProvider, build_index

ENV_PROVIDER_URL = "ROOT_PROVIDER_URL"
ENV_PROVIDER_KEY = "ROOT_PROVIDER_KEY"

_MARKER_RE = re.compile(r"^\[([a-z-]+)(?::([^\]]*))?\]\s*(.*)", re.S)


@dataclass
class ContextDoc:
    """One retrieval/context document passed to a provider."""

    id: str
    name: str
    text: str

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "text": self.text}


def explain_instruction() -> str:
    return (
        "[explain-link] Explain in one sentence why the first context document "
        "traces to the second."
    )


def generate_instruction(target_type: str) -> str:
    return (
        f"[generate:{target_type}] Write one concise {target_type} statement that "
        "covers the shared functionality of the context documents."
    )


def chat_instruction(question: str) -> str:
    return f"[chat] {question}"


def summarize_file_instruction() -> str:
    return "[summarize-file] Summarize the code file given as context in one sentence."


def overview_instruction() -> str:
    return (
        "[project-overview] Write a one-paragraph overview of the project from the "
        "artifact type counts given as context."
    )


def data_flow_instruction() -> str:
    return (
        "[data-flow] Describe how data flows between the artifact layers listed "
        "as context."
    )


def contradiction_instruction() -> str:
    return (
        "[contradiction] Do the two context documents contradict each other? "
        "Answer 'yes: <reason>' or 'no'."
    )


class GenerationProvider(Protocol):
    def complete(self, instruction: str, context: Sequence[ContextDoc]) -> str: ...


_COMMENT_PREFIXES = ("//", "/*", "#", "--", ";", "%", "*")


def _first_comment_line(body: str) -> str | None:
    for line in body.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#!"):  # shebang is plumbing, not a summary
            continue
        for prefix in _COMMENT_PREFIXES:
            if stripped.startswith(prefix):
                text = stripped[len(prefix):].strip().removesuffix("*/").strip()
                if text:
                    return text
                break
        else:
            return None  # first substantive line is code, not a comment
    return None


def _top_terms(text: str, n: int) -> list[str]:
    index = build_index([("doc", text)])
    vec = index.vectors["doc"]
    ranked = sorted(vec.items(), key=lambda kv: (-kv[1], kv[0]))
    return [term for term, _ in ranked[:n]]


def _shared_terms(text_a: str, text_b: str, n: int = 5) -> list[str]:
    index = build_index([("a", text_a), ("b", text_b)])
    vec_a, vec_b = index.vectors["a"], index.vectors["b"]
    shared = set(vec_a) & set(vec_b)
    ranked = sorted(shared, key=lambda t: (-(vec_a[t] + vec_b[t]), t))
    return ranked[:n]


def load_contradiction_table(path: str | Path) -> dict[frozenset, str]:
    """Scripted verdict table: CSV ``artifact_a,artifact_b,verdict,explanation``."""
    table: dict[frozenset, str] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != ["artifact_a", "artifact_b", "verdict", "explanation"]:
            raise ValueError(f"unexpected contradiction table header: {header}")
        for row in reader:
            if not row:
                continue
            a, b, verdict, explanation = row
            if verdict.strip().lower() == "yes":
                table[frozenset((a, b))] = explanation
    return table


class MockProvider:
    """Deterministic offline provider; templates are the test contract."""

    def __init__(self, contradictions: dict[frozenset, str] | None = None):
        self.contradictions = contradictions or {}

    def complete(self, instruction: str, context: Sequence[ContextDoc]) -> str:
        match = _MARKER_RE.match(instruction)
        if not match:
            return "(no instruction)"
        kind, param = match.group(1), match.group(2)
        handler = getattr(self, f"_do_{kind.replace('-', '_')}", None)
        if handler is None:
            return "(unsupported instruction)"
        return handler(param, list(context))

    def _do_explain_link(self, param: str | None, context: list[ContextDoc]) -> str:
        if len(context) < 2:
            return "Linked because both mention: (no shared terms)"
        terms = _shared_terms(context[0].text, context[1].text)
        listing = ", ".join(terms) if terms else "(no shared terms)"
        return f"Linked because both mention: {listing}"

    def _do_generate(self, param: str | None, context: list[ContextDoc]) -> str:
        names = ", ".join(sorted(doc.name for doc in context))
        return f"{param or 'Artifact'} covering: {names}"

    def _do_chat(self, param: str | None, context: list[ContextDoc]) -> str:
        if not context:
            return "Based on the project: (no relevant artifacts found)"
        snippets = [doc.text for doc in context[:2] if doc.text]
        return "Based on the project: " + " ".join(snippets)

    def _do_summarize_file(self, param: str | None, context: list[ContextDoc]) -> str:
        if not context:
            return "(no file given)"
        doc = context[0]
        comment = _first_comment_line(doc.text)
        if comment:
            return comment
        terms = ", ".join(_top_terms(doc.text, 3))
        return f"Code file {doc.name} with terms: {terms}"

    def _do_project_overview(self, param: str | None, context: list[ContextDoc]) -> str:
        counts = [(doc.name, int(doc.text)) for doc in context]
        total = sum(n for _, n in counts)
        listing = ", ".join(f"{name} ({n})" for name, n in counts)
        return (
            f"This project contains {total} artifacts across {len(counts)} "
            f"types: {listing}."
        )

    def _do_data_flow(self, param: str | None, context: list[ContextDoc]) -> str:
        if not context:
            return "No trace links recorded yet."
        parts = []
        for doc in context:
            child, parent = doc.name.split(" -> ", 1)
            parts.append(f"from {child} to {parent} ({doc.text} links)")
        return "Data flows " + "; ".join(parts) + "."

    def _do_contradiction(self, param: str | None, context: list[ContextDoc]) -> str:
        if len(context) < 2:
            return "no"
        key = frozenset((context[0].id, context[1].id))
        if key in self.contradictions:
            return f"yes: {self.contradictions[key]}"
        return "no"


class FailingProvider:
    """Test double for the unreachable-provider path."""

    def complete(self, instruction: str, context: Sequence[ContextDoc]) -> str:
        raise ProviderUnavailable("provider configured but unreachable")


class HttpProvider:
    """Remote generation provider speaking the documented JSON contract.

    ``POST {url}/complete`` with ``{"instruction": ..., "context": [...]}``
    returns ``{"text": ...}``. One retry, then ProviderUnavailable.
    """

    def __init__(self, url: str, key: str | None = None, timeout: float = 30.0,
                 retries: int = 1):
        self.url = url.rstrip("/")
        self.key = key
        self.timeout = timeout
        self.retries = retries

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.key:
            headers["Authorization"] = f"Bearer {self.key}"
        return headers

    def complete(self, instruction: str, context: Sequence[ContextDoc]) -> str:
        payload = {
            "instruction": instruction,
            "context": [doc.to_dict() for doc in context],
        }
        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                response = httpx.post(
                    f"{self.url}/complete",
                    json=payload,
                    headers=self._headers(),
                    timeout=self.timeout,
                )
                response.raise_for_status()
                return response.json()["text"]
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
        raise ProviderUnavailable(f"generation provider unreachable: {last_error}")


class HttpEmbeddingProvider:
    """Remote embeddings: ``POST {url}/embed`` ``{"texts": [...]}`` -> vectors."""

    def __init__(self, url: str, key: str | None = None, timeout: float = 30.0):
        self.url = url.rstrip("/")
        self.key = key
        self.timeout = timeout
        self.dimension = EMBED_DIM

    def embed(self, texts: Sequence[str]):
        import numpy as np

        headers = {"Content-Type": "application/json"}
        if self.key:
            headers["Authorization"] = f"Bearer {self.key}"
        try:
            response = httpx.post(
                f"{self.url}/embed",
                json={"texts": list(texts)},
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            vectors = np.asarray(response.json()["vectors"], dtype=np.float64)
        except (httpx.HTTPError, KeyError, ValueError) as exc:
            raise ProviderUnavailable(f"embedding provider unreachable: {exc}")
        if vectors.ndim == 2 and vectors.shape[0] == len(texts):
            self.dimension = vectors.shape[1]
        return vectors


def generation_provider_from_env(env: dict | None = None) -> GenerationProvider:
    env = env if env is not None else dict(os.environ)
    url = env.get(ENV_PROVIDER_URL)
    if url:
        return HttpProvider(url, env.get(ENV_PROVIDER_KEY))
    return MockProvider()


def embedding_provider_from_env(env: dict | None = None):
    env = env if env is not None else dict(os.environ)
    url = env.get(ENV_PROVIDER_URL)
    if url:
        return HttpEmbeddingProvider(url, env.get(ENV_PROVIDER_KEY))
    return HashEmbeddingProvider()
