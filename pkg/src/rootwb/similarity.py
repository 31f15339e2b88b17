"""Deterministic text analysis backbone.

Tokenization, a TF-IDF vector space index with cosine ranking, and the
embedding-provider seam with a hashed-projection default. Everything in
this module is deterministic across runs and platforms: no stemming, a
versioned stopword file, smoothed idf, and a keyed blake2b feature hash.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Protocol, Sequence

import numpy as np

from .errors import DuplicateDocId

EMBED_DIM = 256
_EMBED_KEY = b"rootwb.embed.v1"  # fixed seed: embeddings must be stable across machines

_WORD_RE = re.compile(r"[A-Za-z0-9]+")
# Splits a chunk at camelCase boundaries: digit runs, acronyms (HTTPServer ->
# HTTP, Server), capitalized words, and lowercase tails. Digits inside a
# lowercase run stay attached (utf8 stays one token).
_CAMEL_RE = re.compile(r"[0-9]+|[A-Z]+(?![a-z])|[A-Z][a-z0-9]*|[a-z][a-z0-9]*")


def _load_wordlist(name: str) -> frozenset[str]:
    text = resources.files("rootwb.data").joinpath(name).read_text("utf-8")
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(line.lower())
    return frozenset(words)


STOPWORDS = _load_wordlist("stopwords.txt")


def tokenize(text: str, *, keep_stopwords: bool = False) -> list[str]:
    """Split text into lowercase terms.

    Splits on non-alphanumerics, then at camelCase boundaries (snake_case
    already falls apart at the underscore). Tokens of length 1 are dropped,
    stopwords too unless ``keep_stopwords``. No stemming.
    """
    tokens: list[str] = []
    for chunk in _WORD_RE.findall(text):
        for part in _CAMEL_RE.findall(chunk):
            tok = part.lower()
            if len(tok) < 2:
                continue
            if not keep_stopwords and tok in STOPWORDS:
                continue
            tokens.append(tok)
    return tokens


@dataclass
class CorpusIndex:
    """Immutable TF-IDF index over a document corpus.

    ``vectors`` holds L2-normalized sparse tf-idf maps; ``vocabulary`` maps
    each term to its document frequency.
    """

    doc_ids: list[str]
    vocabulary: dict[str, int]
    vectors: dict[str, dict[str, float]]
    n_docs: int

    def idf(self, term: str) -> float:
        # Smoothed so terms present in every document keep positive weight.
        return math.log((self.n_docs + 1) / (self.vocabulary.get(term, 0) + 1)) + 1.0

    def query_vector(self, text: str) -> dict[str, float]:
        """Vectorize a query with the corpus idf; out-of-vocabulary terms drop."""
        counts: dict[str, int] = {}
        for tok in tokenize(text):
            if tok in self.vocabulary:
                counts[tok] = counts.get(tok, 0) + 1
        return _normalize({t: (1.0 + math.log(c)) * self.idf(t) for t, c in counts.items()})


def _normalize(weights: dict[str, float]) -> dict[str, float]:
    norm = math.sqrt(sum(w * w for w in weights.values()))
    if norm == 0.0:
        return {}
    return {t: w / norm for t, w in weights.items()}


def build_index(docs: Iterable[tuple[str, str]]) -> CorpusIndex:
    """Build a TF-IDF index: tf = 1 + ln(count), idf = ln((N+1)/(df+1)) + 1."""
    doc_ids: list[str] = []
    doc_counts: dict[str, dict[str, int]] = {}
    for doc_id, text in docs:
        if doc_id in doc_counts:
            raise DuplicateDocId(f"document id {doc_id!r} appears twice")
        doc_ids.append(doc_id)
        counts: dict[str, int] = {}
        for tok in tokenize(text):
            counts[tok] = counts.get(tok, 0) + 1
        doc_counts[doc_id] = counts

    vocabulary: dict[str, int] = {}
    for counts in doc_counts.values():
        for term in counts:
            vocabulary[term] = vocabulary.get(term, 0) + 1

    n = len(doc_ids)
    index = CorpusIndex(doc_ids=doc_ids, vocabulary=vocabulary, vectors={}, n_docs=n)
    for doc_id in doc_ids:
        weights = {
            t: (1.0 + math.log(c)) * index.idf(t) for t, c in doc_counts[doc_id].items()
        }
        index.vectors[doc_id] = _normalize(weights)
    return index


def cosine(vec_a: dict[str, float], vec_b: dict[str, float]) -> float:
    """Dot product of normalized sparse vectors; zero vectors score 0.0."""
    if len(vec_b) < len(vec_a):
        vec_a, vec_b = vec_b, vec_a
    return sum(w * vec_b.get(t, 0.0) for t, w in vec_a.items())


def top_k(index: CorpusIndex, query_text: str, k: int) -> list[tuple[str, float]]:
    """Rank all documents against a query; descending score, ties by doc id.

    Returns the first min(k, N) rows; zero-score documents participate and
    sort by ascending id.
    """
    if k <= 0:
        return []
    qvec = index.query_vector(query_text)
    scored = [(doc_id, cosine(qvec, index.vectors[doc_id])) for doc_id in index.doc_ids]
    scored.sort(key=lambda row: (-row[1], row[0]))
    return scored[: min(k, index.n_docs)]


def text_similarity(index: CorpusIndex, text_a: str, text_b: str) -> float:
    """Cosine between two texts vectorized as queries against one corpus."""
    return cosine(index.query_vector(text_a), index.query_vector(text_b))


def _term_bucket(term: str) -> tuple[int, float]:
    digest = hashlib.blake2b(term.encode("utf-8"), key=_EMBED_KEY, digest_size=8).digest()
    val = int.from_bytes(digest, "big")
    sign = 1.0 if (val >> 8) & 1 else -1.0
    return val % EMBED_DIM, sign


def hash_embed(texts: Sequence[str]) -> np.ndarray:
    """Embed texts as 256-dim signed feature hashes of their tf-idf weights.

    The input batch is the idf corpus. Each vector is L2-normalized; a text
    with no tokens embeds to the zero vector.
    """
    index = build_index((str(i), text) for i, text in enumerate(texts))
    out = np.zeros((len(texts), EMBED_DIM), dtype=np.float64)
    for row in range(len(texts)):
        for term, weight in index.vectors[str(row)].items():
            bucket, sign = _term_bucket(term)
            out[row, bucket] += sign * weight
        norm = np.linalg.norm(out[row])
        if norm > 0.0:
            out[row] /= norm
    return out


class EmbeddingProvider(Protocol):
    """Seam for embedding backends; the default is the deterministic hash."""

    dimension: int

    def embed(self, texts: Sequence[str]) -> np.ndarray: ...


class HashEmbeddingProvider:
    """Default provider: deterministic hashed-projection embeddings."""

    dimension = EMBED_DIM

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return hash_embed(texts)
