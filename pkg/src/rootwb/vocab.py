"""Project vocabulary and requirement health checks.

Concepts live both as vocabulary entries and as artifacts of type Concept
so they participate in views and links. Health checks emit findings in a
fixed order (cited, predicted, undefined, ambiguity, contradiction), keyed
by (artifact, kind, subject) so re-runs never duplicate and dismissed
findings stay dismissed.
"""

from __future__ import annotations

import math
import re
import statistics
from typing import Callable, Sequence

from .errors import (
    AlreadyClosed,
    DuplicateLink,
    DuplicateTerm,
    EmptyField,
    InvalidAction,
    ProviderUnavailable,
    SelfLink,
    UnknownFinding,
    WrongType,
)
from .model import Artifact, Concept, HealthFinding, Project
from .providers import ContextDoc, GenerationProvider, contradiction_instruction
from .similarity import STOPWORDS, _load_wordlist, build_index, cosine, tokenize

PREDICTED_CONCEPT_THRESHOLD = 0.30  # mirrors the trace threshold
DEFAULT_TOP_CANDIDATES = 25
MIN_SHARED_TERMS = 2  # contradiction pre-filter

AMBIGUITY_LEXICON = tuple(sorted(_load_wordlist("ambiguity.txt")))

# Artifact types whose text is vocabulary source material: everything that
# is natural language, i.e. not code and not the vocabulary itself.
_NON_TEXT_TYPES = frozenset({"Code", "Concept"})


def _term_pattern(term: str) -> re.Pattern:
    words = [re.escape(w) for w in term.split()]
    return re.compile(
        r"(?<![A-Za-z0-9])" + r"\s+".join(words) + r"(?![A-Za-z0-9])", re.IGNORECASE
    )


def _contains_ngram(stream: Sequence[str], gram: Sequence[str]) -> bool:
    n = len(gram)
    target = tuple(gram)
    return any(tuple(stream[i : i + n]) == target for i in range(len(stream) - n + 1))


def add_concept(
    project: Project,
    term: str,
    definition: str = "",
    origin: str = "manual",
    flag_note: str | None = None,
) -> int:
    """Add a vocabulary term plus its Concept artifact (one mutation)."""
    if not term or not term.strip():
        raise EmptyField("concept term must be non-empty")
    term = term.strip()
    key = term.casefold()
    if key in project.concepts:
        raise DuplicateTerm(f"concept {term!r} already exists")
    artifact = Artifact(
        id=project.next_artifact_id("Concept"),
        type="Concept",
        name=term,
        body=definition,
        provenance="manual",
        flagged=flag_note,
    )
    artifact.validate()
    project.artifacts[artifact.id] = artifact
    project.concepts[key] = Concept(
        term=term, definition=definition, origin=origin, artifact_id=artifact.id
    )
    return project.touch()


def extract_concepts(project: Project, top_n: int = DEFAULT_TOP_CANDIDATES) -> list[tuple[str, float]]:
    """Score 1-3-gram candidate terms from natural-language artifacts.

    Score is total frequency x smoothed idf (document frequency over the
    same artifacts). N-grams that start or end with a stopword are excluded,
    as are terms already in the vocabulary. Descending score, ties
    alphabetical.
    """
    docs = [a for a in project.artifacts.values() if a.type not in _NON_TEXT_TYPES]
    if not docs:
        return []
    existing = set(project.concepts)
    frequency: dict[str, int] = {}
    doc_frequency: dict[str, int] = {}
    for artifact in docs:
        stream = tokenize(artifact.body, keep_stopwords=True)
        seen_here: set[str] = set()
        for n in (1, 2, 3):
            for i in range(len(stream) - n + 1):
                gram = stream[i : i + n]
                if gram[0] in STOPWORDS or gram[-1] in STOPWORDS:
                    continue
                term = " ".join(gram)
                if term in existing:
                    continue
                frequency[term] = frequency.get(term, 0) + 1
                if term not in seen_here:
                    seen_here.add(term)
                    doc_frequency[term] = doc_frequency.get(term, 0) + 1
    n_docs = len(docs)
    scored = [
        (term, freq * (math.log((n_docs + 1) / (doc_frequency[term] + 1)) + 1.0))
        for term, freq in frequency.items()
    ]
    scored.sort(key=lambda row: (-row[1], row[0]))
    return scored[:top_n]


def _get_or_create_finding(
    project: Project, artifact_id: str, kind: str, subject: str, explanation: str
) -> HealthFinding | None:
    """Return the finding for this key, creating it if new.

    Dismissed and resolved findings are left alone and excluded from
    results so identical re-runs stay quiet about closed items.
    """
    for finding in project.findings.values():
        if finding.key == (artifact_id, kind, subject):
            return finding if finding.state == "open" else None
    finding = HealthFinding(
        id=project.next_finding_id(),
        artifact_id=artifact_id,
        kind=kind,
        subject=subject,
        explanation=explanation,
    )
    project.findings[finding.id] = finding
    return finding


def health_check(
    project: Project,
    artifact_id: str,
    provider: GenerationProvider,
    candidates: list[tuple[str, float]] | None = None,
    on_event: Callable[[str], None] | None = None,
) -> list[HealthFinding]:
    """Run all health checks on one natural-language artifact.

    Emits findings in order: cited concepts (with an auto-created
    artifact -> Concept link), predicted concepts, undefined concepts,
    ambiguous wording, contradictions (provider-judged over same-type
    artifacts sharing at least two informative terms). Returns the open
    findings for this artifact.
    """
    artifact = project.require_artifact(artifact_id)
    if artifact.type == "Code":
        raise WrongType("health checks apply to natural-language artifacts, not Code")
    body = artifact.body
    results: list[HealthFinding] = []
    before = (len(project.findings), len(project.links))

    def emit(kind: str, subject: str, explanation: str) -> None:
        finding = _get_or_create_finding(project, artifact_id, kind, subject, explanation)
        if finding is not None:
            results.append(finding)

    # (a) cited concepts: verbatim word-boundary mention creates a link
    cited: set[str] = set()
    for key in sorted(project.concepts):
        concept = project.concepts[key]
        if not _term_pattern(concept.term).search(body):
            continue
        cited.add(key)
        emit(
            "cited-concept",
            concept.term,
            f"Concept '{concept.term}' is cited in this artifact.",
        )
        if concept.artifact_id and concept.artifact_id in project.artifacts:
            try:
                project.add_link(
                    artifact_id,
                    concept.artifact_id,
                    status="approved",
                    created_by="vocab-health",
                )
            except (DuplicateLink, SelfLink):
                pass

    # (b) predicted concepts: definition similar to the artifact text
    if project.concepts and any(k not in cited for k in project.concepts):
        index = build_index(
            (a.id, a.scoring_text()) for a in project.artifacts.values()
        )
        qbody = index.query_vector(body)
        for key in sorted(project.concepts):
            if key in cited:
                continue
            concept = project.concepts[key]
            score = cosine(index.query_vector(concept.definition), qbody)
            if score >= PREDICTED_CONCEPT_THRESHOLD:
                emit(
                    "predicted-concept",
                    concept.term,
                    f"Concept '{concept.term}' appears related "
                    f"(similarity {score:.2f}) but is not cited.",
                )

    # (c) undefined concepts: strong extraction candidates present here
    if candidates is None:
        candidates = extract_concepts(project)
    if candidates:
        median = statistics.median(score for _, score in candidates)
        stream = tokenize(body, keep_stopwords=True)
        for term, score in candidates:
            if score <= median:
                continue
            if _contains_ngram(stream, term.split()):
                emit(
                    "undefined-concept",
                    term,
                    f"Term '{term}' is used here but missing from the project vocabulary.",
                )

    # (d) ambiguous wording from the shipped lexicon
    for term in AMBIGUITY_LEXICON:
        if _term_pattern(term).search(body):
            emit("ambiguity", term, f"Ambiguous wording: '{term}'.")

    # (e) contradictions, judged by the provider over pre-filtered pairs
    own_tokens = set(tokenize(body))
    others = sorted(
        (
            a
            for a in project.artifacts.values()
            if a.id != artifact_id and a.type == artifact.type
        ),
        key=lambda a: a.id,
    )
    for other in others:
        if len(own_tokens & set(tokenize(other.body))) < MIN_SHARED_TERMS:
            continue
        context = [
            ContextDoc(artifact.id, artifact.name, body),
            ContextDoc(other.id, other.name, other.body),
        ]
        try:
            answer = provider.complete(contradiction_instruction(), context)
        except ProviderUnavailable:
            emit(
                "warning",
                "contradiction-check",
                "Contradiction check skipped: provider unavailable.",
            )
            if on_event:
                on_event("contradiction check skipped: provider unavailable")
            break
        verdict = answer.strip().lower()
        if verdict.startswith("yes"):
            explanation = answer.split(":", 1)[1].strip() if ":" in answer else answer
            emit("contradiction", other.id, explanation)
            # mirrored finding so the other artifact's health view shows it
            _get_or_create_finding(
                project, other.id, "contradiction", artifact_id, explanation
            )

    if (len(project.findings), len(project.links)) != before:
        project.touch()
    return results


def resolve_finding(project: Project, finding_id: str, action: str) -> int:
    """Close a finding: resolve, dismiss, or promote an undefined term."""
    finding = project.findings.get(finding_id)
    if finding is None:
        raise UnknownFinding(f"no finding {finding_id!r}")
    if finding.state != "open":
        raise AlreadyClosed(f"finding {finding_id} is already {finding.state}")
    if action == "resolve":
        finding.state = "resolved"
    elif action == "dismiss":
        finding.state = "dismissed"
    elif action == "promote-term":
        if finding.kind != "undefined-concept":
            raise InvalidAction("promote-term only applies to undefined-concept findings")
        add_concept(
            project,
            finding.subject,
            definition="",
            origin="extracted",
            flag_note="Definition needed",
        )
        finding.state = "resolved"
    else:
        raise InvalidAction(f"unknown action {action!r}")
    return project.touch()


def flag_artifact(project: Project, artifact_id: str, note: str | None) -> int:
    """Set or clear the reviewer flag on an artifact."""
    artifact = project.require_artifact(artifact_id)
    artifact.flagged = note if note else None
    return project.touch()
