"""Trace-link prediction, explanation, and the review lifecycle.

Candidates are scored by cosine over a TF-IDF index of the involved
artifacts (name + summary + body). Predicted links enter the project as
``pending`` and wait for review; rejected pairs are never re-proposed.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Callable

from .errors import CycleDetected, InvalidAction, InvalidParams, NotPending, UnknownLink
from .model import Project, TraceLink
from .providers import ContextDoc, GenerationProvider, explain_instruction
from .similarity import build_index, cosine

DEFAULT_THRESHOLD = 0.30
DEFAULT_MAX_PER_CHILD = 3


@dataclass
class PredictionRequest:
    """Which child/parent layers to score, with engine thresholds."""

    child_types: frozenset[str]
    parent_types: frozenset[str]
    threshold: float = DEFAULT_THRESHOLD
    max_per_child: int = DEFAULT_MAX_PER_CHILD

    def __post_init__(self):
        self.child_types = frozenset(self.child_types)
        self.parent_types = frozenset(self.parent_types)
        if not 0.0 <= self.threshold <= 1.0:
            raise InvalidParams(f"threshold {self.threshold} outside [0, 1]")
        if self.max_per_child < 1:
            raise InvalidParams("maxPerChild must be positive")


def predict_links(
    project: Project,
    request: PredictionRequest,
    on_event: Callable[[str], None] | None = None,
) -> list[TraceLink]:
    """Predict pending links from child-type artifacts to parent-type ones.

    For each child (ascending id) parents are ranked by cosine (ties by
    parent id); scores below the threshold are discarded, the rest capped
    at maxPerChild. Pairs with any existing link are skipped; candidates
    that would close a cycle are dropped and reported via ``on_event``.
    """
    children = sorted(
        (a for a in project.artifacts.values() if a.type in request.child_types),
        key=lambda a: a.id,
    )
    parents = sorted(
        (a for a in project.artifacts.values() if a.type in request.parent_types),
        key=lambda a: a.id,
    )
    if not children or not parents:
        return []

    corpus: dict[str, str] = {}
    for artifact in children + parents:
        corpus[artifact.id] = artifact.scoring_text()
    index = build_index(sorted(corpus.items()))

    created: list[TraceLink] = []
    dropped_cycles = 0
    for child in children:
        child_vec = index.vectors[child.id]
        ranked = sorted(
            (
                (cosine(child_vec, index.vectors[parent.id]), parent.id)
                for parent in parents
                if parent.id != child.id
            ),
            key=lambda row: (-row[0], row[1]),
        )
        kept = [
            (score, pid)
            for score, pid in ranked
            if score >= request.threshold and (child.id, pid) not in project.links
        ][: request.max_per_child]
        for score, parent_id in kept:
            try:
                project.add_link(
                    child.id,
                    parent_id,
                    status="pending",
                    score=score,
                    created_by="trace-engine",
                )
            except CycleDetected:
                dropped_cycles += 1
                continue
            created.append(project.links[(child.id, parent_id)])
    if dropped_cycles and on_event:
        on_event(f"dropped {dropped_cycles} cycle-inducing candidate(s)")
    return created


def explain_link(
    project: Project,
    child_id: str,
    parent_id: str,
    provider: GenerationProvider,
) -> str:
    """Attach a provider-written explanation to an existing link."""
    link = project.get_link(child_id, parent_id)
    if link is None:
        raise UnknownLink(f"no link {child_id!r} -> {parent_id!r}")
    child = project.require_artifact(child_id)
    parent = project.require_artifact(parent_id)
    context = [
        ContextDoc(child.id, child.name, child.scoring_text()),
        ContextDoc(parent.id, parent.name, parent.scoring_text()),
    ]
    # ProviderUnavailable propagates; the link keeps its score, no explanation.
    text = provider.complete(explain_instruction(), context)
    link.explanation = text
    project.touch()
    return text


def review_link(
    project: Project,
    child_id: str,
    parent_id: str,
    decision: str,
    reviewer: str = "",
) -> int:
    """Approve or reject a pending link; the decision is terminal."""
    link = project.get_link(child_id, parent_id)
    if link is None:
        raise UnknownLink(f"no link {child_id!r} -> {parent_id!r}")
    if link.status != "pending":
        raise NotPending(f"link {child_id!r} -> {parent_id!r} is {link.status}, not pending")
    if decision not in ("approve", "reject"):
        raise InvalidAction(f"unknown review decision {decision!r}")
    link.status = "approved" if decision == "approve" else "rejected"
    link.reviewed_by = reviewer or "anonymous"
    link.reviewed_at = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return project.touch()
