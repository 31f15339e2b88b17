"""In-memory project graph: artifacts, trace links, concepts, findings.

Links are stored child -> parent (a code file is a child of the requirement
it implements) and the graph over non-rejected links is kept acyclic at all
times. Every mutation bumps the project revision counter. The canonical
JSON document produced by ``Project.to_dict`` is the persistence format.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .errors import (
    CycleDetected,
    DuplicateId,
    DuplicateLink,
    EmptyField,
    InvalidParams,
    SelfLink,
    UnknownId,
)

SCHEMA_VERSION = 1

PROVENANCES = ("imported", "generated", "manual")
LINK_STATUSES = ("manual", "pending", "approved", "rejected")
LINK_CREATORS = ("user", "trace-engine", "docgen", "vocab-health")
# Statuses that participate in the DAG, the TIM and views.
ACTIVE_STATUSES = frozenset({"manual", "pending", "approved"})
FINDING_KINDS = (
    "cited-concept",
    "predicted-concept",
    "undefined-concept",
    "contradiction",
    "ambiguity",
    "warning",
)
FINDING_STATES = ("open", "resolved", "dismissed")
CONCEPT_ORIGINS = ("manual", "extracted")

CODE_TYPE = "Code"
CONCEPT_TYPE = "Concept"


@dataclass
class Artifact:
    """One node of project knowledge: a code file, requirement, feature, ..."""

    id: str
    type: str
    name: str
    body: str = ""
    summary: str | None = None
    provenance: str = "manual"
    flagged: str | None = None
    attributes: dict[str, str] = field(default_factory=dict)

    def validate(self) -> None:
        for label, value in (("id", self.id), ("type", self.type), ("name", self.name)):
            if not value:
                raise EmptyField(f"artifact {label} must be non-empty")
        if self.provenance not in PROVENANCES:
            raise InvalidParams(f"unknown provenance {self.provenance!r}")

    def scoring_text(self) -> str:
        """Concatenated name + summary + body used for similarity scoring."""
        parts = [self.name]
        if self.summary:
            parts.append(self.summary)
        if self.body:
            parts.append(self.body)
        return "\n".join(parts)

    def to_dict(self) -> dict:
        doc: dict = {"id": self.id, "type": self.type, "name": self.name, "body": self.body}
        if self.summary is not None:
            doc["summary"] = self.summary
        doc["provenance"] = self.provenance
        if self.flagged is not None:
            doc["flagged"] = self.flagged
        doc["attributes"] = dict(self.attributes)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Artifact":
        return cls(
            id=doc["id"],
            type=doc["type"],
            name=doc["name"],
            body=doc.get("body", ""),
            summary=doc.get("summary"),
            provenance=doc.get("provenance", "manual"),
            flagged=doc.get("flagged"),
            attributes=dict(doc.get("attributes", {})),
        )


@dataclass
class TraceLink:
    """Directed child -> parent relation with a review lifecycle."""

    child_id: str
    parent_id: str
    score: float | None = None
    explanation: str | None = None
    status: str = "manual"
    created_by: str = "user"
    reviewed_by: str | None = None
    reviewed_at: str | None = None

    def validate(self) -> None:
        if self.status not in LINK_STATUSES:
            raise InvalidParams(f"unknown link status {self.status!r}")
        if self.created_by not in LINK_CREATORS:
            raise InvalidParams(f"unknown link creator {self.created_by!r}")
        if self.status == "manual" and self.created_by != "user":
            raise InvalidParams("manual links must be created by a user")
        if self.status == "pending" and self.score is None:
            raise InvalidParams("pending links must carry a score")
        if self.score is not None and not 0.0 <= self.score <= 1.0:
            raise InvalidParams(f"link score {self.score} outside [0, 1]")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.child_id, self.parent_id)

    def to_dict(self) -> dict:
        doc: dict = {"childId": self.child_id, "parentId": self.parent_id}
        if self.score is not None:
            doc["score"] = self.score
        if self.explanation is not None:
            doc["explanation"] = self.explanation
        doc["status"] = self.status
        doc["createdBy"] = self.created_by
        if self.reviewed_by is not None:
            doc["reviewedBy"] = self.reviewed_by
        if self.reviewed_at is not None:
            doc["reviewedAt"] = self.reviewed_at
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "TraceLink":
        return cls(
            child_id=doc["childId"],
            parent_id=doc["parentId"],
            score=doc.get("score"),
            explanation=doc.get("explanation"),
            status=doc.get("status", "manual"),
            created_by=doc.get("createdBy", "user"),
            reviewed_by=doc.get("reviewedBy"),
            reviewed_at=doc.get("reviewedAt"),
        )


@dataclass
class Concept:
    """Vocabulary term; also represented as an artifact of type Concept."""

    term: str
    definition: str = ""
    origin: str = "manual"
    artifact_id: str = ""

    def to_dict(self) -> dict:
        return {
            "term": self.term,
            "definition": self.definition,
            "origin": self.origin,
            "artifactId": self.artifact_id,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Concept":
        return cls(
            term=doc["term"],
            definition=doc.get("definition", ""),
            origin=doc.get("origin", "manual"),
            artifact_id=doc.get("artifactId", ""),
        )


@dataclass
class HealthFinding:
    """One health-check result, keyed by (artifactId, kind, subject)."""

    id: str
    artifact_id: str
    kind: str
    subject: str
    explanation: str = ""
    state: str = "open"

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.artifact_id, self.kind, self.subject)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "artifactId": self.artifact_id,
            "kind": self.kind,
            "subject": self.subject,
            "explanation": self.explanation,
            "state": self.state,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "HealthFinding":
        return cls(
            id=doc["id"],
            artifact_id=doc["artifactId"],
            kind=doc["kind"],
            subject=doc["subject"],
            explanation=doc.get("explanation", ""),
            state=doc.get("state", "open"),
        )


@dataclass
class ProjectSummary:
    """Generated project summary; all five sections always present."""

    overview: str = ""
    subsystems: list[dict] = field(default_factory=list)  # {"name", "description"}
    entities: list[str] = field(default_factory=list)
    features: list[str] = field(default_factory=list)
    data_flow: str = ""

    def to_dict(self) -> dict:
        return {
            "overview": self.overview,
            "subsystems": [dict(s) for s in self.subsystems],
            "entities": list(self.entities),
            "features": list(self.features),
            "dataFlow": self.data_flow,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ProjectSummary":
        return cls(
            overview=doc.get("overview", ""),
            subsystems=[dict(s) for s in doc.get("subsystems", [])],
            entities=list(doc.get("entities", [])),
            features=list(doc.get("features", [])),
            data_flow=doc.get("dataFlow", ""),
        )


@dataclass
class Tim:
    """Traceability Information Model: the type-level schema of a project."""

    types: dict[str, int]
    relations: list[tuple[str, str, int]]  # (childType, parentType, linkCount)

    def to_dict(self) -> dict:
        return {
            "types": dict(self.types),
            "relations": [
                {"childType": c, "parentType": p, "linkCount": n}
                for c, p, n in self.relations
            ],
        }


@dataclass
class ViewSpec:
    """Focused subgraph centered on one artifact with bounded depths."""

    root_id: str
    ancestors: list[str]
    descendants: list[str]
    included_links: list[tuple[str, str]]

    def node_ids(self) -> set[str]:
        return {self.root_id, *self.ancestors, *self.descendants}

    def to_dict(self) -> dict:
        return {
            "rootId": self.root_id,
            "ancestors": list(self.ancestors),
            "descendants": list(self.descendants),
            "includedLinks": [
                {"childId": c, "parentId": p} for c, p in self.included_links
            ],
        }


def _type_prefix(artifact_type: str) -> str:
    initials = "".join(word[0] for word in artifact_type.split() if word)
    return initials.upper() or "A"


class Project:
    """A project graph plus the operations that keep it consistent.

    Instances are not thread-safe; callers serialize mutations (the store
    keeps one writer per project).
    """

    def __init__(self, id: str, name: str):
        if not id or not name:
            raise EmptyField("project id and name must be non-empty")
        self.id = id
        self.name = name
        self.artifacts: dict[str, Artifact] = {}
        self.links: dict[tuple[str, str], TraceLink] = {}
        self.concepts: dict[str, Concept] = {}  # keyed by casefolded term
        self.findings: dict[str, HealthFinding] = {}
        self.revision = 0
        self.summary: ProjectSummary | None = None

    # -- bookkeeping --------------------------------------------------------

    def touch(self) -> int:
        """Bump and return the revision counter (one bump per mutation)."""
        self.revision += 1
        return self.revision

    def require_artifact(self, artifact_id: str) -> Artifact:
        try:
            return self.artifacts[artifact_id]
        except KeyError:
            raise UnknownId(f"no artifact {artifact_id!r}") from None

    def next_artifact_id(self, artifact_type: str) -> str:
        """Smallest unused '<TYPE-PREFIX><n>' id for generated artifacts."""
        prefix = _type_prefix(artifact_type)
        n = 1
        while f"{prefix}{n}" in self.artifacts:
            n += 1
        return f"{prefix}{n}"

    def next_finding_id(self) -> str:
        n = 1
        while f"HF{n}" in self.findings:
            n += 1
        return f"HF{n}"

    # -- artifact operations -------------------------------------------------

    def upsert_artifact(self, artifact: Artifact, *, create: bool = False) -> int:
        artifact.validate()
        if create and artifact.id in self.artifacts:
            raise DuplicateId(f"artifact {artifact.id!r} already exists")
        self.artifacts[artifact.id] = artifact
        return self.touch()

    def delete_artifact(self, artifact_id: str) -> int:
        self.require_artifact(artifact_id)
        del self.artifacts[artifact_id]
        for pair in [p for p in self.links if artifact_id in p]:
            del self.links[pair]
        removed_terms = [
            key for key, c in self.concepts.items() if c.artifact_id == artifact_id
        ]
        for key in removed_terms:
            del self.concepts[key]
        for fid in [
            f.id
            for f in self.findings.values()
            if f.artifact_id == artifact_id
            or (f.kind == "contradiction" and f.subject == artifact_id)
            or (
                f.kind in ("cited-concept", "predicted-concept")
                and f.subject.casefold() in removed_terms
            )
        ]:
            del self.findings[fid]
        return self.touch()

    # -- link operations ------------------------------------------------------

    def add_link(
        self,
        child_id: str,
        parent_id: str,
        status: str = "manual",
        score: float | None = None,
        *,
        created_by: str = "user",
        explanation: str | None = None,
    ) -> int:
        if child_id == parent_id:
            raise SelfLink(f"artifact {child_id!r} cannot link to itself")
        self.require_artifact(child_id)
        self.require_artifact(parent_id)
        pair = (child_id, parent_id)
        if pair in self.links:
            raise DuplicateLink(f"link {child_id!r} -> {parent_id!r} already exists")
        link = TraceLink(
            child_id=child_id,
            parent_id=parent_id,
            score=score,
            explanation=explanation,
            status=status,
            created_by=created_by,
        )
        link.validate()
        if status in ACTIVE_STATUSES and self._would_cycle(child_id, parent_id):
            raise CycleDetected(f"link {child_id!r} -> {parent_id!r} would create a cycle")
        self.links[pair] = link
        self.touch()
        return self.revision

    def remove_link(self, child_id: str, parent_id: str) -> int:
        pair = (child_id, parent_id)
        if pair not in self.links:
            raise UnknownId(f"no link {child_id!r} -> {parent_id!r}")
        del self.links[pair]
        return self.touch()

    def get_link(self, child_id: str, parent_id: str) -> TraceLink | None:
        return self.links.get((child_id, parent_id))

    def _would_cycle(self, child_id: str, parent_id: str) -> bool:
        # Adding child -> parent cycles iff child is already an ancestor of
        # parent along active links.
        adjacency: dict[str, list[str]] = {}
        for link in self.active_links():
            adjacency.setdefault(link.child_id, []).append(link.parent_id)
        stack = [parent_id]
        seen: set[str] = set()
        while stack:
            node = stack.pop()
            if node == child_id:
                return True
            if node in seen:
                continue
            seen.add(node)
            stack.extend(adjacency.get(node, []))
        return False

    def active_links(self) -> list[TraceLink]:
        return [l for l in self.links.values() if l.status in ACTIVE_STATUSES]

    # -- derived structures ---------------------------------------------------

    def compute_tim(self) -> Tim:
        """Recount artifact types and typed link relations (rejected excluded)."""
        types: dict[str, int] = {}
        for artifact in self.artifacts.values():
            types[artifact.type] = types.get(artifact.type, 0) + 1
        relation_counts: dict[tuple[str, str], int] = {}
        for link in self.links.values():
            if link.status == "rejected":
                continue
            key = (self.artifacts[link.child_id].type, self.artifacts[link.parent_id].type)
            relation_counts[key] = relation_counts.get(key, 0) + 1
        return Tim(
            types=dict(sorted(types.items())),
            relations=[
                (c, p, n) for (c, p), n in sorted(relation_counts.items())
            ],
        )

    def focused_view(self, root_id: str, up_depth: int, down_depth: int) -> ViewSpec:
        """Bounded BFS in both directions; level order, ties by ascending id."""
        self.require_artifact(root_id)
        if up_depth < 0 or down_depth < 0:
            raise InvalidParams("view depths must be >= 0")
        parents_of: dict[str, list[str]] = {}
        children_of: dict[str, list[str]] = {}
        for link in self.active_links():
            parents_of.setdefault(link.child_id, []).append(link.parent_id)
            children_of.setdefault(link.parent_id, []).append(link.child_id)

        def sweep(adjacency: dict[str, list[str]], depth: int) -> list[str]:
            ordered: list[str] = []
            seen = {root_id}
            frontier = [root_id]
            for _ in range(depth):
                nxt = sorted(
                    {n for node in frontier for n in adjacency.get(node, [])} - seen
                )
                if not nxt:
                    break
                ordered.extend(nxt)
                seen.update(nxt)
                frontier = nxt
            return ordered

        ancestors = sweep(parents_of, up_depth)
        descendants = sweep(children_of, down_depth)
        nodes = {root_id, *ancestors, *descendants}
        included = sorted(
            link.pair
            for link in self.active_links()
            if link.child_id in nodes and link.parent_id in nodes
        )
        return ViewSpec(
            root_id=root_id,
            ancestors=ancestors,
            descendants=descendants,
            included_links=included,
        )

    # -- integrity -------------------------------------------------------------

    def integrity_errors(self) -> list[str]:
        """Full-graph consistency check; empty list means healthy."""
        problems: list[str] = []
        for aid, artifact in self.artifacts.items():
            if aid != artifact.id:
                problems.append(f"artifact keyed {aid!r} carries id {artifact.id!r}")
            if not artifact.id or not artifact.type or not artifact.name:
                problems.append(f"artifact {aid!r} has an empty required field")
        for pair, link in self.links.items():
            if pair != link.pair:
                problems.append(f"link keyed {pair!r} carries pair {link.pair!r}")
            for endpoint in pair:
                if endpoint not in self.artifacts:
                    problems.append(f"link {pair!r} references missing {endpoint!r}")
            if link.child_id == link.parent_id:
                problems.append(f"self link {pair!r}")
        for key, concept in self.concepts.items():
            if key != concept.term.casefold():
                problems.append(f"concept keyed {key!r} carries term {concept.term!r}")
            if concept.artifact_id and concept.artifact_id not in self.artifacts:
                problems.append(
                    f"concept {concept.term!r} references missing {concept.artifact_id!r}"
                )
        for finding in self.findings.values():
            if finding.artifact_id not in self.artifacts:
                problems.append(
                    f"finding {finding.id} references missing {finding.artifact_id!r}"
                )
            if finding.kind == "contradiction" and finding.subject not in self.artifacts:
                problems.append(
                    f"contradiction finding {finding.id} references missing "
                    f"{finding.subject!r}"
                )
        if self._has_cycle():
            problems.append("active link graph contains a cycle")
        return problems

    def _has_cycle(self) -> bool:
        adjacency: dict[str, list[str]] = {}
        indegree: dict[str, int] = {}
        for link in self.active_links():
            adjacency.setdefault(link.child_id, []).append(link.parent_id)
            indegree[link.parent_id] = indegree.get(link.parent_id, 0) + 1
            indegree.setdefault(link.child_id, 0)
        queue = [n for n, d in indegree.items() if d == 0]
        visited = 0
        while queue:
            node = queue.pop()
            visited += 1
            for nxt in adjacency.get(node, []):
                indegree[nxt] -= 1
                if indegree[nxt] == 0:
                    queue.append(nxt)
        return visited != len(indegree)

    # -- persistence -------------------------------------------------------------

    def to_dict(self) -> dict:
        header: dict = {"id": self.id, "name": self.name, "revision": self.revision}
        if self.summary is not None:
            header["summary"] = self.summary.to_dict()
        return {
            "schema_version": SCHEMA_VERSION,
            "project": header,
            "artifacts": [a.to_dict() for a in self.artifacts.values()],
            "links": [l.to_dict() for l in self.links.values()],
            "concepts": [c.to_dict() for c in self.concepts.values()],
            "findings": [f.to_dict() for f in self.findings.values()],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Project":
        header = doc["project"]
        project = cls(id=header["id"], name=header["name"])
        for adoc in doc.get("artifacts", []):
            artifact = Artifact.from_dict(adoc)
            artifact.validate()
            project.artifacts[artifact.id] = artifact
        for ldoc in doc.get("links", []):
            link = TraceLink.from_dict(ldoc)
            link.validate()
            project.links[link.pair] = link
        for cdoc in doc.get("concepts", []):
            concept = Concept.from_dict(cdoc)
            project.concepts[concept.term.casefold()] = concept
        for fdoc in doc.get("findings", []):
            finding = HealthFinding.from_dict(fdoc)
            project.findings[finding.id] = finding
        if "summary" in header:
            project.summary = ProjectSummary.from_dict(header["summary"])
        project.revision = header.get("revision", 0)
        return project

    def clone(self) -> "Project":
        return copy.deepcopy(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Project):
            return NotImplemented
        return self.to_dict() == other.to_dict()
