"""Documentation generation: cluster a layer, generate the next one up.

The pipeline groups related artifacts by embedding similarity
(average-linkage agglomerative clustering with deterministic tie-breaking),
then asks the generation provider to write one higher-level artifact per
cluster, linking every member to it. Running Code -> Functional Requirement
and then Functional Requirement -> Feature produces the three-level tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyProject, EmptySource, InvalidParams, UnknownType, WrongType
from .model import Artifact, Project, ProjectSummary, TraceLink
from .providers import (
    ContextDoc,
    GenerationProvider,
    data_flow_instruction,
    generate_instruction,
    overview_instruction,
    summarize_file_instruction,
)
from .similarity import EmbeddingProvider, HashEmbeddingProvider, build_index

DEFAULT_TAU = 0.25
MAX_CLUSTER_SIZE = 20
CENTROID_TERMS = 5


@dataclass
class Cluster:
    """A disjoint group of same-type artifacts with a derived label."""

    member_ids: list[str]
    centroid_terms: list[str] = field(default_factory=list)
    label: str = ""

    def to_dict(self) -> dict:
        return {
            "memberIds": list(self.member_ids),
            "centroidTerms": list(self.centroid_terms),
            "label": self.label,
        }


def cluster_artifacts(
    project: Project,
    artifact_type: str,
    tau: float = DEFAULT_TAU,
    embedder: EmbeddingProvider | None = None,
) -> list[Cluster]:
    """Average-linkage agglomerative clustering over embedding cosines.

    Merging is greedy: highest inter-cluster average similarity first, ties
    broken by the lexicographically smallest pair of cluster representatives
    (each cluster's smallest member id). Merging stops when the best
    candidate falls below ``tau``; merges that would exceed the size cap are
    refused. Result clusters are ordered by representative id.
    """
    if not 0.0 < tau < 1.0:
        raise InvalidParams(f"tau {tau} outside (0, 1)")
    members = sorted(
        (a for a in project.artifacts.values() if a.type == artifact_type),
        key=lambda a: a.id,
    )
    if not members:
        raise UnknownType(f"no artifacts of type {artifact_type!r}")
    embedder = embedder or HashEmbeddingProvider()
    vectors = embedder.embed([a.scoring_text() for a in members])
    sim = vectors @ vectors.T

    clusters: list[list[int]] = [[i] for i in range(len(members))]

    def rep(cluster: list[int]) -> str:
        return members[min(cluster)].id

    def average_similarity(a: list[int], b: list[int]) -> float:
        total = 0.0
        for i in a:
            for j in b:
                total += sim[i, j]
        return total / (len(a) * len(b))

    while len(clusters) > 1:
        best = None  # (similarity, pair_key, index_a, index_b)
        for ai in range(len(clusters)):
            for bi in range(ai + 1, len(clusters)):
                if len(clusters[ai]) + len(clusters[bi]) > MAX_CLUSTER_SIZE:
                    continue
                value = average_similarity(clusters[ai], clusters[bi])
                key = tuple(sorted((rep(clusters[ai]), rep(clusters[bi]))))
                if best is None or value > best[0] or (value == best[0] and key < best[1]):
                    best = (value, key, ai, bi)
        if best is None or best[0] < tau:
            break
        _, _, ai, bi = best
        merged = sorted(clusters[ai] + clusters[bi])
        clusters = [c for k, c in enumerate(clusters) if k not in (ai, bi)]
        clusters.append(merged)

    clusters.sort(key=rep)
    index = build_index((a.id, a.scoring_text()) for a in members)
    result = []
    for cluster in clusters:
        ids = [members[i].id for i in cluster]
        centroid: dict[str, float] = {}
        for aid in ids:
            for term, weight in index.vectors[aid].items():
                centroid[term] = centroid.get(term, 0.0) + weight
        terms = [
            t for t, _ in sorted(centroid.items(), key=lambda kv: (-kv[1], kv[0]))
        ][:CENTROID_TERMS]
        result.append(
            Cluster(member_ids=ids, centroid_terms=terms, label=", ".join(terms[:3]))
        )
    return result


def generate_layer(
    project: Project,
    source_type: str,
    target_type: str,
    provider: GenerationProvider,
    tau: float = DEFAULT_TAU,
    embedder: EmbeddingProvider | None = None,
) -> tuple[list[Artifact], list[TraceLink]]:
    """Generate one target-type artifact per cluster of source-type artifacts.

    Every cluster member is linked to its generated artifact (approved,
    created by the generator). All provider completions are gathered before
    any mutation, so a provider failure leaves the project untouched.
    """
    if not any(a.type == source_type for a in project.artifacts.values()):
        raise EmptySource(f"no artifacts of type {source_type!r} to generate from")
    clusters = cluster_artifacts(project, source_type, tau=tau, embedder=embedder)

    bodies: list[str] = []
    for cluster in clusters:
        context = []
        for aid in cluster.member_ids:
            artifact = project.artifacts[aid]
            context.append(
                ContextDoc(artifact.id, artifact.name, artifact.summary or artifact.body)
            )
        bodies.append(provider.complete(generate_instruction(target_type), context))

    new_artifacts: list[Artifact] = []
    new_links: list[TraceLink] = []
    for cluster, body in zip(clusters, bodies):
        artifact = Artifact(
            id=project.next_artifact_id(target_type),
            type=target_type,
            name=cluster.label or cluster.member_ids[0],
            body=body,
            provenance="generated",
        )
        project.upsert_artifact(artifact, create=True)
        new_artifacts.append(artifact)
        for member_id in cluster.member_ids:
            project.add_link(
                member_id, artifact.id, status="approved", created_by="docgen"
            )
            new_links.append(project.links[(member_id, artifact.id)])
    return new_artifacts, new_links


def summarize_file(artifact: Artifact, provider: GenerationProvider) -> str:
    """Store a one-line summary on a Code artifact."""
    if artifact.type != "Code":
        raise WrongType(f"artifact {artifact.id!r} is {artifact.type!r}, not Code")
    context = [ContextDoc(artifact.id, artifact.name, artifact.body)]
    summary = provider.complete(summarize_file_instruction(), context)
    artifact.summary = summary
    return summary


def generate_project_summary(
    project: Project,
    provider: GenerationProvider,
    tau: float = DEFAULT_TAU,
    embedder: EmbeddingProvider | None = None,
) -> ProjectSummary:
    """Build and persist the five-section project summary."""
    if not project.artifacts:
        raise EmptyProject("cannot summarize an empty project")

    tim = project.compute_tim()
    type_context = [
        ContextDoc(name, name, str(count)) for name, count in tim.types.items()
    ]
    overview = provider.complete(overview_instruction(), type_context)

    subsystems: list[dict] = []
    if any(a.type == "Code" for a in project.artifacts.values()):
        for cluster in cluster_artifacts(project, "Code", tau=tau, embedder=embedder):
            subsystems.append(
                {
                    "name": cluster.label,
                    "description": f"{len(cluster.member_ids)} code artifact(s) sharing: "
                    + ", ".join(cluster.centroid_terms),
                }
            )

    index = build_index(
        (a.id, a.scoring_text()) for a in project.artifacts.values()
    )
    totals: dict[str, float] = {}
    for vector in index.vectors.values():
        for term, weight in vector.items():
            totals[term] = totals.get(term, 0.0) + weight
    entities = [
        term
        for term, _ in sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
        if len(term) >= 3 and not term.isdigit()
    ][:10]

    features = sorted(
        a.name for a in project.artifacts.values() if a.type == "Feature"
    )

    if tim.relations:
        flow_context = [
            ContextDoc(f"{c}->{p}", f"{c} -> {p}", str(n)) for c, p, n in tim.relations
        ]
    else:
        flow_context = []
    data_flow = provider.complete(data_flow_instruction(), flow_context)

    summary = ProjectSummary(
        overview=overview,
        subsystems=subsystems,
        entities=entities,
        features=features,
        data_flow=data_flow,
    )
    project.summary = summary
    project.touch()
    return summary
