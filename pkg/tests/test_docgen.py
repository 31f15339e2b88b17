"""Clustering, layer generation, file and project summaries."""

from __future__ import annotations

import pytest

from rootwb.docgen import (
    cluster_artifacts,
    generate_layer,
    generate_project_summary,
    summarize_file,
)
from rootwb.errors import (
    EmptyProject,
    EmptySource,
    InvalidParams,
    ProviderUnavailable,
    UnknownType,
    WrongType,
)
from rootwb.model import Artifact, Project
from rootwb.providers import FailingProvider, MockProvider
from rootwb.similarity import hash_embed

BRAKE_CONTROLLER = "brake controller pressure valve control"
BRAKE_SENSOR = "brake sensor pressure reading monitor"
CAMERA_DRIVER = "camera driver image capture"


def three_code_project() -> Project:
    project = Project(id="P1", name="p")
    for aid, body in (
        ("brake_controller.py", BRAKE_CONTROLLER),
        ("brake_sensor.py", BRAKE_SENSOR),
        ("camera_driver.py", CAMERA_DRIVER),
    ):
        project.upsert_artifact(Artifact(id=aid, type="Code", name=aid, body=body))
    return project


def pairwise_oracle(project: Project) -> dict[tuple[str, str], float]:
    """Independent pairwise cosines over the embedding vectors."""
    members = sorted(
        (a for a in project.artifacts.values() if a.type == "Code"), key=lambda a: a.id
    )
    vecs = hash_embed([a.scoring_text() for a in members])
    sims = {}
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            sims[(members[i].id, members[j].id)] = float(vecs[i] @ vecs[j])
    return sims


class TestClusterArtifacts:
    def test_single_artifact_singleton(self):
        project = Project(id="P1", name="p")
        project.upsert_artifact(Artifact(id="C1", type="Code", name="C1", body="brake"))
        clusters = cluster_artifacts(project, "Code")
        assert len(clusters) == 1
        assert clusters[0].member_ids == ["C1"]

    def test_identical_bodies_merge(self):
        project = Project(id="P1", name="p")
        for aid in ("a.py", "b.py"):
            project.upsert_artifact(
                Artifact(id=aid, type="Code", name="same", body="brake valve control")
            )
        clusters = cluster_artifacts(project, "Code", tau=0.25)
        assert len(clusters) == 1
        assert clusters[0].member_ids == ["a.py", "b.py"]

    def test_brake_pair_merges_camera_stays(self):
        # tau chosen strictly between the oracle similarities of the brake
        # pair and any brake/camera pair
        project = three_code_project()
        sims = pairwise_oracle(project)
        brake_sim = sims[("brake_controller.py", "brake_sensor.py")]
        cross = max(
            sims[("brake_controller.py", "camera_driver.py")],
            sims[("brake_sensor.py", "camera_driver.py")],
        )
        assert cross < brake_sim
        tau = (cross + brake_sim) / 2
        clusters = cluster_artifacts(project, "Code", tau=tau)
        memberships = [c.member_ids for c in clusters]
        assert ["brake_controller.py", "brake_sensor.py"] in memberships
        assert ["camera_driver.py"] in memberships

    def test_partition_properties(self):
        project = three_code_project()
        clusters = cluster_artifacts(project, "Code", tau=0.2)
        seen: list[str] = []
        for cluster in clusters:
            seen.extend(cluster.member_ids)
        assert sorted(seen) == sorted(
            a.id for a in project.artifacts.values() if a.type == "Code"
        )

    def test_size_cap(self):
        project = Project(id="P1", name="p")
        for i in range(25):
            project.upsert_artifact(
                Artifact(id=f"c{i:02d}.py", type="Code", name="same",
                         body="brake valve control unit")
            )
        clusters = cluster_artifacts(project, "Code", tau=0.25)
        assert all(len(c.member_ids) <= 20 for c in clusters)
        assert sum(len(c.member_ids) for c in clusters) == 25

    def test_unknown_type(self):
        with pytest.raises(UnknownType):
            cluster_artifacts(three_code_project(), "Nope")

    def test_bad_tau(self):
        with pytest.raises(InvalidParams):
            cluster_artifacts(three_code_project(), "Code", tau=1.5)

    def test_deterministic(self):
        a = cluster_artifacts(three_code_project(), "Code", tau=0.2)
        b = cluster_artifacts(three_code_project(), "Code", tau=0.2)
        assert [c.to_dict() for c in a] == [c.to_dict() for c in b]


class TestGenerateLayer:
    def test_two_clusters_make_two_requirements(self):
        project = three_code_project()
        sims = pairwise_oracle(project)
        tau = (
            max(
                sims[("brake_controller.py", "camera_driver.py")],
                sims[("brake_sensor.py", "camera_driver.py")],
            )
            + sims[("brake_controller.py", "brake_sensor.py")]
        ) / 2
        artifacts, links = generate_layer(
            project, "Code", "Functional Requirement", MockProvider(), tau=tau
        )
        assert [a.id for a in artifacts] == ["FR1", "FR2"]
        assert len(links) == 3
        brake_fr = project.artifacts["FR1"]
        assert brake_fr.body == (
            "Functional Requirement covering: brake_controller.py, brake_sensor.py"
        )
        assert brake_fr.provenance == "generated"
        assert all(l.status == "approved" and l.created_by == "docgen" for l in links)

    def test_feature_layer_on_requirements(self):
        project = three_code_project()
        generate_layer(project, "Code", "Functional Requirement", MockProvider(), tau=0.2)
        artifacts, links = generate_layer(
            project, "Functional Requirement", "Feature", MockProvider(), tau=0.01
        )
        assert artifacts and artifacts[0].id == "F1"
        fr_count = sum(1 for a in project.artifacts.values()
                       if a.type == "Functional Requirement")
        assert len(links) == fr_count

    def test_empty_source(self):
        with pytest.raises(EmptySource):
            generate_layer(Project(id="P1", name="p"), "Code", "Feature", MockProvider())

    def test_provider_failure_leaves_project_untouched(self):
        project = three_code_project()
        before = project.to_dict()
        with pytest.raises(ProviderUnavailable):
            generate_layer(project, "Code", "Feature", FailingProvider())
        assert project.to_dict() == before

    def test_no_generated_artifact_is_orphaned(self):
        project = three_code_project()
        artifacts, _ = generate_layer(project, "Code", "Feature", MockProvider(), tau=0.2)
        for artifact in artifacts:
            incoming = [l for l in project.links.values() if l.parent_id == artifact.id]
            assert incoming

    def test_pipeline_reachability(self):
        # every Code artifact must reach at least one Feature transitively
        project = three_code_project()
        generate_layer(project, "Code", "Functional Requirement", MockProvider(), tau=0.2)
        generate_layer(project, "Functional Requirement", "Feature", MockProvider(), tau=0.2)
        features = {a.id for a in project.artifacts.values() if a.type == "Feature"}
        parents_of: dict[str, list[str]] = {}
        for link in project.active_links():
            parents_of.setdefault(link.child_id, []).append(link.parent_id)

        def reaches_feature(aid: str) -> bool:
            stack, seen = [aid], set()
            while stack:
                node = stack.pop()
                if node in features:
                    return True
                if node in seen:
                    continue
                seen.add(node)
                stack.extend(parents_of.get(node, []))
            return False

        for artifact in project.artifacts.values():
            if artifact.type == "Code":
                assert reaches_feature(artifact.id)


class TestSummarizeFile:
    def test_comment_line_wins(self):
        artifact = Artifact(id="d.c", type="Code", name="d.c",
                            body="// brake actuator driver\nint init(void) {}")
        assert summarize_file(artifact, MockProvider()) == "brake actuator driver"
        assert artifact.summary == "brake actuator driver"

    def test_comment_free_file_uses_top_terms(self):
        # single-doc tf-idf reduces to term frequency, ties alphabetical
        artifact = Artifact(id="x.py", type="Code", name="x.py",
                            body="brake brake valve valve valve control")
        summary = summarize_file(artifact, MockProvider())
        assert summary == "Code file x.py with terms: valve, brake, control"

    def test_wrong_type(self):
        artifact = Artifact(id="R1", type="Requirement", name="R1", body="text")
        with pytest.raises(WrongType):
            summarize_file(artifact, MockProvider())


class TestProjectSummary:
    def test_empty_project(self):
        with pytest.raises(EmptyProject):
            generate_project_summary(Project(id="P1", name="p"), MockProvider())

    def test_five_sections_present(self):
        project = three_code_project()
        summary = generate_project_summary(project, MockProvider())
        doc = summary.to_dict()
        assert set(doc) == {"overview", "subsystems", "entities", "features", "dataFlow"}
        assert doc["overview"].startswith("This project contains 3 artifacts")
        assert project.summary is not None

    def test_regeneration_is_identical(self):
        project = three_code_project()
        first = generate_project_summary(project, MockProvider()).to_dict()
        second = generate_project_summary(project, MockProvider()).to_dict()
        assert first == second

    def test_features_section_lists_feature_names(self):
        project = three_code_project()
        generate_layer(project, "Code", "Feature", MockProvider(), tau=0.2)
        summary = generate_project_summary(project, MockProvider())
        feature_names = sorted(
            a.name for a in project.artifacts.values() if a.type == "Feature"
        )
        assert summary.features == feature_names
        assert "Code" in summary.data_flow and "Feature" in summary.data_flow
