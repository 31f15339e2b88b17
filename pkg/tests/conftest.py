"""Shared fixtures: the requirements walkthrough project and random projects."""

from __future__ import annotations

import random

import pytest

from rootwb import vocab
from rootwb.model import Artifact, Project
from rootwb.providers import MockProvider

R1_BODY = (
    "The system shall be able to save some entities to the database, perform a "
    "job, and return the result of the job to the user in under 1 minute."
)
R2_BODY = "The system shall allow the user to schedule a job for later execution."
R3_BODY = "The system shall report job progress to the user while the job is running."
R4_BODY = (
    "Saving entities to the database shall take between 0.5 seconds to 5 seconds "
    "to complete."
)

JOB_DEFINITION = "A unit of asynchronous work executed by the system on behalf of a user."
DB_ENTITY_DEFINITION = (
    "A record that the system shall save to the database, such as user entities."
)
R1_R4_EXPLANATION = (
    "R1 requires the full round trip in under 1 minute while R4 allows saving "
    "alone to take up to 5 seconds."
)


def build_walkthrough_project() -> Project:
    """Four requirements plus the Job / Database Entity vocabulary."""
    project = Project(id="P1", name="walkthrough")
    for rid, body in (
        ("R1", R1_BODY),
        ("R2", R2_BODY),
        ("R3", R3_BODY),
        ("R4", R4_BODY),
    ):
        project.upsert_artifact(Artifact(id=rid, type="Requirement", name=rid, body=body))
    vocab.add_concept(project, "Job", JOB_DEFINITION)
    vocab.add_concept(project, "Database Entity", DB_ENTITY_DEFINITION)
    return project


def walkthrough_mock() -> MockProvider:
    return MockProvider(contradictions={frozenset(("R1", "R4")): R1_R4_EXPLANATION})


@pytest.fixture
def walkthrough_project() -> Project:
    return build_walkthrough_project()


@pytest.fixture
def mock_provider() -> MockProvider:
    return walkthrough_mock()


_WORDS = (
    "brake sensor camera driver engine control valve pressure signal motor "
    "battery telemetry schedule dispatch route planner vision lidar radar fusion "
    "steering throttle actuator diagnostics firmware gateway payload antenna"
).split()


def random_project(rng: random.Random, n_artifacts: int = 12) -> Project:
    """Random but always-valid project for round-trip and integrity tests."""
    project = Project(id=f"P{rng.randint(1, 99)}", name="generated")
    types = ("Code", "Requirement", "Feature")
    ids = []
    for i in range(n_artifacts):
        aid = f"A{i}"
        body = " ".join(rng.choices(_WORDS, k=rng.randint(3, 12)))
        artifact = Artifact(
            id=aid,
            type=rng.choice(types),
            name=f"artifact {i}",
            body=body,
            summary=rng.choice([None, "summary " + rng.choice(_WORDS)]),
            provenance=rng.choice(["imported", "manual"]),
            flagged=rng.choice([None, None, "check this"]),
            attributes={"k": rng.choice(_WORDS)} if rng.random() < 0.3 else {},
        )
        project.upsert_artifact(artifact)
        ids.append(aid)
    # forward-only links keep the graph acyclic by construction
    for _ in range(n_artifacts):
        child_pos = rng.randrange(0, n_artifacts - 1)
        parent_pos = rng.randrange(child_pos + 1, n_artifacts)
        child, parent = ids[child_pos], ids[parent_pos]
        if (child, parent) in project.links:
            continue
        status = rng.choice(["manual", "pending", "approved", "rejected"])
        project.add_link(
            child,
            parent,
            status=status,
            score=round(rng.random(), 3) if status != "manual" else None,
            created_by="user" if status == "manual" else "trace-engine",
        )
    if rng.random() < 0.7:
        vocab.add_concept(project, "telemetry", "Remote measurement data.")
    if rng.random() < 0.4:
        vocab.flag_artifact(project, ids[0], "needs review")
    return project
