"""Project store and workbench facade wiring providers to the job engine.

The store enforces the single-writer rule: one re-entrant lock per
project serializes mutations while reads proceed between them.
"""

from __future__ import annotations

import threading

from .errors import DuplicateId, UnknownProject
from .model import Project
from .providers import (
    GenerationProvider,
    embedding_provider_from_env,
    generation_provider_from_env,
)
from .similarity import EmbeddingProvider


class ProjectStore:
    """In-memory project registry with per-project write locks."""

    def __init__(self):
        self._projects: dict[str, Project] = {}
        self._locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()

    def create(self, name: str, project_id: str | None = None) -> Project:
        with self._registry_lock:
            if project_id is None:
                n = 1
                while f"P{n}" in self._projects:
                    n += 1
                project_id = f"P{n}"
            if project_id in self._projects:
                raise DuplicateId(f"project {project_id!r} already exists")
            project = Project(id=project_id, name=name)
            self._projects[project_id] = project
            self._locks[project_id] = threading.RLock()
            return project

    def add(self, project: Project) -> Project:
        with self._registry_lock:
            if project.id in self._projects:
                raise DuplicateId(f"project {project.id!r} already exists")
            self._projects[project.id] = project
            self._locks[project.id] = threading.RLock()
            return project

    def get(self, project_id: str) -> Project:
        try:
            return self._projects[project_id]
        except KeyError:
            raise UnknownProject(f"no project {project_id!r}") from None

    def list(self) -> list[Project]:
        return list(self._projects.values())

    def lock(self, project_id: str) -> threading.RLock:
        self.get(project_id)
        return self._locks[project_id]

    def replace(self, project_id: str, project: Project) -> None:
        with self.lock(project_id):
            self._projects[project_id] = project


class Engine:
    """Facade bundling the store, providers, and the job engine."""

    def __init__(
        self,
        generation: GenerationProvider | None = None,
        embedding: EmbeddingProvider | None = None,
        jobs_path=None,
        max_workers: int = 4,
    ):
        from .jobs import JobEngine
        from .providers import MockProvider
        from .similarity import HashEmbeddingProvider

        self.store = ProjectStore()
        self.generation = generation if generation is not None else MockProvider()
        self.embedding = embedding if embedding is not None else HashEmbeddingProvider()
        self.jobs = JobEngine(
            self.store, self.generation, self.embedding,
            jobs_path=jobs_path, max_workers=max_workers,
        )

    @classmethod
    def from_env(cls, env: dict | None = None, **kwargs) -> "Engine":
        return cls(
            generation=generation_provider_from_env(env),
            embedding=embedding_provider_from_env(env),
            **kwargs,
        )

    def shutdown(self) -> None:
        self.jobs.shutdown()
