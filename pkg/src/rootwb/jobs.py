"""Asynchronous job engine for long-running workbench operations.

Jobs run on a bounded worker pool against a deep copy of their project;
results are applied atomically at completion, so failed or cancelled jobs
leave the project exactly as it was. Every job keeps an append-only,
totally ordered event log that both pollers and push subscribers observe.
Terminal job state is persisted to a ``jobs.json`` sidecar when a path is
configured; jobs that were running at shutdown load back as failed.
"""

from __future__ import annotations

import json
import queue
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterator

from .errors import (
    AlreadyTerminal,
    InvalidParams,
    ProjectBusy,
    UnknownJob,
    WorkbenchError,
)
from .model import Project

JOB_KINDS = (
    "import",
    "summarize",
    "generate-layer",
    "predict-links",
    "health-sweep",
    "extract-concepts",
)
# Kinds that mutate the project and are therefore mutually exclusive per
# project. extract-concepts only reports candidates.
MUTATING_KINDS = frozenset(JOB_KINDS) - {"extract-concepts"}
TERMINAL_STATES = frozenset({"completed", "failed", "cancelled"})

JOBS_SCHEMA_VERSION = 1


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds")


class JobCancelled(Exception):
    """Raised inside a worker when cancellation is requested."""


@dataclass
class JobEvent:
    timestamp: str
    level: str
    message: str

    def to_dict(self) -> dict:
        return {"timestamp": self.timestamp, "level": self.level, "message": self.message}

    @classmethod
    def from_dict(cls, doc: dict) -> "JobEvent":
        return cls(doc["timestamp"], doc.get("level", "info"), doc.get("message", ""))


_SENTINEL = object()


@dataclass
class Job:
    """One asynchronous unit of work with a monotone-progress state machine."""

    id: str
    project_id: str
    kind: str
    params: dict
    state: str = "created"
    progress: float = 0.0
    events: list[JobEvent] = field(default_factory=list)
    result_ref: dict | None = None
    error: str | None = None

    def __post_init__(self):
        self._lock = threading.RLock()
        self._subscribers: list[queue.SimpleQueue] = []
        self._cancel_requested = False

    def publish(self, message: str, level: str = "info") -> None:
        with self._lock:
            event = JobEvent(_now(), level, message)
            self.events.append(event)
            for q in self._subscribers:
                q.put(event)

    def checkpoint(self, progress: float | None = None, message: str | None = None) -> None:
        """Cooperative cancellation point; progress only ever increases."""
        with self._lock:
            if self._cancel_requested:
                raise JobCancelled()
            if progress is not None:
                self.progress = max(self.progress, min(progress, 1.0))
        if message:
            self.publish(message)

    def finish(self, state: str, error: str | None = None) -> None:
        with self._lock:
            self.state = state
            if state == "completed":
                self.progress = 1.0
            self.error = error
            self.publish(state if not error else f"{state}: {error}",
                         level="error" if state == "failed" else "info")
            for q in self._subscribers:
                q.put(_SENTINEL)
            self._subscribers.clear()

    def snapshot(self) -> dict:
        with self._lock:
            return self.to_dict()

    def to_dict(self) -> dict:
        doc = {
            "id": self.id,
            "projectId": self.project_id,
            "kind": self.kind,
            "params": dict(self.params),
            "state": self.state,
            "progress": self.progress,
            "events": [e.to_dict() for e in self.events],
            "resultRef": self.result_ref,
        }
        if self.error is not None:
            doc["error"] = self.error
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "Job":
        job = cls(
            id=doc["id"],
            project_id=doc["projectId"],
            kind=doc["kind"],
            params=dict(doc.get("params", {})),
            state=doc.get("state", "created"),
            progress=doc.get("progress", 0.0),
            events=[JobEvent.from_dict(e) for e in doc.get("events", [])],
            result_ref=doc.get("resultRef"),
            error=doc.get("error"),
        )
        return job


class JobEngine:
    """Submit, track, subscribe to, and cancel jobs."""

    def __init__(self, store, generation, embedding, jobs_path: str | Path | None = None,
                 max_workers: int = 4):
        self.store = store
        self.generation = generation
        self.embedding = embedding
        self.jobs_path = Path(jobs_path) if jobs_path else None
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()
        self._pool = ThreadPoolExecutor(max_workers=max_workers)
        if self.jobs_path and self.jobs_path.exists():
            self._load_history()

    # -- lifecycle ------------------------------------------------------------

    def submit(self, project_id: str, kind: str, params: dict | None = None) -> str:
        params = dict(params or {})
        self.store.get(project_id)
        self._validate(kind, params)
        with self._lock:
            if kind in MUTATING_KINDS:
                for job in self._jobs.values():
                    if (
                        job.project_id == project_id
                        and job.kind in MUTATING_KINDS
                        and job.state not in TERMINAL_STATES
                    ):
                        raise ProjectBusy(
                            f"project {project_id!r} already runs a {job.kind} job"
                        )
            job = Job(id=str(uuid.uuid4()), project_id=project_id, kind=kind, params=params)
            self._jobs[job.id] = job
        job.publish(f"job created: {kind}")
        self._persist()
        self._pool.submit(self._run, job)
        return job.id

    def _validate(self, kind: str, params: dict) -> None:
        if kind not in JOB_KINDS:
            raise InvalidParams(f"unknown job kind {kind!r}")
        if kind == "import":
            if params.get("source") not in ("directory", "table", "matrix"):
                raise InvalidParams("import requires source in {directory, table, matrix}")
            if not params.get("path"):
                raise InvalidParams("import requires a path")
        if kind == "generate-layer":
            if not params.get("sourceType") or not params.get("targetType"):
                raise InvalidParams("generate-layer requires sourceType and targetType")
        if kind == "predict-links":
            if not params.get("childTypes") or not params.get("parentTypes"):
                raise InvalidParams("predict-links requires childTypes and parentTypes")

    def get(self, job_id: str) -> Job:
        try:
            return self._jobs[job_id]
        except KeyError:
            raise UnknownJob(f"no job {job_id!r}") from None

    def status(self, job_id: str) -> dict:
        return self.get(job_id).snapshot()

    def list(self, project_id: str | None = None) -> list[dict]:
        return [
            j.snapshot()
            for j in self._jobs.values()
            if project_id is None or j.project_id == project_id
        ]

    def subscribe(self, job_id: str) -> Iterator[JobEvent]:
        """Ordered event stream: state snapshot, full history, then live events."""
        job = self.get(job_id)
        with job._lock:
            history = list(job.events)
            done = job.state in TERMINAL_STATES
            q: queue.SimpleQueue | None = None
            if not done:
                q = queue.SimpleQueue()
                job._subscribers.append(q)
            snapshot = JobEvent(
                _now(), "info", f"snapshot state={job.state} progress={job.progress:.2f}"
            )

        def stream() -> Iterator[JobEvent]:
            yield snapshot
            yield from history
            if q is None:
                return
            while True:
                item = q.get()
                if item is _SENTINEL:
                    return
                yield item

        return stream()

    def cancel(self, job_id: str) -> dict:
        job = self.get(job_id)
        with job._lock:
            if job.state in TERMINAL_STATES:
                raise AlreadyTerminal(f"job {job_id} is already {job.state}")
            job._cancel_requested = True
        job.publish("cancel requested")
        return job.snapshot()

    def wait(self, job_id: str, timeout: float = 60.0) -> dict:
        """Convenience for synchronous callers: block until terminal."""
        import time

        job = self.get(job_id)
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            if job.state in TERMINAL_STATES:
                return job.snapshot()
            time.sleep(0.01)
        return job.snapshot()

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)

    # -- execution --------------------------------------------------------------

    def _run(self, job: Job) -> None:
        with job._lock:
            if job._cancel_requested:
                job.finish("cancelled")
                self._persist()
                return
            job.state = "running"
        job.publish("job started")
        try:
            with self.store.lock(job.project_id):
                working = self.store.get(job.project_id).clone()
            result, mutated = self._execute(job, working)
            job.checkpoint(progress=1.0)
            if mutated:
                self.store.replace(job.project_id, working)
                job.publish("results applied to project")
            job.result_ref = result
            job.finish("completed")
        except JobCancelled:
            job.publish("job stopped at checkpoint; no results applied")
            job.finish("cancelled")
        except WorkbenchError as exc:
            job.finish("failed", error=f"{exc.code}: {exc.message}")
        except Exception as exc:  # noqa: BLE001 — worker must never crash the pool
            job.finish("failed", error=repr(exc))
        self._persist()

    def _execute(self, job: Job, project: Project) -> tuple[dict, bool]:
        from . import docgen, ingestion, trace, vocab

        params = job.params
        kind = job.kind

        if kind == "import":
            job.checkpoint(0.1, "import started")
            source = params["source"]
            if source == "directory":
                report = ingestion.import_directory(
                    project,
                    params["path"],
                    include_globs=tuple(params.get("includeGlobs") or ()) or None,
                    exclude_globs=tuple(params.get("excludeGlobs") or ()),
                    max_file_bytes=params.get("maxFileBytes", ingestion.DEFAULT_MAX_FILE_BYTES),
                    on_event=lambda m: job.publish(m, level="warning"),
                )
            elif source == "table":
                report = ingestion.import_table(project, params["path"])
            else:
                report = ingestion.import_trace_matrix(project, params["path"])
            job.checkpoint(0.9, f"imported {report.artifacts_created} artifact(s)")
            return {"report": report.to_dict()}, True

        if kind == "summarize":
            code = sorted(
                (a for a in project.artifacts.values() if a.type == "Code"),
                key=lambda a: a.id,
            )
            for i, artifact in enumerate(code):
                docgen.summarize_file(artifact, self.generation)
                job.checkpoint(0.8 * (i + 1) / max(len(code), 1))
            if code:
                project.touch()
            job.checkpoint(0.85, f"summarized {len(code)} code file(s)")
            docgen.generate_project_summary(project, self.generation, embedder=self.embedding)
            job.checkpoint(0.95, "project summary generated")
            return {"summarizedFiles": len(code)}, True

        if kind == "generate-layer":
            job.checkpoint(0.1, "clustering source layer")
            artifacts, links = docgen.generate_layer(
                project,
                params["sourceType"],
                params["targetType"],
                self.generation,
                tau=params.get("tau", docgen.DEFAULT_TAU),
                embedder=self.embedding,
            )
            job.checkpoint(
                0.9, f"generated {len(artifacts)} artifact(s), {len(links)} link(s)"
            )
            return {
                "artifacts": [a.id for a in artifacts],
                "links": [[l.child_id, l.parent_id] for l in links],
            }, True

        if kind == "predict-links":
            request = trace.PredictionRequest(
                child_types=frozenset(params["childTypes"]),
                parent_types=frozenset(params["parentTypes"]),
                threshold=params.get("threshold", trace.DEFAULT_THRESHOLD),
                max_per_child=params.get("maxPerChild", trace.DEFAULT_MAX_PER_CHILD),
            )
            job.checkpoint(0.1, "scoring candidate links")
            links = trace.predict_links(project, request, on_event=job.publish)
            job.checkpoint(0.9, f"predicted {len(links)} link(s)")
            return {"links": [[l.child_id, l.parent_id] for l in links]}, True

        if kind == "health-sweep":
            targets = params.get("artifactIds") or sorted(
                a.id
                for a in project.artifacts.values()
                if a.type not in ("Code", "Concept")
            )
            candidates = vocab.extract_concepts(project)
            finding_ids = []
            for i, aid in enumerate(targets):
                findings = vocab.health_check(
                    project, aid, self.generation,
                    candidates=candidates, on_event=job.publish,
                )
                finding_ids.extend(f.id for f in findings)
                job.checkpoint(0.9 * (i + 1) / max(len(targets), 1))
            return {"findings": finding_ids, "artifactsChecked": len(targets)}, True

        # extract-concepts: read-only
        candidates = vocab.extract_concepts(project, top_n=params.get("topN", 25))
        job.checkpoint(0.9, f"extracted {len(candidates)} candidate(s)")
        return {"candidates": [[t, s] for t, s in candidates]}, False

    # -- persistence ---------------------------------------------------------------

    def _persist(self) -> None:
        if not self.jobs_path:
            return
        with self._lock:
            doc = {
                "schema_version": JOBS_SCHEMA_VERSION,
                "jobs": [j.snapshot() for j in self._jobs.values()],
            }
        self.jobs_path.parent.mkdir(parents=True, exist_ok=True)
        self.jobs_path.write_text(
            json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )

    def _load_history(self) -> None:
        try:
            doc = json.loads(self.jobs_path.read_text("utf-8"))
        except (OSError, json.JSONDecodeError):
            return
        for jdoc in doc.get("jobs", []):
            job = Job.from_dict(jdoc)
            if job.state not in TERMINAL_STATES:
                job.state = "failed"
                job.error = "restart"
                job.events.append(JobEvent(_now(), "error", "failed: restart"))
            self._jobs[job.id] = job
