"""REST API over projects, artifacts, links, concepts, findings, and jobs.

Also home of the retrieval-augmented chat pipeline and artifact search.
All mutating endpoints round-trip through the core model's validation, so
the HTTP layer cannot create state the model would reject. Job events are
pushed over server-sent events carrying the same JSON payload a poller
sees.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse

from . import docgen, ingestion, trace, vocab
from .engine import Engine
from .errors import (
    AlreadyClosed,
    AlreadyTerminal,
    CycleDetected,
    DuplicateId,
    DuplicateLink,
    DuplicateTerm,
    EmptyQuestion,
    InvalidAction,
    NotPending,
    PathNotFound,
    ProjectBusy,
    ProviderUnavailable,
    SelfLink,
    UnknownFinding,
    UnknownId,
    UnknownJob,
    UnknownLink,
    UnknownProject,
    WorkbenchError,
)
from .model import Artifact, Project
from .providers import ContextDoc, GenerationProvider, chat_instruction
from .similarity import build_index, top_k

DEFAULT_CHAT_K = 5

_STATUS_CODES: dict[type, int] = {
    UnknownProject: 404,
    UnknownId: 404,
    UnknownLink: 404,
    UnknownJob: 404,
    UnknownFinding: 404,
    PathNotFound: 404,
    DuplicateId: 409,
    DuplicateLink: 409,
    DuplicateTerm: 409,
    CycleDetected: 409,
    SelfLink: 409,
    NotPending: 409,
    AlreadyClosed: 409,
    AlreadyTerminal: 409,
    ProjectBusy: 409,
    InvalidAction: 409,
    EmptyQuestion: 400,
    ProviderUnavailable: 503,
}


@dataclass
class ChatResponse:
    """Answer text plus the artifact ids it is grounded in."""

    text: str
    cited_artifact_ids: list[str]
    used_k: int

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "citedArtifactIds": list(self.cited_artifact_ids),
            "usedK": self.used_k,
        }


def chat_query(
    project: Project,
    question: str,
    k: int = DEFAULT_CHAT_K,
    provider: GenerationProvider | None = None,
) -> ChatResponse:
    """Answer a question with top-k retrieved artifacts as grounding.

    Citations are the retrieved (nonzero-score) artifact ids in rank order.
    If the provider is unreachable the retrieval-only response comes back
    with empty text and citations intact.
    """
    if not question or not question.strip():
        raise EmptyQuestion("chat question must be non-empty")
    index = build_index((a.id, a.scoring_text()) for a in project.artifacts.values())
    ranked = top_k(index, question, k) if k > 0 else []
    cited = [doc_id for doc_id, score in ranked if score > 0.0]
    context = []
    for aid in cited:
        artifact = project.artifacts[aid]
        context.append(
            ContextDoc(artifact.id, artifact.name, artifact.summary or artifact.body)
        )
    try:
        text = provider.complete(chat_instruction(question.strip()), context)
    except ProviderUnavailable:
        text = ""
    return ChatResponse(text=text, cited_artifact_ids=cited, used_k=len(cited))


def _subsequence_match(needle: str, haystack: str) -> bool:
    """Case-insensitive subsequence test used for fuzzy name search."""
    needle = needle.lower()
    haystack = haystack.lower()
    pos = 0
    for ch in needle:
        pos = haystack.find(ch, pos)
        if pos < 0:
            return False
        pos += 1
    return True


def search_artifacts(
    project: Project,
    query: str = "",
    type_filter: str | None = None,
    flagged: bool | None = None,
    status: str | None = None,
    sort: str = "score",
    limit: int = 50,
) -> list[dict]:
    """Filter, rank, and sort artifacts.

    A non-empty query keeps artifacts whose name matches as a subsequence
    (worth a constant boost) or whose indexed text scores above zero;
    filters are conjunctive; the status filter selects artifacts attached
    to at least one link with that review status.
    """
    rows = list(project.artifacts.values())
    if type_filter:
        rows = [a for a in rows if a.type == type_filter]
    if flagged is not None:
        rows = [a for a in rows if bool(a.flagged) == flagged]
    if status:
        linked = {
            endpoint
            for link in project.links.values()
            if link.status == status
            for endpoint in link.pair
        }
        rows = [a for a in rows if a.id in linked]

    scores: dict[str, float] = {a.id: 0.0 for a in rows}
    if query.strip():
        index = build_index((a.id, a.scoring_text()) for a in project.artifacts.values())
        ranked = dict(top_k(index, query, index.n_docs))
        kept = []
        for artifact in rows:
            name_hit = _subsequence_match(query.strip(), artifact.name)
            score = ranked.get(artifact.id, 0.0) + (1.0 if name_hit else 0.0)
            if score > 0.0:
                scores[artifact.id] = score
                kept.append(artifact)
        rows = kept

    if sort == "score":
        rows.sort(key=lambda a: (-scores[a.id], a.id))
    elif sort in ("id", "name", "type"):
        rows.sort(key=lambda a: (getattr(a, sort), a.id))
    else:
        rows.sort(key=lambda a: a.id)
    out = []
    for artifact in rows[: max(limit, 0)]:
        row = artifact.to_dict()
        row["score"] = round(scores[artifact.id], 6)
        out.append(row)
    return out


def create_app(engine: Engine | None = None, static_dir: str | Path | None = None) -> FastAPI:
    """Build the REST application over one engine instance."""
    engine = engine or Engine.from_env()
    app = FastAPI(title="Requirements workbench", version="0.1.0")
    app.state.engine = engine

    @app.exception_handler(WorkbenchError)
    async def _domain_error(request: Request, exc: WorkbenchError):
        return JSONResponse(
            status_code=_STATUS_CODES.get(type(exc), 400), content=exc.to_dict()
        )

    def project_of(project_id: str) -> Project:
        return engine.store.get(project_id)

    # -- projects -------------------------------------------------------------

    @app.post("/projects", status_code=201)
    def create_project(body: dict):
        name = (body or {}).get("name") or "Untitled project"
        project = engine.store.create(name=name, project_id=(body or {}).get("id"))
        return {"id": project.id, "name": project.name, "revision": project.revision}

    @app.get("/projects")
    def list_projects():
        return [
            {
                "id": p.id,
                "name": p.name,
                "revision": p.revision,
                "artifactCount": len(p.artifacts),
            }
            for p in engine.store.list()
        ]

    @app.get("/projects/{project_id}")
    def get_project(project_id: str):
        return project_of(project_id).to_dict()

    # -- import ---------------------------------------------------------------

    @app.post("/projects/{project_id}/import/{source}")
    def import_source(project_id: str, source: str, body: dict):
        project = project_of(project_id)
        path = (body or {}).get("path", "")
        with engine.store.lock(project_id):
            if source == "directory":
                report = ingestion.import_directory(
                    project,
                    path,
                    include_globs=tuple(body.get("includeGlobs") or ()) or None,
                    exclude_globs=tuple(body.get("excludeGlobs") or ()),
                    max_file_bytes=body.get("maxFileBytes", ingestion.DEFAULT_MAX_FILE_BYTES),
                )
            elif source == "table":
                report = ingestion.import_table(project, path)
            elif source == "matrix":
                report = ingestion.import_trace_matrix(project, path)
            else:
                raise PathNotFound(f"unknown import source {source!r}")
        return report.to_dict()

    # -- artifacts --------------------------------------------------------------

    @app.get("/projects/{project_id}/artifacts")
    def list_artifacts(project_id: str, type: str | None = None):
        project = project_of(project_id)
        rows = [
            a.to_dict()
            for a in project.artifacts.values()
            if type is None or a.type == type
        ]
        return rows

    @app.post("/projects/{project_id}/artifacts", status_code=201)
    def create_artifact(project_id: str, body: dict):
        project = project_of(project_id)
        artifact = Artifact.from_dict(body)
        with engine.store.lock(project_id):
            revision = project.upsert_artifact(artifact, create=True)
        return {"artifact": artifact.to_dict(), "revision": revision}

    @app.get("/projects/{project_id}/artifacts/{artifact_id:path}")
    def get_artifact(project_id: str, artifact_id: str):
        return project_of(project_id).require_artifact(artifact_id).to_dict()

    @app.patch("/projects/{project_id}/artifacts/{artifact_id:path}")
    def patch_artifact(project_id: str, artifact_id: str, body: dict):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            current = project.require_artifact(artifact_id)
            merged = current.to_dict()
            merged.update({k: v for k, v in (body or {}).items() if k != "id"})
            artifact = Artifact.from_dict(merged)
            revision = project.upsert_artifact(artifact)
        return {"artifact": artifact.to_dict(), "revision": revision}

    @app.delete("/projects/{project_id}/artifacts/{artifact_id:path}")
    def delete_artifact(project_id: str, artifact_id: str):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            revision = project.delete_artifact(artifact_id)
        return {"revision": revision}

    # -- links ---------------------------------------------------------------------

    @app.get("/projects/{project_id}/links")
    def list_links(project_id: str, status: str | None = None):
        project = project_of(project_id)
        return [
            l.to_dict()
            for l in project.links.values()
            if status is None or l.status == status
        ]

    @app.post("/projects/{project_id}/links", status_code=201)
    def create_link(project_id: str, body: dict):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            revision = project.add_link(
                body["childId"],
                body["parentId"],
                status=body.get("status", "manual"),
                score=body.get("score"),
                created_by=body.get("createdBy", "user"),
            )
        link = project.links[(body["childId"], body["parentId"])]
        return {"link": link.to_dict(), "revision": revision}

    @app.post("/projects/{project_id}/links/{child_id:path}/{parent_id:path}/review")
    def review(project_id: str, child_id: str, parent_id: str, body: dict):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            revision = trace.review_link(
                project,
                child_id,
                parent_id,
                decision=(body or {}).get("decision", ""),
                reviewer=(body or {}).get("reviewer", ""),
            )
        link = project.links[(child_id, parent_id)]
        return {"link": link.to_dict(), "revision": revision}

    @app.post("/projects/{project_id}/links/{child_id:path}/{parent_id:path}/explain")
    def explain(project_id: str, child_id: str, parent_id: str):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            text = trace.explain_link(project, child_id, parent_id, engine.generation)
        return {"explanation": text}

    # -- derived views ----------------------------------------------------------------

    @app.get("/projects/{project_id}/tim")
    def tim(project_id: str):
        return project_of(project_id).compute_tim().to_dict()

    @app.get("/projects/{project_id}/views/{artifact_id:path}")
    def focused_view(project_id: str, artifact_id: str, up: int = 1, down: int = 1):
        return project_of(project_id).focused_view(artifact_id, up, down).to_dict()

    @app.get("/projects/{project_id}/search")
    def search(
        project_id: str,
        q: str = "",
        type: str | None = None,
        flagged: bool | None = None,
        status: str | None = None,
        sort: str = "score",
        limit: int = Query(default=50, ge=0),
    ):
        return search_artifacts(
            project_of(project_id),
            query=q,
            type_filter=type,
            flagged=flagged,
            status=status,
            sort=sort,
            limit=limit,
        )

    # -- chat ----------------------------------------------------------------------------

    @app.post("/projects/{project_id}/chat")
    def chat(project_id: str, body: dict):
        project = project_of(project_id)
        question = (body or {}).get("question", "")
        k = (body or {}).get("k", DEFAULT_CHAT_K)
        return chat_query(project, question, k=k, provider=engine.generation).to_dict()

    # -- concepts and findings --------------------------------------------------------------

    @app.get("/projects/{project_id}/concepts")
    def list_concepts(project_id: str):
        return [c.to_dict() for c in project_of(project_id).concepts.values()]

    @app.post("/projects/{project_id}/concepts", status_code=201)
    def create_concept(project_id: str, body: dict):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            revision = vocab.add_concept(
                project,
                (body or {}).get("term", ""),
                definition=(body or {}).get("definition", ""),
            )
        concept = project.concepts[body["term"].strip().casefold()]
        return {"concept": concept.to_dict(), "revision": revision}

    @app.post("/projects/{project_id}/artifacts/{artifact_id:path}/health")
    def health(project_id: str, artifact_id: str):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            findings = vocab.health_check(project, artifact_id, engine.generation)
        return [f.to_dict() for f in findings]

    @app.get("/projects/{project_id}/findings")
    def list_findings(project_id: str, artifact: str | None = None, state: str | None = None):
        project = project_of(project_id)
        return [
            f.to_dict()
            for f in project.findings.values()
            if (artifact is None or f.artifact_id == artifact)
            and (state is None or f.state == state)
        ]

    @app.post("/projects/{project_id}/findings/{finding_id}")
    def act_on_finding(project_id: str, finding_id: str, body: dict):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            revision = vocab.resolve_finding(
                project, finding_id, (body or {}).get("action", "")
            )
        return {"finding": project.findings[finding_id].to_dict(), "revision": revision}

    @app.post("/projects/{project_id}/artifacts/{artifact_id:path}/flag")
    def flag(project_id: str, artifact_id: str, body: dict):
        project = project_of(project_id)
        with engine.store.lock(project_id):
            revision = vocab.flag_artifact(project, artifact_id, (body or {}).get("note"))
        return {"revision": revision}

    # -- jobs -------------------------------------------------------------------------------

    @app.post("/projects/{project_id}/jobs", status_code=202)
    def submit_job(project_id: str, body: dict):
        job_id = engine.jobs.submit(
            project_id, (body or {}).get("kind", ""), (body or {}).get("params")
        )
        return {"jobId": job_id, "job": engine.jobs.status(job_id)}

    @app.get("/projects/{project_id}/jobs")
    def list_jobs(project_id: str):
        project_of(project_id)
        return engine.jobs.list(project_id)

    @app.get("/projects/{project_id}/jobs/{job_id}")
    def job_status(project_id: str, job_id: str):
        project_of(project_id)
        return engine.jobs.status(job_id)

    @app.post("/projects/{project_id}/jobs/{job_id}/cancel")
    def cancel_job(project_id: str, job_id: str):
        project_of(project_id)
        return engine.jobs.cancel(job_id)

    @app.get("/projects/{project_id}/jobs/{job_id}/events")
    def job_events(project_id: str, job_id: str):
        project_of(project_id)
        stream = engine.jobs.subscribe(job_id)

        def sse() -> Iterator[str]:
            for event in stream:
                yield f"data: {json.dumps(event.to_dict(), ensure_ascii=False)}\n\n"

        return StreamingResponse(sse(), media_type="text/event-stream")

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
