"""Command-line front door for the workbench.

One-shot commands mirror the REST API and operate on a canonical project
file; ``onboard`` chains directory import, summarization, and two rounds
of documentation generation. ``--json`` emits exactly one JSON document on
stdout; progress and errors go to stderr. Exit codes: 0 success, 1 user
error, 2 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import threading
from pathlib import Path

from . import docgen, ingestion, trace, vocab
from .engine import Engine
from .errors import WorkbenchError
from .jobs import TERMINAL_STATES
from .model import Project
from .providers import (
    MockProvider,
    embedding_provider_from_env,
    generation_provider_from_env,
    load_contradiction_table,
)
from .server import chat_query, search_artifacts


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems are user errors: exit 1
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="root", description="Requirements workbench CLI")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add(name: str, help_text: str, project: bool = True) -> argparse.ArgumentParser:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--json", action="store_true", help="machine-readable output")
        if project:
            cmd.add_argument("--project", required=True, help="project file path")
        return cmd

    onboard = add("onboard", "import a codebase and generate documentation", project=False)
    onboard.add_argument("--dir", required=True, help="working tree to import")
    onboard.add_argument("--out", required=True, help="project file to write")
    onboard.add_argument("--name", default=None, help="project name")
    onboard.add_argument("--tau", type=float, default=docgen.DEFAULT_TAU)

    imp = add("import", "import a directory, table, or matrix into a project")
    group = imp.add_mutually_exclusive_group(required=True)
    group.add_argument("--dir", help="directory of source files")
    group.add_argument("--table", help="artifact table CSV or JSON array")
    group.add_argument("--matrix", help="trace matrix CSV")
    imp.add_argument("--create", action="store_true", help="create the project file")
    imp.add_argument("--name", default=None, help="project name when creating")

    add("summarize", "summarize code files and the whole project")

    gen = add("gen-docs", "generate documentation layers")
    gen.add_argument("--source", default=None, help="source artifact type")
    gen.add_argument("--target", default=None, help="target artifact type")
    gen.add_argument("--tau", type=float, default=docgen.DEFAULT_TAU)

    tr = add("trace", "predict trace links between layers")
    tr.add_argument("--child", required=True, action="append", help="child type (repeatable)")
    tr.add_argument("--parent", required=True, action="append", help="parent type (repeatable)")
    tr.add_argument("--threshold", type=float, default=trace.DEFAULT_THRESHOLD)
    tr.add_argument("--max-per-child", type=int, default=trace.DEFAULT_MAX_PER_CHILD)

    health = add("health", "run health checks")
    health.add_argument("artifact", nargs="?", default=None, help="artifact id")
    health.add_argument("--all", action="store_true", help="sweep all text artifacts")
    health.add_argument("--mock-contradictions", default=None,
                        help="scripted contradiction table CSV for the mock provider")

    conc = add("concepts", "extract or add vocabulary concepts")
    conc.add_argument("--extract", action="store_true")
    conc.add_argument("--top", type=int, default=vocab.DEFAULT_TOP_CANDIDATES)
    conc.add_argument("--add", default=None, metavar="TERM")
    conc.add_argument("--definition", default="")

    chat = add("chat", "ask a question about the project")
    chat.add_argument("--question", required=True)
    chat.add_argument("-k", type=int, default=5)

    search = add("search", "search artifacts")
    search.add_argument("--query", required=True)
    search.add_argument("--type", default=None)
    search.add_argument("--limit", type=int, default=50)

    export = add("export", "print or copy the canonical project document")
    export.add_argument("--out", default=None, help="write to file instead of stdout")

    serve = add("serve", "run the REST server", project=False)
    serve.add_argument("--project", action="append", default=[],
                       help="project file(s) to load (repeatable)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--static", default=None, help="directory with the web UI build")
    serve.add_argument("--jobs-file", default=None, help="jobs sidecar path")
    serve.add_argument("--mock-contradictions", default=None)

    return parser


def _provider(args) -> object:
    table_path = getattr(args, "mock_contradictions", None)
    if table_path:
        return MockProvider(contradictions=load_contradiction_table(table_path))
    return generation_provider_from_env()


def _engine(args) -> Engine:
    return Engine(generation=_provider(args), embedding=embedding_provider_from_env())


def _load(args) -> Project:
    return ingestion.load_project(args.project)


def _emit(args, doc: dict, text_lines: list[str]) -> None:
    if args.json:
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    else:
        for line in text_lines:
            print(line)


def _run_job(engine: Engine, project_id: str, kind: str, params: dict) -> dict:
    """Submit a job and render its events as progress lines on stderr."""
    job_id = engine.jobs.submit(project_id, kind, params)
    done = threading.Event()

    def pump():
        for event in engine.jobs.subscribe(job_id):
            print(f"  [{kind}] {event.message}", file=sys.stderr)
        done.set()

    thread = threading.Thread(target=pump, daemon=True)
    thread.start()
    snapshot = engine.jobs.wait(job_id, timeout=600)
    done.wait(timeout=5)
    if snapshot["state"] != "completed":
        raise WorkbenchError(
            f"{kind} job {snapshot['state']}: {snapshot.get('error') or 'no details'}"
        )
    return snapshot


def _cmd_onboard(args) -> dict:
    engine = _engine(args)
    name = args.name or Path(args.dir).resolve().name
    project = engine.store.create(name=name, project_id="P1")
    _run_job(engine, project.id, "import", {"source": "directory", "path": args.dir})
    _run_job(engine, project.id, "summarize", {})
    _run_job(engine, project.id, "generate-layer",
             {"sourceType": "Code", "targetType": "Functional Requirement",
              "tau": args.tau})
    _run_job(engine, project.id, "generate-layer",
             {"sourceType": "Functional Requirement", "targetType": "Feature",
              "tau": args.tau})
    final = engine.store.get(project.id)
    ingestion.save_project(final, args.out)
    engine.shutdown()
    tim = final.compute_tim().to_dict()
    return {"project": args.out, "types": tim["types"], "revision": final.revision}


def _cmd_import(args) -> dict:
    if args.create:
        project = Project(id="P1", name=args.name or Path(args.project).stem)
    else:
        project = _load(args)
    if args.dir:
        report = ingestion.import_directory(project, args.dir)
    elif args.table:
        report = ingestion.import_table(project, args.table)
    else:
        report = ingestion.import_trace_matrix(project, args.matrix)
    ingestion.save_project(project, args.project)
    return report.to_dict()


def _cmd_summarize(args) -> dict:
    project = _load(args)
    provider = _provider(args)
    code = sorted(
        (a for a in project.artifacts.values() if a.type == "Code"), key=lambda a: a.id
    )
    for artifact in code:
        docgen.summarize_file(artifact, provider)
    if code:
        project.touch()
    docgen.generate_project_summary(project, provider)
    ingestion.save_project(project, args.project)
    return {"summarizedFiles": len(code), "summary": project.summary.to_dict()}


def _cmd_gen_docs(args) -> dict:
    project = _load(args)
    provider = _provider(args)
    stages = (
        [(args.source, args.target)]
        if args.source and args.target
        else [("Code", "Functional Requirement"), ("Functional Requirement", "Feature")]
    )
    created: dict = {"artifacts": [], "links": []}
    for source_type, target_type in stages:
        artifacts, links = docgen.generate_layer(
            project, source_type, target_type, provider, tau=args.tau
        )
        created["artifacts"].extend(a.id for a in artifacts)
        created["links"].extend([l.child_id, l.parent_id] for l in links)
    ingestion.save_project(project, args.project)
    return created


def _cmd_trace(args) -> tuple[dict, list[str]]:
    project = _load(args)
    request = trace.PredictionRequest(
        child_types=frozenset(args.child),
        parent_types=frozenset(args.parent),
        threshold=args.threshold,
        max_per_child=args.max_per_child,
    )
    links = trace.predict_links(project, request)
    ingestion.save_project(project, args.project)
    doc = {"links": [l.to_dict() for l in links]}
    lines = [f"{l.child_id} -> {l.parent_id}  score={l.score:.3f}  pending" for l in links]
    return doc, lines or ["no links predicted"]


def _cmd_health(args) -> tuple[dict, list[str]]:
    project = _load(args)
    provider = _provider(args)
    if args.all:
        targets = sorted(
            a.id for a in project.artifacts.values()
            if a.type not in ("Code", "Concept")
        )
    elif args.artifact:
        targets = [args.artifact]
    else:
        raise WorkbenchError("give an artifact id or --all")
    candidates = vocab.extract_concepts(project)
    findings = []
    for aid in targets:
        findings.extend(vocab.health_check(project, aid, provider, candidates=candidates))
    ingestion.save_project(project, args.project)
    doc = {"findings": [f.to_dict() for f in findings]}
    lines = [
        f"{f.artifact_id}: {f.kind} [{f.subject}] {f.explanation}" for f in findings
    ] or ["no findings"]
    return doc, lines


def _cmd_concepts(args) -> tuple[dict, list[str]]:
    project = _load(args)
    if args.add:
        vocab.add_concept(project, args.add, definition=args.definition)
        ingestion.save_project(project, args.project)
        return {"added": args.add}, [f"added concept {args.add!r}"]
    candidates = vocab.extract_concepts(project, top_n=args.top)
    doc = {"candidates": [[t, round(s, 4)] for t, s in candidates]}
    lines = [f"{t}  {s:.4f}" for t, s in candidates] or ["no candidates"]
    return doc, lines


def _cmd_chat(args) -> tuple[dict, list[str]]:
    project = _load(args)
    response = chat_query(project, args.question, k=args.k, provider=_provider(args))
    doc = response.to_dict()
    lines = [response.text, "cited: " + ", ".join(response.cited_artifact_ids)]
    return doc, lines


def _cmd_search(args) -> tuple[dict, list[str]]:
    project = _load(args)
    rows = search_artifacts(
        project, query=args.query, type_filter=args.type, limit=args.limit
    )
    doc = {"results": rows}
    lines = [f"{r['id']}  [{r['type']}]  {r['name']}  score={r['score']}" for r in rows]
    return doc, lines or ["no matches"]


def _cmd_export(args) -> tuple[dict, list[str]]:
    project = _load(args)
    doc = project.to_dict()
    if args.out:
        ingestion.save_project(project, args.out)
        return {"written": args.out}, [f"wrote {args.out}"]
    return doc, [json.dumps(doc, indent=2, ensure_ascii=False)]


def _cmd_serve(args) -> None:
    import uvicorn

    from .server import create_app

    engine = Engine(
        generation=_provider(args),
        embedding=embedding_provider_from_env(),
        jobs_path=args.jobs_file,
    )
    for path in args.project:
        engine.store.add(ingestion.load_project(path))
    app = create_app(engine, static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        if args.command == "onboard":
            _emit(args, doc := _cmd_onboard(args), [f"wrote {doc['project']}"])
        elif args.command == "import":
            doc = _cmd_import(args)
            _emit(args, doc, [f"created {doc['artifactsCreated']} artifact(s), "
                              f"{doc['linksCreated']} link(s), "
                              f"skipped {len(doc['skippedFiles'])}"])
        elif args.command == "summarize":
            doc = _cmd_summarize(args)
            _emit(args, doc, [f"summarized {doc['summarizedFiles']} file(s)"])
        elif args.command == "gen-docs":
            doc = _cmd_gen_docs(args)
            _emit(args, doc, [f"generated {len(doc['artifacts'])} artifact(s)"])
        elif args.command == "trace":
            doc, lines = _cmd_trace(args)
            _emit(args, doc, lines)
        elif args.command == "health":
            doc, lines = _cmd_health(args)
            _emit(args, doc, lines)
        elif args.command == "concepts":
            doc, lines = _cmd_concepts(args)
            _emit(args, doc, lines)
        elif args.command == "chat":
            doc, lines = _cmd_chat(args)
            _emit(args, doc, lines)
        elif args.command == "search":
            doc, lines = _cmd_search(args)
            _emit(args, doc, lines)
        elif args.command == "export":
            doc, lines = _cmd_export(args)
            if args.json:
                print(json.dumps(doc, indent=2, ensure_ascii=False))
            else:
                for line in lines:
                    print(line)
        elif args.command == "serve":
            _cmd_serve(args)
        else:
            parser.print_usage(sys.stderr)
            return 1
    except WorkbenchError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 — anything else is an internal error
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
