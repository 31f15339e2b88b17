"""Import project knowledge from a working tree or flat files.

Also owns save/load of the canonical project JSON document. All formats
are documented in the README: artifact table CSV ``id,type,name,body``,
trace matrix CSV ``child_id,parent_id``, and the canonical project file.
"""

from __future__ import annotations

import csv
import fnmatch
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import (
    CycleDetected,
    MalformedRow,
    MissingHeader,
    ParseError,
    PathNotFound,
    SchemaMismatch,
    UnknownId,
)
from .model import SCHEMA_VERSION, Artifact, Project

DEFAULT_MAX_FILE_BYTES = 1_048_576  # 1 MiB

SOURCE_EXTENSIONS = (
    "py", "pyi", "rs", "go", "java", "kt", "scala", "c", "h", "cc", "cpp",
    "hpp", "cs", "js", "jsx", "ts", "tsx", "rb", "php", "swift", "m", "sql",
    "sh", "bash", "pl", "lua", "r", "jl", "vue", "html", "css", "xml",
    "yaml", "yml", "json", "toml", "ini", "cfg", "proto", "gradle", "cmake",
    "md", "rst", "txt",
)
DEFAULT_INCLUDE_GLOBS = tuple(f"*.{ext}" for ext in SOURCE_EXTENSIONS)
DEFAULT_EXCLUDE_DIRS = frozenset(
    {".git", ".hg", ".svn", "node_modules", "target", "build", "dist", "out",
     "__pycache__", "venv", ".venv"}
)

TABLE_HEADER = ["id", "type", "name", "body"]
MATRIX_HEADER = ["child_id", "parent_id"]


@dataclass
class ImportReport:
    """Outcome of one import run; counts match the mutations applied."""

    artifacts_created: int = 0
    links_created: int = 0
    skipped_files: list[tuple[str, str]] = field(default_factory=list)
    source_kind: str = "directory"

    def to_dict(self) -> dict:
        return {
            "artifactsCreated": self.artifacts_created,
            "linksCreated": self.links_created,
            "skippedFiles": [{"path": p, "reason": r} for p, r in self.skipped_files],
            "sourceKind": self.source_kind,
        }


def _is_binary(head: bytes) -> bool:
    return b"\x00" in head


def _matches(rel_path: str, patterns: tuple[str, ...]) -> bool:
    name = rel_path.rsplit("/", 1)[-1]
    return any(
        fnmatch.fnmatch(rel_path, pat) or fnmatch.fnmatch(name, pat)
        for pat in patterns
    )


def import_directory(
    project: Project,
    root_path: str | Path,
    include_globs: tuple[str, ...] | None = None,
    exclude_globs: tuple[str, ...] = (),
    max_file_bytes: int = DEFAULT_MAX_FILE_BYTES,
    on_event: Callable[[str], None] | None = None,
) -> ImportReport:
    """Create one Code artifact per matched text file under ``root_path``.

    Artifact id and name are the path relative to the root with ``/``
    separators. Binary files (NUL byte in the first 8 KiB) and oversized
    files are skipped with a reason. Re-imports are idempotent: existing
    artifacts are updated in place only when the file content changed.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise PathNotFound(f"directory {root_path!s} does not exist")
    include = include_globs or DEFAULT_INCLUDE_GLOBS

    candidates: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        dirnames[:] = sorted(
            d
            for d in dirnames
            if not d.startswith(".") and d not in DEFAULT_EXCLUDE_DIRS
        )
        for filename in filenames:
            rel = (Path(dirpath) / filename).relative_to(root).as_posix()
            candidates.append(rel)
    candidates.sort()

    report = ImportReport(source_kind="directory")
    matched_any = False
    for rel in candidates:
        if exclude_globs and _matches(rel, tuple(exclude_globs)):
            continue
        if not _matches(rel, include):
            continue
        matched_any = True
        full = root / rel
        size = full.stat().st_size
        if size > max_file_bytes:
            report.skipped_files.append((rel, "too-large"))
            continue
        with open(full, "rb") as handle:
            head = handle.read(8192)
            if _is_binary(head):
                report.skipped_files.append((rel, "binary"))
                continue
            body = (head + handle.read()).decode("utf-8", errors="replace")
        existing = project.artifacts.get(rel)
        if existing is None:
            project.upsert_artifact(
                Artifact(id=rel, type="Code", name=rel, body=body, provenance="imported")
            )
            report.artifacts_created += 1
        elif existing.body != body:
            existing.body = body
            project.touch()
    if not matched_any and on_event:
        on_event(f"nothing matched under {root_path!s}")
    return report


def _read_table_rows(table_path: Path) -> tuple[list[str], list[tuple[int, list[str]]]]:
    with open(table_path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle, strict=True)
        try:
            header = next(reader, None)
            if header is None:
                raise MissingHeader(f"{table_path.name} is empty")
            rows = []
            while True:
                try:
                    row = next(reader)
                except StopIteration:
                    break
                if row:
                    rows.append((reader.line_num, row))
            return header, rows
        except csv.Error as exc:
            raise MalformedRow(
                f"bad CSV at line {reader.line_num}: {exc}", line=reader.line_num
            ) from exc


def import_table(project: Project, table_path: str | Path) -> ImportReport:
    """Upsert artifacts from a CSV table (``id,type,name,body``) or JSON array.

    Rows are applied in order; the first bad row aborts with its line
    number, keeping earlier rows.
    """
    path = Path(table_path)
    if not path.is_file():
        raise PathNotFound(f"table {table_path!s} does not exist")
    report = ImportReport(source_kind="table")

    text_head = path.read_text("utf-8", errors="replace").lstrip()
    if text_head.startswith("["):
        try:
            entries = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON table: {exc}") from exc
        for pos, entry in enumerate(entries, start=1):
            try:
                artifact = Artifact.from_dict(entry)
                created = artifact.id not in project.artifacts
                project.upsert_artifact(artifact)
            except Exception as exc:
                raise MalformedRow(f"bad entry at index {pos}: {exc}", line=pos) from exc
            report.artifacts_created += 1 if created else 0
        return report

    header, rows = _read_table_rows(path)
    if header != TABLE_HEADER:
        raise MissingHeader(
            f"expected header {','.join(TABLE_HEADER)}, got {','.join(header)}"
        )
    for line_num, row in rows:
        if len(row) != len(TABLE_HEADER):
            raise MalformedRow(
                f"expected {len(TABLE_HEADER)} fields at line {line_num}, got {len(row)}",
                line=line_num,
            )
        artifact_id, artifact_type, name, body = row
        try:
            artifact = Artifact(id=artifact_id, type=artifact_type, name=name, body=body)
            created = artifact.id not in project.artifacts
            project.upsert_artifact(artifact)
        except Exception as exc:
            raise MalformedRow(f"bad row at line {line_num}: {exc}", line=line_num) from exc
        report.artifacts_created += 1 if created else 0
    return report


def import_trace_matrix(project: Project, matrix_path: str | Path) -> ImportReport:
    """Create manual links from a CSV matrix (``child_id,parent_id``).

    Errors abort at the offending row; earlier rows are kept. Exact
    duplicates of existing links are skipped so matrices can be re-imported.
    """
    path = Path(matrix_path)
    if not path.is_file():
        raise PathNotFound(f"matrix {matrix_path!s} does not exist")
    header, rows = _read_table_rows(path)
    if header != MATRIX_HEADER:
        raise MissingHeader(
            f"expected header {','.join(MATRIX_HEADER)}, got {','.join(header)}"
        )
    report = ImportReport(source_kind="matrix")
    for line_num, row in rows:
        if len(row) != 2:
            raise MalformedRow(
                f"expected 2 fields at line {line_num}, got {len(row)}", line=line_num
            )
        child_id, parent_id = row
        if (child_id, parent_id) in project.links:
            continue
        try:
            project.add_link(child_id, parent_id, status="manual")
        except UnknownId as exc:
            raise UnknownId(f"{exc.message} (line {line_num})", line=line_num) from exc
        except CycleDetected as exc:
            raise CycleDetected(f"{exc.message} (line {line_num})", line=line_num) from exc
        report.links_created += 1
    return report


def save_project(project: Project, path: str | Path) -> None:
    """Write the canonical project JSON document (stable byte-for-byte)."""
    target = Path(path)
    text = json.dumps(project.to_dict(), indent=2, ensure_ascii=False) + "\n"
    tmp = target.with_suffix(target.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, target)


def load_project(path: str | Path) -> Project:
    """Load a canonical project file; inverse of save_project."""
    source = Path(path)
    if not source.is_file():
        raise PathNotFound(f"project file {path!s} does not exist")
    try:
        doc = json.loads(source.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid project JSON: {exc}") from exc
    if not isinstance(doc, dict) or "schema_version" not in doc:
        raise ParseError("not a project document (missing schema_version)")
    version = doc["schema_version"]
    if version != SCHEMA_VERSION:
        raise SchemaMismatch(
            f"unsupported schema_version {version}", schema_version=version
        )
    try:
        return Project.from_dict(doc)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ParseError(f"malformed project document: {exc!r}") from exc
