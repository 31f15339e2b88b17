"""CLI commands: onboarding chain, one-shot commands, exit codes, --json mode."""

from __future__ import annotations

import json

import pytest

from rootwb.cli import main
from rootwb.ingestion import load_project, save_project

from conftest import (
    DB_ENTITY_DEFINITION,
    JOB_DEFINITION,
    R1_R4_EXPLANATION,
    build_walkthrough_project,
)

CODE_FILES = {
    "ctrl/brake.py": "# brake controller\nbrake valve pressure control",
    "ctrl/sensor.py": "# brake sensor\nbrake pressure sensor reading",
    "nav/route.py": "# route planner\nroute waypoint planner navigation",
    "nav/map.py": "# map loader\nmap tiles loader navigation",
}


@pytest.fixture
def codebase(tmp_path):
    root = tmp_path / "repo"
    for rel, body in CODE_FILES.items():
        path = root / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(body, encoding="utf-8")
    return root


@pytest.fixture
def contradiction_table(tmp_path):
    path = tmp_path / "contradictions.csv"
    path.write_text(
        "artifact_a,artifact_b,verdict,explanation\n"
        f'R1,R4,yes,"{R1_R4_EXPLANATION}"\n',
        encoding="utf-8",
    )
    return path


def run(capsys, *argv) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestOnboard:
    def test_full_chain(self, codebase, tmp_path, capsys):
        out_file = tmp_path / "proj.json"
        code, _, _ = run(
            capsys, "onboard", "--dir", str(codebase), "--out", str(out_file)
        )
        assert code == 0
        project = load_project(out_file)
        types = project.compute_tim().types
        assert types["Code"] == len(CODE_FILES)
        assert types.get("Functional Requirement", 0) >= 1
        assert types.get("Feature", 0) >= 1
        assert project.summary is not None
        for artifact in project.artifacts.values():
            if artifact.type == "Code":
                assert artifact.summary

    def test_rerun_is_byte_identical(self, codebase, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        assert run(capsys, "onboard", "--dir", str(codebase), "--out", str(a))[0] == 0
        assert run(capsys, "onboard", "--dir", str(codebase), "--out", str(b))[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_missing_dir_is_user_error(self, tmp_path, capsys):
        code, _, err = run(
            capsys, "onboard", "--dir", str(tmp_path / "nope"),
            "--out", str(tmp_path / "p.json"),
        )
        assert code == 1
        assert "PathNotFound" in err or "failed" in err


class TestImportCommand:
    def test_import_creates_project_file(self, codebase, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        code, out, _ = run(
            capsys, "import", "--project", str(project_file), "--create",
            "--dir", str(codebase), "--json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["artifactsCreated"] == len(CODE_FILES)
        assert load_project(project_file).artifacts

    def test_import_table_and_matrix(self, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        table = tmp_path / "reqs.csv"
        table.write_text(
            "id,type,name,body\nR1,Requirement,R1,The system shall brake.\n"
            "C1,Code,C1,brake code\n",
            encoding="utf-8",
        )
        matrix = tmp_path / "m.csv"
        matrix.write_text("child_id,parent_id\nC1,R1\n", encoding="utf-8")
        assert run(capsys, "import", "--project", str(project_file), "--create",
                   "--table", str(table))[0] == 0
        assert run(capsys, "import", "--project", str(project_file),
                   "--matrix", str(matrix))[0] == 0
        project = load_project(project_file)
        assert ("C1", "R1") in project.links


class TestTraceCommand:
    def test_pending_links_printed_with_scores(self, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        project = build_walkthrough_project()
        project.upsert_artifact(
            __import__("rootwb.model", fromlist=["Artifact"]).Artifact(
                id="db/save.py", type="Code", name="db/save.py",
                body="# Saving entities to the database.\nsave(entities, database)",
            )
        )
        save_project(project, project_file)
        code, out, _ = run(
            capsys, "trace", "--project", str(project_file),
            "--child", "Code", "--parent", "Requirement",
        )
        assert code == 0
        assert "db/save.py -> R4" in out
        assert "score=" in out
        stored = load_project(project_file)
        assert stored.links[("db/save.py", "R4")].status == "pending"


class TestHealthCommand:
    def test_walkthrough_findings(self, tmp_path, capsys, contradiction_table):
        project_file = tmp_path / "p.json"
        save_project(build_walkthrough_project(), project_file)
        code, out, _ = run(
            capsys, "health", "--project", str(project_file), "R1",
            "--mock-contradictions", str(contradiction_table), "--json",
        )
        assert code == 0
        doc = json.loads(out)
        kinds = {(f["kind"], f["subject"]) for f in doc["findings"]}
        assert ("cited-concept", "Job") in kinds
        assert ("predicted-concept", "Database Entity") in kinds
        assert ("undefined-concept", "system") in kinds
        assert ("contradiction", "R4") in kinds


class TestOtherCommands:
    def test_concepts_extract_and_add(self, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        save_project(build_walkthrough_project(), project_file)
        code, out, _ = run(
            capsys, "concepts", "--project", str(project_file), "--extract", "--json"
        )
        assert code == 0
        assert json.loads(out)["candidates"]
        code, _, _ = run(
            capsys, "concepts", "--project", str(project_file),
            "--add", "Latency", "--definition", "Time between request and response.",
        )
        assert code == 0
        assert "latency" in load_project(project_file).concepts

    def test_chat_cites(self, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        save_project(build_walkthrough_project(), project_file)
        code, out, _ = run(
            capsys, "chat", "--project", str(project_file),
            "--question", "database entities", "--json",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["citedArtifactIds"]

    def test_search(self, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        save_project(build_walkthrough_project(), project_file)
        code, out, _ = run(
            capsys, "search", "--project", str(project_file),
            "--query", "database", "--json",
        )
        assert code == 0
        assert json.loads(out)["results"]

    def test_export_roundtrip(self, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        save_project(build_walkthrough_project(), project_file)
        code, out, _ = run(capsys, "export", "--project", str(project_file), "--json")
        assert code == 0
        assert json.loads(out)["schema_version"] == 1

    def test_summarize_then_gen_docs(self, codebase, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        run(capsys, "import", "--project", str(project_file), "--create",
            "--dir", str(codebase))
        assert run(capsys, "summarize", "--project", str(project_file))[0] == 0
        assert run(capsys, "gen-docs", "--project", str(project_file))[0] == 0
        project = load_project(project_file)
        assert any(a.type == "Feature" for a in project.artifacts.values())


class TestExitCodes:
    def test_bad_command(self, capsys):
        assert run(capsys, "badcmd")[0] == 1

    def test_no_command(self, capsys):
        assert run(capsys)[0] == 1

    def test_missing_required_flag(self, capsys):
        assert run(capsys, "trace", "--project", "x.json")[0] == 1

    def test_json_mode_emits_exactly_one_document(self, tmp_path, capsys):
        project_file = tmp_path / "p.json"
        save_project(build_walkthrough_project(), project_file)
        code, out, _ = run(
            capsys, "search", "--project", str(project_file),
            "--query", "job", "--json",
        )
        assert code == 0
        json.loads(out)  # a single parseable document on stdout


class TestJsonSchemas:
    """Every --json output validates against the shipped schema file."""

    @pytest.fixture
    def schemas(self):
        from importlib import resources

        doc = json.loads(
            resources.files("rootwb.data").joinpath("cli_schemas.json").read_text("utf-8")
        )
        import jsonschema

        def validate(command: str, payload: dict):
            schema = dict(doc["commands"][command])
            schema["definitions"] = doc["definitions"]
            jsonschema.validate(payload, schema)

        return validate

    def test_all_command_outputs_validate(
        self, codebase, tmp_path, capsys, contradiction_table, schemas
    ):
        project_file = tmp_path / "p.json"

        code, out, _ = run(capsys, "import", "--project", str(project_file),
                           "--create", "--dir", str(codebase), "--json")
        assert code == 0
        schemas("import", json.loads(out))

        code, out, _ = run(capsys, "summarize", "--project", str(project_file), "--json")
        assert code == 0
        schemas("summarize", json.loads(out))

        code, out, _ = run(capsys, "gen-docs", "--project", str(project_file), "--json")
        assert code == 0
        schemas("gen-docs", json.loads(out))

        code, out, _ = run(capsys, "trace", "--project", str(project_file),
                           "--child", "Code", "--parent", "Functional Requirement",
                           "--threshold", "0.0", "--json")
        assert code == 0
        schemas("trace", json.loads(out))

        save_project(build_walkthrough_project(), project_file)
        code, out, _ = run(capsys, "health", "--project", str(project_file), "R1",
                           "--mock-contradictions", str(contradiction_table), "--json")
        assert code == 0
        schemas("health", json.loads(out))

        code, out, _ = run(capsys, "concepts", "--project", str(project_file),
                           "--extract", "--json")
        assert code == 0
        schemas("concepts", json.loads(out))

        code, out, _ = run(capsys, "chat", "--project", str(project_file),
                           "--question", "database", "--json")
        assert code == 0
        schemas("chat", json.loads(out))

        code, out, _ = run(capsys, "search", "--project", str(project_file),
                           "--query", "job", "--json")
        assert code == 0
        schemas("search", json.loads(out))

        code, out, _ = run(capsys, "export", "--project", str(project_file), "--json")
        assert code == 0
        schemas("export", json.loads(out))

    def test_onboard_output_validates(self, codebase, tmp_path, capsys, schemas):
        out_file = tmp_path / "proj.json"
        code, out, _ = run(capsys, "onboard", "--dir", str(codebase),
                           "--out", str(out_file), "--json")
        assert code == 0
        schemas("onboard", json.loads(out))
        schemas("export", json.loads(out_file.read_text("utf-8")))


class TestCliApiEquivalence:
    def test_same_operations_same_project_file(self, codebase, tmp_path, capsys):
        # CLI route
        cli_file = tmp_path / "cli.json"
        run(capsys, "import", "--project", str(cli_file), "--create",
            "--name", "equiv", "--dir", str(codebase))
        run(capsys, "summarize", "--project", str(cli_file))
        run(capsys, "gen-docs", "--project", str(cli_file))

        # API route, same operation sequence
        from fastapi.testclient import TestClient

        from rootwb.engine import Engine
        from rootwb.server import create_app

        engine = Engine()
        with TestClient(create_app(engine)) as client:
            client.post("/projects", json={"id": "P1", "name": "equiv"})
            client.post(
                "/projects/P1/import/directory", json={"path": str(codebase)}
            )
            for kind, params in (
                ("summarize", {}),
                ("generate-layer",
                 {"sourceType": "Code", "targetType": "Functional Requirement"}),
                ("generate-layer",
                 {"sourceType": "Functional Requirement", "targetType": "Feature"}),
            ):
                job = client.post(
                    "/projects/P1/jobs", json={"kind": kind, "params": params}
                ).json()
                engine.jobs.wait(job["jobId"], timeout=30)
            api_doc = client.get("/projects/P1").json()
        engine.shutdown()

        cli_doc = json.loads(cli_file.read_text("utf-8"))
        # same artifacts, links, concepts, and summary; revisions may differ
        # because the CLI writes intermediate files
        for key in ("artifacts", "links", "concepts", "findings"):
            assert cli_doc[key] == api_doc[key]
        assert cli_doc["project"]["summary"] == api_doc["project"]["summary"]
