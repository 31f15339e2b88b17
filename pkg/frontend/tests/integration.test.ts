// Browser-style integration tests against a real running engine.
//
// A child process serves two canonical project files (a small review
// fixture with one pending link, and a 600-artifact project for the tree
// gate); the UI runs in jsdom and talks to it over real HTTP.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App } from "../src/app.js";

const PORT = 8930 + Math.floor(Math.random() * 40);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

function reviewFixture(): unknown {
  return {
    schema_version: 1,
    project: { id: "REV", name: "review fixture", revision: 9 },
    artifacts: [
      { id: "ctrl/brake.c", type: "Code", name: "ctrl/brake.c",
        body: "// braking controller\nvoid brake_engage(void) {}",
        provenance: "imported", attributes: {} },
      { id: "FR1", type: "Functional Requirement", name: "Brake engagement",
        body: "The system shall engage the brake actuator when braking is requested.",
        provenance: "manual", attributes: {} },
      { id: "F1", type: "Feature", name: "Braking",
        body: "Braking sub-system: brake control and actuation.",
        provenance: "manual", attributes: {} },
    ],
    links: [
      { childId: "ctrl/brake.c", parentId: "FR1", score: 0.61, status: "pending",
        createdBy: "trace-engine" },
      { childId: "FR1", parentId: "F1", status: "approved", createdBy: "docgen",
        score: 0.8 },
    ],
    concepts: [],
    findings: [],
  };
}

function bigFixture(count: number): unknown {
  const artifacts = [];
  for (let i = 0; i < count; i += 1) {
    artifacts.push({
      id: `A${i}`,
      type: "Requirement",
      name: `Requirement ${i}`,
      body: `The system shall handle case ${i}.`,
      provenance: "imported",
      attributes: {},
    });
  }
  return {
    schema_version: 1,
    project: { id: "BIG", name: "big project", revision: 1 },
    artifacts,
    links: [],
    concepts: [],
    findings: [],
  };
}

async function waitForServer(): Promise<void> {
  for (let attempt = 0; attempt < 100; attempt += 1) {
    try {
      const response = await fetch(`${BASE}/projects`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }
  throw new Error("engine did not come up");
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "rootwb-ui-"));
  const reviewPath = join(dir, "review.json");
  const bigPath = join(dir, "big.json");
  writeFileSync(reviewPath, JSON.stringify(reviewFixture(), null, 2));
  writeFileSync(bigPath, JSON.stringify(bigFixture(600), null, 2));
  server = spawn(
    "python3",
    ["-m", "rootwb.cli", "serve", "--project", reviewPath, "--project", bigPath,
     "--host", "127.0.0.1", "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

function freshRoot(): HTMLElement {
  document.body.innerHTML = "";
  const root = document.createElement("div");
  document.body.appendChild(root);
  return root;
}

async function settle(ms = 250): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, ms));
}

describe("review flow against the engine", () => {
  it("approving a pending link turns the dotted edge solid and updates the links tab", async () => {
    const root = freshRoot();
    const app = new App(root, new ApiClient(BASE, "REV"));
    await app.reload();
    await settle();

    // tree first: exactly one dotted edge for the pending link
    expect(app.state.mode).toBe("tree");
    const dottedBefore = [...root.querySelectorAll(".edge")].filter(
      (edge) => edge.getAttribute("stroke-dasharray") !== null,
    );
    expect(dottedBefore.length).toBe(1);

    // switch to the table's links tab and approve through the UI
    app.state.mode = "table";
    await app.reload();
    await settle();
    const pendingRow = root.querySelector<HTMLTableRowElement>(".link-row.link-pending")!;
    expect(pendingRow).not.toBeNull();
    pendingRow.querySelector<HTMLButtonElement>(".btn-approve")!.click();
    await settle(400);
    expect(pendingRow.classList.contains("link-approved")).toBe(true);
    expect(pendingRow.querySelector(".col-status")!.textContent).toBe("approved");

    // server state really changed
    const api = new ApiClient(BASE, "REV");
    const links = await api.getLinks();
    const reviewed = links.find((l) => l.childId === "ctrl/brake.c")!;
    expect(reviewed.status).toBe("approved");
    expect(reviewed.reviewedBy).toBe("webui");

    // tree re-render: the dotted edge is now solid
    app.state.mode = "tree";
    await app.reload();
    await settle();
    const edges = [...root.querySelectorAll(".edge")];
    expect(edges.length).toBe(2);
    expect(
      edges.filter((edge) => edge.getAttribute("stroke-dasharray") !== null).length,
    ).toBe(0);
  });

  it("chat citation buttons open the matching artifact detail panel", async () => {
    const root = freshRoot();
    const app = new App(root, new ApiClient(BASE, "REV"));
    await app.reload();
    await settle();

    app.state.mode = "chat";
    await app.reload();
    await settle();
    const input = root.querySelector<HTMLInputElement>(".chat-input")!;
    input.value = "How does braking work?";
    input.dispatchEvent(new window.Event("input", { bubbles: true }));
    root.querySelector("form.chat-form")!.dispatchEvent(
      new window.Event("submit", { bubbles: true }),
    );
    await settle(500);

    const citations = [...root.querySelectorAll<HTMLButtonElement>(".citation")];
    expect(citations.length).toBeGreaterThan(0);
    const target = citations[0].dataset.artifact!;
    citations[0].click();
    await settle(400);

    const panel = root.querySelector<HTMLElement>(".detail-panel")!;
    expect(panel.classList.contains("open")).toBe(true);
    expect(panel.dataset.artifact).toBe(target);
    // the panel shows the artifact's body or summary
    expect(panel.querySelector(".detail-body")!.textContent!.length).toBeGreaterThan(0);
  });
});

describe("tree gating against the engine", () => {
  it("a 600-artifact project opens in table mode with the tree disabled", async () => {
    const root = freshRoot();
    const app = new App(root, new ApiClient(BASE, "BIG"));
    await app.reload();
    await settle();
    expect(app.state.mode).toBe("table");
    expect(app.state.treeEnabled).toBe(false);
    expect(root.querySelector(".artifact-table")).not.toBeNull();
    const treeTab = root.querySelector<HTMLButtonElement>("button[data-mode=tree]")!;
    expect(treeTab.classList.contains("gated")).toBe(true);
  });

  it("a small project opens with the tree available", async () => {
    const root = freshRoot();
    const app = new App(root, new ApiClient(BASE, "REV"));
    await app.reload();
    await settle();
    expect(app.state.treeEnabled).toBe(true);
    expect(app.state.mode).toBe("tree");
  });
});

describe("focused view via the engine", () => {
  it("double-clicking a node re-centers on the API-provided view", async () => {
    const root = freshRoot();
    const app = new App(root, new ApiClient(BASE, "REV"));
    await app.reload();
    await settle();

    const node = root.querySelector(".node[data-id='FR1']")!;
    node.dispatchEvent(new window.MouseEvent("dblclick", { bubbles: true }));
    await settle(400);

    expect(app.state.focusedView).not.toBeNull();
    expect(app.state.focusedView!.rootId).toBe("FR1");
    // focused view keeps the unfocus control visible
    expect(root.querySelector(".btn-unfocus")).not.toBeNull();
  });
});
