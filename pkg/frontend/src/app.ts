// Application shell: project picker, TIM overview, mode tabs (tree, table,
// chat), detail side panel, and the jobs strip. All engine state flows
// through the ApiClient.

import { ApiClient } from "./api.js";
import { renderChatPanel } from "./chat.js";
import { openDetailPanel } from "./detail.js";
import { renderJobsStrip } from "./jobs.js";
import { enableTree, initialViewState, type UiViewState } from "./state.js";
import { renderArtifactRows, renderLinkRows } from "./table.js";
import { renderTree } from "./tree.js";
import type { ProjectDoc, Tim } from "./types.js";

export class App {
  state: UiViewState = initialViewState(0);
  doc: ProjectDoc | null = null;

  constructor(
    private root: HTMLElement,
    public api: ApiClient,
  ) {}

  async start(): Promise<void> {
    const projects = await this.api.listProjects();
    if (projects.length === 0) {
      this.root.innerHTML = "<p class='empty-state'>No projects loaded.</p>";
      return;
    }
    this.api.projectId = projects[0].id;
    await this.reload();
  }

  async reload(): Promise<void> {
    this.doc = await this.api.getProject();
    if (this.root.querySelector(".layout") === null) {
      this.state = initialViewState(this.doc.artifacts.length);
      this.buildShell();
    }
    await this.renderAll();
  }

  private buildShell(): void {
    const doc = this.root.ownerDocument;
    this.root.innerHTML = `
      <header class="topbar">
        <h1 class="project-name"></h1>
        <div class="tim-overview"></div>
        <div class="jobs-strip"></div>
      </header>
      <nav class="tabs">
        <button data-mode="tree" class="tab">Tree</button>
        <button data-mode="table" class="tab">Table</button>
        <button data-mode="chat" class="tab">Chat</button>
      </nav>
      <main class="layout">
        <section class="content"></section>
        <aside class="detail-panel"></aside>
      </main>
    `;
    for (const button of this.root.querySelectorAll<HTMLButtonElement>(".tab")) {
      button.addEventListener("click", () => {
        const mode = button.dataset.mode as UiViewState["mode"];
        if (mode === "tree" && !this.state.treeEnabled) {
          const confirmed =
            doc.defaultView?.confirm?.(
              "This project is large; the tree view is disabled by default. Enable it?",
            ) ?? true;
          if (!confirmed) return;
          enableTree(this.state);
        }
        this.state.mode = mode;
        void this.renderAll();
      });
    }
  }

  private async renderAll(): Promise<void> {
    if (!this.doc) return;
    const header = this.root.querySelector<HTMLElement>(".project-name");
    if (header) header.textContent = this.doc.project.name;

    renderTimOverview(
      this.root.querySelector<HTMLElement>(".tim-overview")!,
      await this.api.getTim(),
    );
    renderJobsStrip(
      this.root.querySelector<HTMLElement>(".jobs-strip")!,
      await this.api.listJobs().catch(() => []),
    );

    for (const button of this.root.querySelectorAll<HTMLButtonElement>(".tab")) {
      button.classList.toggle("active", button.dataset.mode === this.state.mode);
      if (button.dataset.mode === "tree") {
        button.classList.toggle("gated", !this.state.treeEnabled);
      }
    }

    const content = this.root.querySelector<HTMLElement>(".content")!;
    if (this.state.mode === "tree") {
      await this.renderTreeMode(content);
    } else if (this.state.mode === "table") {
      await this.renderTableMode(content);
    } else {
      renderChatPanel(content, this.api, { onCite: (aid) => this.openDetail(aid) });
    }
  }

  private async renderTreeMode(content: HTMLElement): Promise<void> {
    if (!this.doc) return;
    content.innerHTML = "";
    const bar = content.ownerDocument.createElement("div");
    bar.className = "tree-bar";
    if (this.state.focusedView) {
      const back = content.ownerDocument.createElement("button");
      back.className = "btn-unfocus";
      back.textContent = `Focused on ${this.state.focusedView.rootId} — show all`;
      back.addEventListener("click", () => {
        this.state.focusedView = null;
        void this.renderAll();
      });
      bar.appendChild(back);
    }
    content.appendChild(bar);
    const canvas = content.ownerDocument.createElement("div");
    canvas.className = "tree-canvas";
    content.appendChild(canvas);
    renderTree(canvas, this.doc.artifacts, this.doc.links, this.state, {
      onSelect: (aid) => this.openDetail(aid),
      onFocus: (aid) => void this.focusOn(aid),
      onToggle: () => void this.renderAll(),
    });
  }

  async focusOn(artifactId: string, up = 2, down = 2): Promise<void> {
    this.state.focusedView = await this.api.getView(artifactId, up, down);
    this.state.mode = "tree";
    enableTree(this.state); // a focused view is small by construction
    await this.renderAll();
  }

  private async renderTableMode(content: HTMLElement): Promise<void> {
    if (!this.doc) return;
    const doc = content.ownerDocument;
    content.innerHTML = `
      <div class="table-controls">
        <input class="search-input" type="search" placeholder="Fuzzy search…" />
        <select class="type-filter"><option value="">All types</option></select>
        <select class="sort-order">
          <option value="score">By score</option>
          <option value="id">By id</option>
          <option value="name">By name</option>
          <option value="type">By type</option>
        </select>
        <label class="subtab"><input type="radio" name="subtab" value="artifacts" checked /> Artifacts</label>
        <label class="subtab"><input type="radio" name="subtab" value="links" /> Links</label>
      </div>
      <table class="artifact-table">
        <thead><tr><th>Id</th><th>Type</th><th>Name</th><th>Score</th><th>⚑</th></tr></thead>
        <tbody></tbody>
      </table>
      <table class="links-table" hidden>
        <thead><tr><th>Child</th><th>Parent</th><th>Score</th><th>Status</th><th>Explanation</th><th></th></tr></thead>
        <tbody></tbody>
      </table>
    `;
    const typeFilter = content.querySelector<HTMLSelectElement>(".type-filter")!;
    for (const typeName of [...new Set(this.doc.artifacts.map((a) => a.type))].sort()) {
      const option = doc.createElement("option");
      option.value = typeName;
      option.textContent = typeName;
      typeFilter.appendChild(option);
    }

    const artifactTable = content.querySelector<HTMLTableElement>(".artifact-table")!;
    const linksTable = content.querySelector<HTMLTableElement>(".links-table")!;
    const searchInput = content.querySelector<HTMLInputElement>(".search-input")!;
    const sortOrder = content.querySelector<HTMLSelectElement>(".sort-order")!;

    const refreshArtifacts = async () => {
      // ranking comes from the engine's /search — single source of truth
      const rows = await this.api.search({
        q: searchInput.value,
        type: typeFilter.value || undefined,
        sort: sortOrder.value,
        limit: 200,
      });
      renderArtifactRows(artifactTable.tBodies[0], rows, {
        onSelect: (aid) => this.openDetail(aid),
      });
    };
    const refreshLinks = async () => {
      const links = await this.api.getLinks();
      renderLinkRows(linksTable.tBodies[0], links, this.api, {
        onLinksChanged: () => {
          void this.api.getProject().then((projectDoc) => {
            this.doc = projectDoc;
            void this.api.getTim().then((tim) =>
              renderTimOverview(
                this.root.querySelector<HTMLElement>(".tim-overview")!,
                tim,
              ),
            );
          });
        },
        onSelect: (aid) => this.openDetail(aid),
      });
    };

    searchInput.addEventListener("input", () => void refreshArtifacts());
    typeFilter.addEventListener("change", () => void refreshArtifacts());
    sortOrder.addEventListener("change", () => void refreshArtifacts());
    for (const radio of content.querySelectorAll<HTMLInputElement>("input[name=subtab]")) {
      radio.addEventListener("change", () => {
        const links = radio.value === "links" && radio.checked;
        artifactTable.hidden = links;
        linksTable.hidden = !links;
      });
    }

    await refreshArtifacts();
    await refreshLinks();
  }

  openDetail(artifactId: string): void {
    const panel = this.root.querySelector<HTMLElement>(".detail-panel")!;
    void openDetailPanel(panel, this.api, artifactId, {
      onChanged: () => void this.reload(),
    });
  }
}

export function renderTimOverview(container: HTMLElement, tim: Tim): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";
  for (const [typeName, count] of Object.entries(tim.types)) {
    const badge = doc.createElement("span");
    badge.className = "tim-badge";
    badge.dataset.type = typeName;
    badge.textContent = `${typeName} ${count}`;
    container.appendChild(badge);
  }
  for (const relation of tim.relations) {
    const badge = doc.createElement("span");
    badge.className = "tim-relation";
    badge.textContent = `${relation.childType} → ${relation.parentType} (${relation.linkCount})`;
    container.appendChild(badge);
  }
}

export function mount(root: HTMLElement, base = ""): App {
  const app = new App(root, new ApiClient(base));
  void app.start();
  return app;
}
