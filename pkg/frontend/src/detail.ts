// Artifact detail side panel: description and further details, reviewer
// flagging, and this artifact's health findings with resolution actions.

import type { ApiClient } from "./api.js";
import type { Artifact, FindingKind, HealthFinding } from "./types.js";

const KIND_LABELS: Record<FindingKind, string> = {
  "cited-concept": "Cited concept",
  "predicted-concept": "Predicted concept",
  "undefined-concept": "Undefined concept",
  contradiction: "Contradiction",
  ambiguity: "Ambiguity",
  warning: "Warning",
};

export interface DetailCallbacks {
  onChanged?: () => void;
}

export async function openDetailPanel(
  panel: HTMLElement,
  api: ApiClient,
  artifactId: string,
  callbacks: DetailCallbacks = {},
): Promise<void> {
  const doc = panel.ownerDocument;
  const artifact = await api.getArtifact(artifactId);
  const findings = await api.getFindings(artifactId);

  panel.innerHTML = "";
  panel.classList.add("open");
  panel.dataset.artifact = artifact.id;

  const close = doc.createElement("button");
  close.className = "panel-close";
  close.textContent = "×";
  close.addEventListener("click", () => {
    panel.classList.remove("open");
    panel.innerHTML = "";
  });
  panel.appendChild(close);

  const title = doc.createElement("h2");
  title.className = "detail-name";
  title.textContent = artifact.name;
  panel.appendChild(title);

  const meta = doc.createElement("p");
  meta.className = "detail-meta";
  meta.textContent = `${artifact.type} · ${artifact.id} · ${artifact.provenance}`;
  panel.appendChild(meta);

  if (artifact.flagged) {
    const flag = doc.createElement("p");
    flag.className = "detail-flag";
    flag.textContent = `⚑ ${artifact.flagged}`;
    panel.appendChild(flag);
  }

  if (artifact.summary) {
    const summary = doc.createElement("p");
    summary.className = "detail-summary";
    summary.textContent = artifact.summary;
    panel.appendChild(summary);
  }

  const body = doc.createElement("pre");
  body.className = "detail-body";
  body.textContent = artifact.body;
  panel.appendChild(body);

  const actions = doc.createElement("div");
  actions.className = "detail-actions";
  const flagButton = doc.createElement("button");
  flagButton.textContent = artifact.flagged ? "Clear flag" : "Flag for review";
  flagButton.addEventListener("click", async () => {
    const note = artifact.flagged
      ? ""
      : (doc.defaultView?.prompt?.("Flag note:") ?? "needs review");
    if (note === null) return;
    await api.flagArtifact(artifact.id, note);
    callbacks.onChanged?.();
    await openDetailPanel(panel, api, artifactId, callbacks);
  });
  actions.appendChild(flagButton);

  if (artifact.type !== "Code") {
    const healthButton = doc.createElement("button");
    healthButton.className = "btn-health";
    healthButton.textContent = "Run health check";
    healthButton.addEventListener("click", async () => {
      healthButton.disabled = true;
      await api.runHealth(artifact.id);
      callbacks.onChanged?.();
      await openDetailPanel(panel, api, artifactId, callbacks);
    });
    actions.appendChild(healthButton);
  }
  panel.appendChild(actions);

  panel.appendChild(renderFindings(doc, findings, api, () => {
    callbacks.onChanged?.();
    void openDetailPanel(panel, api, artifactId, callbacks);
  }));
}

function renderFindings(
  doc: Document,
  findings: HealthFinding[],
  api: ApiClient,
  refresh: () => void,
): HTMLElement {
  const section = doc.createElement("section");
  section.className = "findings";
  const heading = doc.createElement("h3");
  heading.textContent = findings.length > 0 ? "Health findings" : "No health findings";
  section.appendChild(heading);

  for (const finding of findings) {
    const item = doc.createElement("div");
    // each kind gets its own visual treatment via the kind class
    item.className = `finding finding-${finding.kind} finding-${finding.state}`;
    item.dataset.finding = finding.id;

    const label = doc.createElement("span");
    label.className = "finding-kind";
    label.textContent = KIND_LABELS[finding.kind] ?? finding.kind;
    item.appendChild(label);

    const subject = doc.createElement("strong");
    subject.textContent = ` ${finding.subject} `;
    item.appendChild(subject);

    const text = doc.createElement("span");
    text.className = "finding-text";
    text.textContent = finding.explanation;
    item.appendChild(text);

    if (finding.state === "open") {
      const actions: Array<"resolve" | "dismiss" | "promote-term"> =
        finding.kind === "undefined-concept"
          ? ["promote-term", "resolve", "dismiss"]
          : ["resolve", "dismiss"];
      for (const action of actions) {
        const button = doc.createElement("button");
        button.className = `finding-action action-${action}`;
        button.textContent = action === "promote-term" ? "add to vocabulary" : action;
        button.addEventListener("click", async () => {
          button.disabled = true;
          await api.actOnFinding(finding.id, action);
          refresh();
        });
        item.appendChild(button);
      }
    } else {
      const state = doc.createElement("em");
      state.textContent = ` (${finding.state})`;
      item.appendChild(state);
    }
    section.appendChild(item);
  }
  return section;
}
