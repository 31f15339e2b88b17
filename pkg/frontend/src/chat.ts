// Chat panel: question box, answer text, and one clickable citation button
// per referenced artifact. Clicking a citation opens the detail panel.

import type { ApiClient } from "./api.js";

export interface ChatCallbacks {
  onCite?: (artifactId: string) => void;
}

export function renderChatPanel(
  container: HTMLElement,
  api: ApiClient,
  callbacks: ChatCallbacks = {},
): void {
  const doc = container.ownerDocument;
  container.innerHTML = "";

  const log = doc.createElement("div");
  log.className = "chat-log";
  container.appendChild(log);

  const form = doc.createElement("form");
  form.className = "chat-form";
  const input = doc.createElement("input");
  input.type = "text";
  input.placeholder = "Ask about this project…";
  input.className = "chat-input";
  const send = doc.createElement("button");
  send.type = "submit";
  send.textContent = "Send";
  send.disabled = true;
  input.addEventListener("input", () => {
    send.disabled = input.value.trim().length === 0;
  });
  form.appendChild(input);
  form.appendChild(send);
  container.appendChild(form);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const question = input.value.trim();
    if (!question) return;
    input.value = "";
    send.disabled = true;
    void ask(question);
  });

  async function ask(question: string): Promise<void> {
    appendBubble("user", question);
    try {
      const response = await api.chat(question);
      const bubble = appendBubble(
        "assistant",
        response.text || "(provider unavailable — showing retrieved artifacts only)",
      );
      if (response.citedArtifactIds.length > 0) {
        const strip = doc.createElement("div");
        strip.className = "citations";
        for (const artifactId of response.citedArtifactIds) {
          const button = doc.createElement("button");
          button.className = "citation";
          button.dataset.artifact = artifactId;
          button.textContent = artifactId;
          button.addEventListener("click", () => callbacks.onCite?.(artifactId));
          strip.appendChild(button);
        }
        bubble.appendChild(strip);
      }
    } catch (error) {
      appendBubble("error", error instanceof Error ? error.message : String(error));
    }
  }

  function appendBubble(role: string, text: string): HTMLElement {
    const bubble = doc.createElement("div");
    bubble.className = `chat-bubble chat-${role}`;
    const body = doc.createElement("p");
    body.textContent = text;
    bubble.appendChild(body);
    log.appendChild(bubble);
    return bubble;
  }
}
