import { beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { renderChatPanel } from "../src/chat.js";
import { stubFetch } from "./helpers.js";

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

describe("chat panel", () => {
  let panel: HTMLElement;

  beforeEach(() => {
    document.body.innerHTML = "";
    panel = document.createElement("div");
    document.body.appendChild(panel);
  });

  it("disables send while the input is empty", () => {
    renderChatPanel(panel, new ApiClient("", "P1"));
    const send = panel.querySelector<HTMLButtonElement>("button[type=submit]")!;
    const input = panel.querySelector<HTMLInputElement>(".chat-input")!;
    expect(send.disabled).toBe(true);
    input.value = "braking";
    input.dispatchEvent(new window.Event("input", { bubbles: true }));
    expect(send.disabled).toBe(false);
  });

  it("renders one citation button per cited artifact", async () => {
    stubFetch({
      "/chat": () => ({
        text: "Based on the project: braking overview",
        citedArtifactIds: ["F1", "ctrl/brake.c"],
        usedK: 2,
      }),
    });
    const onCite = vi.fn();
    renderChatPanel(panel, new ApiClient("", "P1"), { onCite });
    const input = panel.querySelector<HTMLInputElement>(".chat-input")!;
    input.value = "how does braking work?";
    input.dispatchEvent(new window.Event("input", { bubbles: true }));
    panel.querySelector("form")!.dispatchEvent(new window.Event("submit", { bubbles: true }));
    await flush();

    const buttons = panel.querySelectorAll<HTMLButtonElement>(".citation");
    expect(buttons.length).toBe(2);
    expect(buttons[0].textContent).toBe("F1");

    buttons[1].click();
    expect(onCite).toHaveBeenCalledWith("ctrl/brake.c");
  });

  it("shows a retrieval-only fallback when the provider is down", async () => {
    stubFetch({
      "/chat": () => ({ text: "", citedArtifactIds: ["F1"], usedK: 1 }),
    });
    renderChatPanel(panel, new ApiClient("", "P1"));
    const input = panel.querySelector<HTMLInputElement>(".chat-input")!;
    input.value = "anything";
    input.dispatchEvent(new window.Event("input", { bubbles: true }));
    panel.querySelector("form")!.dispatchEvent(new window.Event("submit", { bubbles: true }));
    await flush();
    const assistant = panel.querySelector(".chat-assistant")!;
    expect(assistant.textContent).toContain("retrieved artifacts only");
    expect(panel.querySelectorAll(".citation").length).toBe(1);
  });
});
