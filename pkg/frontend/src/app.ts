// Entry point: wires the chat and assessment views to the page.

import { ApiClient } from "./api.js";
import { ChatView } from "./chat.js";
import { AssessView } from "./assess.js";

function param(name: string, fallback: string): string {
  return new URLSearchParams(window.location.search).get(name) ?? fallback;
}

export function boot(doc: Document = document): void {
  const api = new ApiClient(param("api", ""));
  const route = window.location.pathname.endsWith("/assess") ? "assess" : "chat";

  if (route === "assess") {
    const container = doc.getElementById("assess-root");
    if (!container) {
      return;
    }
    const view = new AssessView(
      api,
      param("topic", "t1"),
      param("assessor", "anon"),
      container,
    );
    void view.start();
    return;
  }

  const container = doc.getElementById("chat-root");
  const input = doc.getElementById("chat-input") as HTMLInputElement | null;
  const send = doc.getElementById("chat-send") as HTMLButtonElement | null;
  if (!container || !input || !send) {
    return;
  }
  const sessionId = param("session", `s-${Date.now()}`);
  const chat = new ChatView(api, sessionId, container, input, send);
  input.addEventListener("keydown", (e) => {
    if (e.key === "Enter") {
      void chat.send();
    }
  });
}

if (typeof window !== "undefined" && !("__TEST__" in window)) {
  boot();
}
