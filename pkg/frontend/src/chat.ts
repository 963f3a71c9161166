// Chat route: question bubbles, answer cards, "More answers" buttons.

import type { ApiClient, ConversationTurn, PassagePayload } from "./api.js";

function answerCard(payload: PassagePayload): HTMLElement {
  const card = document.createElement("div");
  card.className = "answer-card";
  const text = document.createElement("p");
  text.textContent = payload.text;
  card.appendChild(text);
  if (payload.source_url) {
    const source = document.createElement("a");
    source.className = "source-link";
    source.href = payload.source_url;
    source.textContent = "Source:";
    card.appendChild(source);
  }
  return card;
}

/**
 * Render one conversation turn: the user's question, the best-match
 * answer, and up to four more-answer buttons in payload order. Buttons
 * expand the corresponding answer card and report the selection.
 */
export function renderTurn(
  turn: ConversationTurn,
  onMoreAnswer?: (passageId: string | null) => void,
): HTMLElement {
  const root = document.createElement("div");
  root.className = "turn";
  try {
    const user = document.createElement("div");
    user.className = "bubble user";
    user.textContent = turn.user_text;
    root.appendChild(user);

    const answer = document.createElement("div");
    answer.className = "bubble answer";
    answer.appendChild(answerCard(turn.answer));
    root.appendChild(answer);

    if (turn.more_answers.length > 0) {
      const row = document.createElement("div");
      row.className = "more-answers";
      const label = document.createElement("span");
      label.textContent = "More answers:";
      row.appendChild(label);
      turn.more_answers.forEach((payload, i) => {
        const button = document.createElement("button");
        button.className = "more-answer-button";
        button.textContent = `${i + 2}`;
        button.dataset.passageId = payload.passage_id ?? "";
        button.addEventListener("click", () => {
          answer.appendChild(answerCard(payload));
          onMoreAnswer?.(payload.passage_id);
        });
        row.appendChild(button);
      });
      root.appendChild(row);
    }
  } catch {
    const fallback = document.createElement("div");
    fallback.className = "bubble fallback";
    fallback.textContent = "Could not display this answer.";
    root.replaceChildren(fallback);
  }
  return root;
}

export class ChatView {
  private pending = false;

  constructor(
    private api: ApiClient,
    private sessionId: string,
    private container: HTMLElement,
    private input: HTMLInputElement,
    private sendButton: HTMLButtonElement,
  ) {
    this.sendButton.addEventListener("click", () => void this.send());
  }

  async send(): Promise<void> {
    const text = this.input.value.trim();
    if (!text || this.pending) {
      return;
    }
    this.pending = true;
    this.sendButton.disabled = true;
    try {
      const turn = await this.api.sendMessage(this.sessionId, text);
      const view = renderTurn(turn, (passageId) => {
        void this.api.sendEvent(this.sessionId, {
          turn_id: turn.turn_id,
          kind: "more_answer_selected",
          target_passage_id: passageId,
        });
      });
      this.attachReactions(view, turn);
      this.container.appendChild(view);
      this.input.value = "";
    } finally {
      this.pending = false;
      this.sendButton.disabled = false;
    }
  }

  private attachReactions(view: HTMLElement, turn: ConversationTurn): void {
    const row = document.createElement("div");
    row.className = "reactions";
    for (const kind of ["like", "emoji"] as const) {
      const button = document.createElement("button");
      button.className = `reaction-${kind}`;
      button.textContent = kind === "like" ? "👍" : "🙂";
      button.addEventListener("click", () => {
        void this.api.sendEvent(this.sessionId, {
          turn_id: turn.turn_id,
          kind,
          target_passage_id: turn.answer.passage_id,
          payload: button.textContent ?? "",
        });
      });
      row.appendChild(button);
    }
    view.appendChild(row);
  }
}
