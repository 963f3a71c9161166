// Thin typed client over the search service's HTTP API.

export interface HighlightSpan {
  start: number;
  end: number;
  term: string;
}

export interface PassagePayload {
  passage_id: string | null;
  text: string;
  doc_id: string | null;
  source_url: string | null;
}

export interface AssessmentItem extends PassagePayload {
  highlights: HighlightSpan[];
  question: string;
}

export interface ConversationTurn {
  session_id: string;
  turn_id: string;
  user_text: string;
  answer: PassagePayload;
  more_answers: PassagePayload[];
  timestamp: number;
  clarifying_question: string | null;
}

export type EventKind = "click" | "like" | "emoji" | "more_answer_selected";

export interface InteractionEvent {
  turn_id: string;
  kind: EventKind;
  target_passage_id?: string | null;
  payload?: string;
}

export type AssessmentResponse =
  | { done: true }
  | { done: false; item: AssessmentItem };

async function asJson<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    throw new Error(`${resp.status} ${await resp.text()}`);
  }
  return resp.json() as Promise<T>;
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private url(path: string): string {
    return this.baseUrl + path;
  }

  async sendMessage(sessionId: string, text: string): Promise<ConversationTurn> {
    const resp = await fetch(this.url(`/chat/${sessionId}/message`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ text }),
    });
    return asJson(resp);
  }

  async sendEvent(sessionId: string, event: InteractionEvent): Promise<void> {
    const resp = await fetch(this.url(`/chat/${sessionId}/event`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(event),
    });
    await asJson(resp);
  }

  async nextAssessment(topicId: string, assessor: string): Promise<AssessmentResponse> {
    const resp = await fetch(
      this.url(`/assess/${topicId}/next?assessor=${encodeURIComponent(assessor)}`),
    );
    return asJson(resp);
  }

  async submitJudgment(
    topicId: string,
    passageId: string,
    grade: 0 | 1 | 2,
    assessor: string,
  ): Promise<void> {
    const resp = await fetch(this.url(`/assess/${topicId}/judgment`), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ passage_id: passageId, grade, assessor }),
    });
    await asJson(resp);
  }
}
