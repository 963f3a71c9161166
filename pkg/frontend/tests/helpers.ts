// Shared fixtures and a recording fetch stub for view tests.

import { vi } from "vitest";
import type { ConversationTurn, PassagePayload } from "../src/api.js";

export function payload(i: number): PassagePayload {
  return {
    passage_id: `d${i}-0`,
    text: `Answer passage number ${i}.`,
    doc_id: `d${i}`,
    source_url: `/doc/d${i}`,
  };
}

export function turnWith(nMore: number): ConversationTurn {
  return {
    session_id: "s1",
    turn_id: "s1:1",
    user_text: "how much nitrogen for wheat",
    answer: payload(0),
    more_answers: Array.from({ length: nMore }, (_, i) => payload(i + 1)),
    timestamp: 1_700_000_000,
    clarifying_question: null,
  };
}

export interface RecordedCall {
  url: string;
  method: string;
  body: unknown;
}

/**
 * Install a fetch stub that records calls and answers each with the
 * next queued JSON response (the last response repeats).
 */
export function stubFetch(responses: unknown[]): RecordedCall[] {
  const calls: RecordedCall[] = [];
  let i = 0;
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => {
      calls.push({
        url: String(url),
        method: init?.method ?? "GET",
        body: init?.body ? JSON.parse(String(init.body)) : null,
      });
      const data = responses[Math.min(i, responses.length - 1)];
      i += 1;
      return {
        ok: true,
        status: 200,
        json: async () => data,
        text: async () => JSON.stringify(data),
      } as Response;
    }),
  );
  return calls;
}

export function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}
