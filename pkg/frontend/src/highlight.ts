// Pure rendering of highlighted passage text.

import type { HighlightSpan } from "./api.js";

export interface TextSegment {
  text: string;
  highlighted: boolean;
}

function spansConsistent(text: string, spans: HighlightSpan[]): boolean {
  let last = 0;
  for (const s of spans) {
    if (s.start < last || s.end <= s.start || s.end > text.length) {
      return false;
    }
    last = s.end;
  }
  return true;
}

/**
 * Split passage text into plain/highlighted segments. A pure function
 * of (text, spans); inconsistent spans (overlapping or out of bounds)
 * fall back to a single unhighlighted segment.
 */
export function segmentText(text: string, spans: HighlightSpan[]): TextSegment[] {
  const ordered = [...spans].sort((a, b) => a.start - b.start);
  if (!spansConsistent(text, ordered)) {
    return [{ text, highlighted: false }];
  }
  const segments: TextSegment[] = [];
  let pos = 0;
  for (const s of ordered) {
    if (s.start > pos) {
      segments.push({ text: text.slice(pos, s.start), highlighted: false });
    }
    segments.push({ text: text.slice(s.start, s.end), highlighted: true });
    pos = s.end;
  }
  if (pos < text.length) {
    segments.push({ text: text.slice(pos), highlighted: false });
  }
  return segments;
}

export function renderHighlightedText(text: string, spans: HighlightSpan[]): HTMLElement {
  const container = document.createElement("p");
  container.className = "passage-text";
  for (const seg of segmentText(text, spans)) {
    if (seg.highlighted) {
      const mark = document.createElement("mark");
      mark.textContent = seg.text;
      container.appendChild(mark);
    } else {
      container.appendChild(document.createTextNode(seg.text));
    }
  }
  return container;
}
