// Assessment route: judge pooled passages one at a time.

import type { ApiClient, AssessmentItem } from "./api.js";
import { renderHighlightedText } from "./highlight.js";

export const GRADE_LABELS: ReadonlyArray<[0 | 1 | 2, string]> = [
  [2, "Relevant"],
  [1, "Marginally relevant"],
  [0, "Not relevant"],
];

/** Render a single assessment item: question, highlighted passage, grade buttons. */
export function renderAssessmentItem(
  item: AssessmentItem,
  onGrade: (grade: 0 | 1 | 2) => void,
): HTMLElement {
  const root = document.createElement("div");
  root.className = "assessment-item";

  const question = document.createElement("h2");
  question.className = "assessment-question";
  question.textContent = item.question;
  root.appendChild(question);

  root.appendChild(renderHighlightedText(item.text, item.highlights));

  if (item.source_url) {
    const source = document.createElement("a");
    source.className = "source-link";
    source.href = item.source_url;
    source.textContent = "Source:";
    root.appendChild(source);
  }

  const row = document.createElement("div");
  row.className = "grade-buttons";
  for (const [grade, label] of GRADE_LABELS) {
    const button = document.createElement("button");
    button.className = `grade-button grade-${grade}`;
    button.textContent = label;
    button.addEventListener("click", () => onGrade(grade));
    row.appendChild(button);
  }
  root.appendChild(row);
  return root;
}

export class AssessView {
  private pending = false;
  private judged = 0;
  private current: AssessmentItem | null = null;

  constructor(
    private api: ApiClient,
    private topicId: string,
    private assessor: string,
    private container: HTMLElement,
  ) {}

  async start(): Promise<void> {
    await this.advance();
  }

  private async advance(): Promise<void> {
    const resp = await this.api.nextAssessment(this.topicId, this.assessor);
    this.container.replaceChildren();
    if (resp.done) {
      this.current = null;
      const note = document.createElement("p");
      note.className = "assessment-done";
      note.textContent = `All done — ${this.judged} passages judged.`;
      this.container.appendChild(note);
      return;
    }
    this.current = resp.item;
    const view = renderAssessmentItem(resp.item, (grade) => void this.grade(grade));
    const progress = document.createElement("p");
    progress.className = "assessment-progress";
    progress.textContent = `Judged so far: ${this.judged}`;
    this.container.append(view, progress);
  }

  // One POST per click even under rapid clicking: the pending flag is set
  // synchronously before the request is issued, and the buttons are
  // disabled while it is in flight.
  private async grade(grade: 0 | 1 | 2): Promise<void> {
    if (this.pending || !this.current || this.current.passage_id === null) {
      return;
    }
    this.pending = true;
    const buttons = this.container.querySelectorAll<HTMLButtonElement>(".grade-button");
    buttons.forEach((b) => (b.disabled = true));
    try {
      await this.api.submitJudgment(
        this.topicId,
        this.current.passage_id,
        grade,
        this.assessor,
      );
      this.judged += 1;
      await this.advance();
    } finally {
      this.pending = false;
    }
  }
}
