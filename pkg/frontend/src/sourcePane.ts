// Source pane: class selector plus a coverage-annotated listing.

import type { SourceDoc } from "./types";

export interface SourceCallbacks {
  onSelectClass(classId: string): void;
}

const STATUS_CLASS: Record<string, string> = {
  covered: "cov-covered",
  firstCoveredHere: "cov-first",
  uncovered: "cov-uncovered",
};

export function renderSourcePane(
  container: HTMLElement,
  doc: SourceDoc | null,
  classIds: string[],
  callbacks: SourceCallbacks,
): void {
  container.classList.add("source-pane");
  container.replaceChildren();

  const selector = document.createElement("select");
  selector.className = "class-select";
  const placeholder = document.createElement("option");
  placeholder.value = "";
  placeholder.textContent = "select a class…";
  placeholder.disabled = true;
  placeholder.selected = doc === null;
  selector.appendChild(placeholder);
  for (const classId of classIds) {
    const option = document.createElement("option");
    option.value = classId;
    option.textContent = classId;
    option.selected = doc?.classId === classId;
    selector.appendChild(option);
  }
  selector.addEventListener("change", () => callbacks.onSelectClass(selector.value));
  container.appendChild(selector);

  if (doc === null) {
    return;
  }
  const caption = document.createElement("div");
  caption.className = "source-caption";
  caption.textContent = `${doc.classId} at event ${doc.seq}`;
  container.appendChild(caption);

  const listing = document.createElement("div");
  listing.className = "source-listing";
  for (const row of doc.rows) {
    const line = document.createElement("div");
    line.className = "source-row" + (row.status ? ` ${STATUS_CLASS[row.status]}` : "");
    const gutter = document.createElement("span");
    gutter.className = "gutter";
    gutter.textContent = row.line === null ? "" : String(row.line);
    line.appendChild(gutter);
    const text = document.createElement("code");
    text.textContent = row.text;
    line.appendChild(text);
    listing.appendChild(line);
  }
  container.appendChild(listing);
}
