// Clickable rendering of the widget tree; stands in for the target
// application's window. Clicking a widget fires "action"; other bound
// kinds render as chips next to the widget.

import type { WidgetNode } from "./types";

export interface SurfaceCallbacks {
  onFire(widget: string, kind: string): void;
}

function renderWidget(widget: WidgetNode, callbacks: SurfaceCallbacks): HTMLElement {
  const el = document.createElement("div");
  el.className = `widget widget-${widget.kind}`;
  el.dataset.widgetId = widget.id;

  const face = document.createElement("button");
  face.className = "widget-face";
  face.textContent = widget.label || widget.id;
  face.addEventListener("click", (event) => {
    event.stopPropagation();
    callbacks.onFire(widget.id, "action");
  });
  el.appendChild(face);

  const extraKinds = Object.keys(widget.handlers ?? {}).filter((k) => k !== "action");
  if (extraKinds.length > 0) {
    const chips = document.createElement("span");
    chips.className = "kind-chips";
    for (const kind of extraKinds.sort()) {
      const chip = document.createElement("button");
      chip.className = "kind-chip";
      chip.dataset.kind = kind;
      chip.textContent = kind;
      chip.addEventListener("click", (event) => {
        event.stopPropagation();
        callbacks.onFire(widget.id, kind);
      });
      chips.appendChild(chip);
    }
    el.appendChild(chips);
  }

  if (widget.children?.length) {
    const children = document.createElement("div");
    children.className = "widget-children";
    for (const child of widget.children) {
      children.appendChild(renderWidget(child, callbacks));
    }
    el.appendChild(children);
  }
  return el;
}

export function renderWidgetSurface(
  container: HTMLElement,
  root: WidgetNode,
  callbacks: SurfaceCallbacks,
): void {
  container.classList.add("widget-surface");
  container.replaceChildren(renderWidget(root, callbacks));
}

// Brief outline on the widget that just fired, like the snapshot mark.
export function flashWidget(container: HTMLElement, widgetId: string, ms = 400): void {
  const el = container.querySelector<HTMLElement>(`[data-widget-id="${widgetId}"] > .widget-face`);
  if (!el) return;
  el.classList.add("fired");
  setTimeout(() => el.classList.remove("fired"), ms);
}
