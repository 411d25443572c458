import type { ChatState, TurnView } from "./store.js";
import type { EntityWeight, NeighborsResponse, Trace } from "./types.js";

export interface TurnHandlers {
  onToggleTrace: (index: number) => void;
  onEntityChip: (entity: string) => void;
}

const score = (x: number): string => x.toFixed(4);

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function renderBadge(mode: Trace["mode"]): HTMLElement {
  return el("span", `badge badge-${mode}`, mode);
}

export function renderChips(
  entities: EntityWeight[],
  detected: string[],
  onChip: (entity: string) => void,
): HTMLElement {
  const list = el("div", "chips");
  for (const { entity, weight } of entities) {
    const chip = el("button", "chip", `${entity} ${weight.toFixed(2)}`);
    chip.type = "button";
    chip.dataset.entity = entity;
    if (detected.includes(entity)) chip.classList.add("chip-detected");
    chip.title = "show graph neighbors";
    chip.addEventListener("click", () => onChip(entity));
    list.appendChild(chip);
  }
  return list;
}

/** Candidates in the service's final order: retrieval score next to final score. */
export function renderCandidateTable(trace: Trace): HTMLTableElement {
  const retrieval = new Map(trace.candidates.map((c) => [c.id, c.retrieval_score]));
  const table = el("table", "candidates");
  const head = el("tr");
  for (const label of ["#", "reply", "retrieval", "final"]) {
    head.appendChild(el("th", undefined, label));
  }
  const thead = el("thead");
  thead.appendChild(head);
  table.appendChild(thead);

  const body = el("tbody");
  trace.ranking.entries.forEach((entry, rank) => {
    const row = el("tr");
    row.dataset.id = String(entry.id);
    const r = retrieval.get(entry.id);
    row.appendChild(el("td", undefined, String(rank + 1)));
    row.appendChild(el("td", undefined, entry.text ?? `reply ${entry.id}`));
    row.appendChild(el("td", undefined, r === undefined ? "-" : score(r)));
    row.appendChild(el("td", undefined, score(entry.score)));
    body.appendChild(row);
  });
  table.appendChild(body);
  return table;
}

export function renderTracePanel(trace: Trace, handlers: TurnHandlers): HTMLElement {
  const panel = el("div", "trace-panel");

  const meta = el("dl", "trace-meta");
  const pairs: [string, string][] = [
    ["stalemate", trace.stalemate ? "yes" : "no"],
    ["ranking", trace.ranking.method ?? "none"],
    ["iterations", String(trace.ranking.iterations.length)],
    ["detected", trace.detected_entities.join(", ") || "none"],
  ];
  for (const [k, v] of pairs) {
    meta.appendChild(el("dt", undefined, k));
    meta.appendChild(el("dd", undefined, v));
  }
  panel.appendChild(meta);

  panel.appendChild(el("h4", undefined, "candidates"));
  panel.appendChild(renderCandidateTable(trace));
  return panel;
}

export function renderTurn(
  turn: TurnView,
  index: number,
  handlers: TurnHandlers,
): HTMLElement {
  const article = el("article", `turn turn-${turn.speaker}`);
  const header = el("header");
  header.appendChild(el("span", "speaker", turn.speaker));
  if (turn.trace !== null) {
    header.appendChild(renderBadge(turn.trace.mode));
    const toggle = el(
      "button",
      "trace-toggle",
      turn.traceOpen ? "hide ranking" : "show ranking",
    );
    toggle.type = "button";
    toggle.addEventListener("click", () => handlers.onToggleTrace(index));
    header.appendChild(toggle);
  }
  article.appendChild(header);
  article.appendChild(el("p", "text", turn.text));
  if (turn.trace !== null && turn.trace.expanded_entities.length > 0) {
    article.appendChild(
      renderChips(
        turn.trace.expanded_entities,
        turn.trace.detected_entities,
        handlers.onEntityChip,
      ),
    );
  }
  if (turn.trace !== null && turn.traceOpen) {
    article.appendChild(renderTracePanel(turn.trace, handlers));
  }
  return article;
}

export function renderThread(
  container: HTMLElement,
  state: ChatState,
  handlers: TurnHandlers,
): void {
  container.replaceChildren(
    ...state.turns.map((turn, index) => renderTurn(turn, index, handlers)),
  );
}

export function renderBanner(
  banner: HTMLElement,
  error: string | null,
  onDismiss: () => void,
): void {
  if (error === null) {
    banner.hidden = true;
    banner.replaceChildren();
    return;
  }
  banner.hidden = false;
  const dismiss = el("button", "dismiss", "dismiss");
  dismiss.type = "button";
  dismiss.addEventListener("click", onDismiss);
  banner.replaceChildren(el("span", undefined, error), dismiss);
}

export function renderNeighbors(panel: HTMLElement, response: NeighborsResponse): void {
  panel.replaceChildren(el("h4", undefined, `neighbors of ${response.entity}`));
  if (!response.known) {
    panel.appendChild(el("p", "muted", "not in the graph"));
    return;
  }
  if (response.neighbors.length === 0) {
    panel.appendChild(el("p", "muted", "no outgoing edges"));
    return;
  }
  const list = el("ul", "neighbor-list");
  for (const { entity, weight } of response.neighbors) {
    list.appendChild(el("li", undefined, `${entity} ${weight.toFixed(2)}`));
  }
  panel.appendChild(list);
}
