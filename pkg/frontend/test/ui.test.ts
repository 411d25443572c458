import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { setupApp } from "../src/app.js";
import { ChatStore } from "../src/store.js";
import {
  generalResponse,
  introducingResponse,
  jsonResponse,
  stubFetch,
} from "./helpers.js";

const realFetch = globalThis.fetch;

afterEach(() => {
  globalThis.fetch = realFetch;
  document.body.innerHTML = "";
});

function makeApp(routes: Record<string, () => Promise<Response>> = {}) {
  document.body.innerHTML = '<div id="app"></div>';
  const root = document.getElementById("app")!;
  const calls = stubFetch({
    "GET /health": () =>
      Promise.resolve(jsonResponse({ status: "ok", corpus_pairs: 52 })),
    "POST /sessions": () => Promise.resolve(jsonResponse({ session_id: "s1" })),
    ...routes,
  });
  const store = new ChatStore();
  setupApp(root, new ApiClient(), store);
  const input = root.querySelector<HTMLInputElement>("#input")!;
  const form = root.querySelector<HTMLFormElement>("#composer")!;
  const send = (text: string) => {
    input.value = text;
    form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
  };
  return { root, store, calls, input, send };
}

async function ready(store: ChatStore): Promise<void> {
  await vi.waitFor(() => expect(store.current.sessionId).toBe("s1"));
}

describe("chat round trip", () => {
  it("renders the stalled-turn scenario with an introducing badge and the service's own ranking", async () => {
    const { root, store, send } = makeApp({
      "POST /sessions/s1/messages": () =>
        Promise.resolve(jsonResponse(introducingResponse)),
    });
    await ready(store);

    send("Errr");
    await vi.waitFor(() =>
      expect(root.querySelector(".turn-computer")).not.toBeNull(),
    );

    // human turn first, computer turn second, in session order
    const turns = [...root.querySelectorAll(".turn")];
    expect(turns.map((t) => t.className)).toEqual([
      "turn turn-human",
      "turn turn-computer",
    ]);
    expect(turns[0]!.querySelector(".text")!.textContent).toBe("Errr");
    expect(turns[1]!.querySelector(".text")!.textContent).toBe(
      introducingResponse.reply,
    );

    // badge and entity chips are visible without expanding the panel
    const badge = root.querySelector(".turn-computer .badge")!;
    expect(badge.textContent).toBe("introducing");
    const chips = [...root.querySelectorAll(".chip")];
    expect(chips.length).toBe(introducingResponse.trace.expanded_entities.length);

    // expanding the trace shows the candidate table exactly as ranked
    (root.querySelector(".trace-toggle") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(root.querySelector(".candidates")).not.toBeNull());
    const rows = [...root.querySelectorAll<HTMLTableRowElement>(".candidates tbody tr")];
    const entries = introducingResponse.trace.ranking.entries;
    expect(rows.length).toBe(entries.length);
    expect(rows.length).toBeLessThanOrEqual(50);
    expect(rows[0]!.dataset.id).toBe(String(entries[0]!.id));

    // final scores shown to 4 decimals, non-increasing down the table
    const finals = rows.map((row) => row.querySelectorAll("td")[3]!.textContent!);
    for (const text of finals) expect(text).toMatch(/^\d\.\d{4}$/);
    const values = finals.map(Number);
    for (let i = 1; i < values.length; i++) {
      expect(values[i]!).toBeLessThanOrEqual(values[i - 1]!);
    }
  });

  it("renders a general turn with a general badge and no entity chips", async () => {
    const { root, store, send } = makeApp({
      "POST /sessions/s1/messages": () =>
        Promise.resolve(jsonResponse(generalResponse)),
    });
    await ready(store);

    send("我喜欢看电影");
    await vi.waitFor(() =>
      expect(root.querySelector(".turn-computer")).not.toBeNull(),
    );
    expect(root.querySelector(".turn-computer .badge")!.textContent).toBe("general");
    expect(root.querySelectorAll(".chip").length).toBe(0);

    // the general-mode panel still shows the lexical baseline scores
    (root.querySelector(".trace-toggle") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(root.querySelector(".candidates")).not.toBeNull());
    expect(root.querySelector(".trace-meta")!.textContent).toContain("textual");
  });

  it("shows the error banner without losing the typed message", async () => {
    const { root, store, input, send } = makeApp({
      "POST /sessions/s1/messages": () =>
        Promise.reject(new TypeError("fetch failed")),
    });
    await ready(store);

    send("Errr");
    await vi.waitFor(() => expect(store.current.error).not.toBeNull());

    const banner = root.querySelector<HTMLElement>("#banner")!;
    expect(banner.hidden).toBe(false);
    expect(banner.textContent).toContain("service unreachable");
    expect(input.value).toBe("Errr");
    expect(input.disabled).toBe(false);
    // the service never saw the message, so no turn remains on screen
    expect(root.querySelectorAll(".turn").length).toBe(0);

    (banner.querySelector(".dismiss") as HTMLButtonElement).click();
    expect(banner.hidden).toBe(true);
  });

  it("keeps the human turn when the service answered no_reply", async () => {
    const { root, store, input, send } = makeApp({
      "POST /sessions/s1/messages": () =>
        Promise.resolve(
          jsonResponse({ error: "no_reply", detail: "no candidate survived" }, 422),
        ),
    });
    await ready(store);

    send("hello");
    await vi.waitFor(() => expect(store.current.error).not.toBeNull());
    expect(root.querySelectorAll(".turn").length).toBe(1);
    expect(input.value).toBe("hello");
  });

  it("disables the input while a reply is in flight", async () => {
    let release: (value: Response) => void;
    const gate = new Promise<Response>((resolve) => {
      release = resolve;
    });
    const { root, store, input, send } = makeApp({
      "POST /sessions/s1/messages": () => gate,
    });
    await ready(store);

    send("Errr");
    await vi.waitFor(() => expect(input.disabled).toBe(true));
    expect(root.querySelector<HTMLButtonElement>("#send")!.disabled).toBe(true);

    release!(jsonResponse(introducingResponse));
    await vi.waitFor(() => expect(input.disabled).toBe(false));
    expect(input.value).toBe("");
  });

  it("remembers each turn's panel state independently", async () => {
    const { root, store, send } = makeApp({
      "POST /sessions/s1/messages": () =>
        Promise.resolve(jsonResponse(introducingResponse)),
    });
    await ready(store);

    send("Errr");
    await vi.waitFor(() =>
      expect(root.querySelectorAll(".turn-computer").length).toBe(1),
    );
    send("Errr");
    await vi.waitFor(() =>
      expect(root.querySelectorAll(".turn-computer").length).toBe(2),
    );

    const toggles = root.querySelectorAll<HTMLButtonElement>(".trace-toggle");
    toggles[1]!.click();
    await vi.waitFor(() =>
      expect(root.querySelectorAll(".trace-panel").length).toBe(1),
    );
    expect(store.current.turns[1]!.traceOpen).toBe(false);
    expect(store.current.turns[3]!.traceOpen).toBe(true);

    // collapse from the re-rendered toggle
    root.querySelectorAll<HTMLButtonElement>(".trace-toggle")[1]!.click();
    await vi.waitFor(() =>
      expect(root.querySelectorAll(".trace-panel").length).toBe(0),
    );
  });

  it("loads graph neighbors into the side panel from an entity chip", async () => {
    const { root, store, send } = makeApp({
      "POST /sessions/s1/messages": () =>
        Promise.resolve(jsonResponse(introducingResponse)),
      "GET /kg/neighbors": () =>
        Promise.resolve(
          jsonResponse({
            entity: "瓦力",
            known: true,
            neighbors: [
              { entity: "伊娃", weight: 0.95 },
              { entity: "机器人", weight: 0.6 },
            ],
          }),
        ),
    });
    await ready(store);

    send("Errr");
    await vi.waitFor(() => expect(root.querySelector(".chip")).not.toBeNull());
    (root.querySelector(".chip") as HTMLButtonElement).click();

    const panel = root.querySelector<HTMLElement>("#neighbors")!;
    await vi.waitFor(() => expect(panel.textContent).toContain("伊娃"));
    expect(panel.textContent).toContain("0.95");
  });

  it("starts a fresh session from the reset button", async () => {
    let sessionCount = 0;
    const { root, store, send } = makeApp({
      "POST /sessions": () => {
        sessionCount += 1;
        return Promise.resolve(jsonResponse({ session_id: `s${sessionCount}` }));
      },
      "POST /sessions/s1/messages": () =>
        Promise.resolve(jsonResponse(introducingResponse)),
    });
    await ready(store);

    send("Errr");
    await vi.waitFor(() =>
      expect(root.querySelector(".turn-computer")).not.toBeNull(),
    );

    (root.querySelector("#reset") as HTMLButtonElement).click();
    await vi.waitFor(() => expect(store.current.sessionId).toBe("s2"));
    expect(root.querySelectorAll(".turn").length).toBe(0);
    expect(store.current.error).toBeNull();
  });

  it("shows the corpus size from the health endpoint", async () => {
    const { root, store } = makeApp();
    await ready(store);
    await vi.waitFor(() =>
      expect(root.querySelector("#health")!.textContent).toBe("52 corpus pairs"),
    );
  });
});
