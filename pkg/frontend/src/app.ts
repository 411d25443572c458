import { ApiClient, ApiError } from "./api.js";
import { renderBanner, renderNeighbors, renderThread } from "./render.js";
import { ChatStore } from "./store.js";

/** Build the page inside `root` and wire it to the service. */
export function setupApp(root: HTMLElement, client: ApiClient, store: ChatStore): void {
  root.innerHTML = `
    <header class="top">
      <h1>icebreaker</h1>
      <span id="health" class="muted"></span>
      <button id="reset" type="button">new session</button>
    </header>
    <div id="banner" class="banner" hidden></div>
    <main class="columns">
      <section class="chat">
        <div id="thread" class="thread"></div>
        <form id="composer">
          <input id="input" autocomplete="off" placeholder="say something" />
          <button id="send" type="submit">send</button>
        </form>
      </section>
      <aside id="neighbors" class="neighbors"></aside>
    </main>
  `;
  const thread = root.querySelector<HTMLElement>("#thread")!;
  const banner = root.querySelector<HTMLElement>("#banner")!;
  const neighbors = root.querySelector<HTMLElement>("#neighbors")!;
  const input = root.querySelector<HTMLInputElement>("#input")!;
  const send = root.querySelector<HTMLButtonElement>("#send")!;

  const message = (err: unknown): string =>
    err instanceof Error ? err.message : String(err);

  const handlers = {
    onToggleTrace: (index: number) => store.toggleTrace(index),
    onEntityChip: (entity: string) => {
      client
        .neighbors(entity)
        .then((response) => renderNeighbors(neighbors, response))
        .catch((err) => store.setError(message(err)));
    },
  };

  store.subscribe((state) => {
    renderThread(thread, state, handlers);
    renderBanner(banner, state.error, () => store.dismissError());
    input.disabled = state.busy;
    send.disabled = state.busy;
    thread.scrollTop = thread.scrollHeight;
  });

  root.querySelector<HTMLFormElement>("#composer")!.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    const sid = store.current.sessionId;
    if (!text || store.current.busy || sid === null) return;
    store.beginSend(text);
    client
      .sendMessage(sid, text)
      .then((response) => {
        store.completeSend(response.reply, response.trace);
        input.value = "";
      })
      .catch((err) => {
        // the service keeps the human turn when it answered with no_reply;
        // on any other failure it never saw the message, so roll it back
        const keep = err instanceof ApiError && err.code === "no_reply";
        store.failSend(message(err), keep);
      });
  });

  const startSession = () => {
    client
      .createSession()
      .then(({ session_id }) => {
        store.reset(session_id);
        neighbors.replaceChildren();
        input.value = "";
      })
      .catch((err) => store.setError(message(err)));
  };

  root.querySelector<HTMLButtonElement>("#reset")!.addEventListener("click", startSession);

  client
    .health()
    .then(({ corpus_pairs }) => {
      root.querySelector("#health")!.textContent = `${corpus_pairs} corpus pairs`;
    })
    .catch((err) => store.setError(message(err)));

  startSession();
}
