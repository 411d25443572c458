import type { Trace } from "./types.js";

/** One rendered turn; trace is present on computer turns only. */
export interface TurnView {
  speaker: "human" | "computer";
  text: string;
  trace: Trace | null;
  traceOpen: boolean;
}

export interface ChatState {
  sessionId: string | null;
  turns: TurnView[];
  busy: boolean;
  error: string | null;
  pendingText: string;
}

type Listener = (state: ChatState) => void;

/**
 * Client-side conversation state. One in-flight request at a time: beginSend
 * flips busy and optimistically appends the human turn; completeSend appends
 * the computer turn; failSend rolls the human turn back unless the service
 * recorded it (a structured no-reply error), keeping the text recoverable.
 */
export class ChatStore {
  private state: ChatState = {
    sessionId: null,
    turns: [],
    busy: false,
    error: null,
    pendingText: "",
  };
  private listeners: Listener[] = [];

  get current(): ChatState {
    return this.state;
  }

  subscribe(listener: Listener): void {
    this.listeners.push(listener);
  }

  private commit(patch: Partial<ChatState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  /** Fresh session: wipes turns, errors, and any pending message. */
  reset(sessionId: string): void {
    this.commit({
      sessionId,
      turns: [],
      busy: false,
      error: null,
      pendingText: "",
    });
  }

  beginSend(text: string): void {
    if (this.state.busy) throw new Error("a request is already in flight");
    this.commit({
      busy: true,
      error: null,
      pendingText: text,
      turns: [
        ...this.state.turns,
        { speaker: "human", text, trace: null, traceOpen: false },
      ],
    });
  }

  completeSend(reply: string, trace: Trace): void {
    this.commit({
      busy: false,
      pendingText: "",
      turns: [
        ...this.state.turns,
        { speaker: "computer", text: reply, trace, traceOpen: false },
      ],
    });
  }

  failSend(message: string, keepHumanTurn = false): void {
    const turns = keepHumanTurn
      ? this.state.turns
      : this.state.turns.slice(0, -1);
    this.commit({ busy: false, error: message, turns });
  }

  toggleTrace(index: number): void {
    const turns = this.state.turns.map((turn, i) =>
      i === index && turn.trace !== null
        ? { ...turn, traceOpen: !turn.traceOpen }
        : turn,
    );
    this.commit({ turns });
  }

  /** Error from an ancillary request (health, neighbors): no turn rollback. */
  setError(message: string): void {
    this.commit({ error: message });
  }

  dismissError(): void {
    this.commit({ error: null });
  }
}
