/** Payload shapes of the conversation service API. */

export interface EntityWeight {
  entity: string;
  weight: number;
}

/** One retrieved candidate with its retrieval-stage score */
export interface CandidateInfo {
  id: number;
  retrieval_score: number;
  text?: string;
}

/** One candidate in final rank order with its final score */
export interface RankedEntry {
  id: number;
  score: number;
  text?: string;
}

export interface RankingInfo {
  method: string | null;
  entries: RankedEntry[];
  iterations: { mean_square_diff: number }[];
}

/** Full per-response debug trace as returned by the service */
export interface Trace {
  mode: "introducing" | "general";
  stalemate: boolean;
  context_window: string[];
  detected_entities: string[];
  expanded_entities: EntityWeight[];
  candidates: CandidateInfo[];
  ranking: RankingInfo;
  chosen_reply_id: number | null;
}

/** POST /sessions */
export interface SessionCreated {
  session_id: string;
}

/** POST /sessions/{id}/messages */
export interface MessageResponse {
  session_id: string;
  reply: string;
  trace: Trace;
}

/** GET /kg/neighbors */
export interface NeighborsResponse {
  entity: string;
  known: boolean;
  neighbors: EntityWeight[];
}

/** GET /health */
export interface HealthResponse {
  status: string;
  corpus_pairs: number;
}
