import type {
  ExplanationView,
  Interactivity,
  MoveRequest,
  PresentationStyle,
  RecommendationItem,
  SessionInfo,
  UiEvent,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function raiseForError(response: Response): Promise<void> {
  if (response.ok) return;
  let code = "unknown_error";
  let detail = response.statusText;
  try {
    const body = await response.json();
    if (body && typeof body.error === "string") {
      code = body.error;
      detail = body.detail ?? detail;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(code, response.status, detail);
}

/**
 * Thin typed client for the recommendation service. Dialog moves go through
 * requestExplanation and are logged server-side; logEvent is only for
 * view_list / choose_hotel interactions.
 */
export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async post(path: string, body: unknown): Promise<Response> {
    const response = await this.fetchFn(this.base + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    await raiseForError(response);
    return response;
  }

  async createSession(
    preferences: string[],
    interactivity: Interactivity,
    style: PresentationStyle,
  ): Promise<SessionInfo> {
    const response = await this.post("/sessions", { preferences, interactivity, style });
    return response.json();
  }

  async recommendations(sessionId: string, limit = 30): Promise<RecommendationItem[]> {
    const response = await this.fetchFn(
      `${this.base}/sessions/${sessionId}/recommendations?limit=${limit}`,
    );
    await raiseForError(response);
    const body = await response.json();
    return body.items;
  }

  async requestExplanation(sessionId: string, move: MoveRequest): Promise<ExplanationView> {
    const response = await this.post(`/sessions/${sessionId}/explanation`, move);
    return response.json();
  }

  /**
   * Fire-and-forget event logging: retries once on network failure, never
   * retries on an HTTP error (a rejected event stays rejected), and never
   * throws so navigation is never blocked.
   */
  async logEvent(sessionId: string, event: UiEvent): Promise<boolean> {
    for (let attempt = 0; attempt < 2; attempt++) {
      try {
        await this.post(`/sessions/${sessionId}/events`, event);
        return true;
      } catch (error) {
        if (error instanceof ApiError) {
          return false; // server said no; do not retry
        }
        // network failure: one retry, then give up quietly
      }
    }
    return false;
  }
}
