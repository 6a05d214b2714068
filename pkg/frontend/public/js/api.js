export class ApiError extends Error {
    constructor(code, status, detail) {
        super(detail);
        this.code = code;
        this.status = status;
        this.name = "ApiError";
    }
}
async function raiseForError(response) {
    if (response.ok)
        return;
    let code = "unknown_error";
    let detail = response.statusText;
    try {
        const body = await response.json();
        if (body && typeof body.error === "string") {
            code = body.error;
            detail = body.detail ?? detail;
        }
    }
    catch {
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
    constructor(base = "", fetchFn = (input, init) => fetch(input, init)) {
        this.base = base;
        this.fetchFn = fetchFn;
    }
    async post(path, body) {
        const response = await this.fetchFn(this.base + path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
        await raiseForError(response);
        return response;
    }
    async createSession(preferences, interactivity, style) {
        const response = await this.post("/sessions", { preferences, interactivity, style });
        return response.json();
    }
    async recommendations(sessionId, limit = 30) {
        const response = await this.fetchFn(`${this.base}/sessions/${sessionId}/recommendations?limit=${limit}`);
        await raiseForError(response);
        const body = await response.json();
        return body.items;
    }
    async requestExplanation(sessionId, move) {
        const response = await this.post(`/sessions/${sessionId}/explanation`, move);
        return response.json();
    }
    /**
     * Fire-and-forget event logging: retries once on network failure, never
     * retries on an HTTP error (a rejected event stays rejected), and never
     * throws so navigation is never blocked.
     */
    async logEvent(sessionId, event) {
        for (let attempt = 0; attempt < 2; attempt++) {
            try {
                await this.post(`/sessions/${sessionId}/events`, event);
                return true;
            }
            catch (error) {
                if (error instanceof ApiError) {
                    return false; // server said no; do not retry
                }
                // network failure: one retry, then give up quietly
            }
        }
        return false;
    }
}
