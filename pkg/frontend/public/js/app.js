import { ApiError } from "./api.js";
import { renderErrorBanner, renderPayload, renderRecommendations, renderRejection, } from "./render.js";
import { isListView } from "./types.js";
/**
 * Single-page controller. The server owns all gating and numbers; this
 * class only forwards moves, renders payloads and logs non-move events.
 * At most one explanation request is in flight at a time.
 */
export class App {
    constructor(client, root) {
        this.client = client;
        this.root = root;
        this.sessionId = null;
        this.items = [];
        this.busy = false;
    }
    async start(preferences, interactivity, style) {
        const session = await this.client.createSession(preferences, interactivity, style);
        this.sessionId = session.session_id;
        this.items = await this.client.recommendations(this.sessionId);
        this.showList();
        void this.client.logEvent(this.sessionId, { kind: "view_list" });
    }
    clearBanners() {
        this.root.querySelectorAll("[data-role=rejection],[data-role=error]").forEach((n) => n.remove());
    }
    handlers() {
        return {
            onMove: (move) => void this.applyMove(move),
            onChoose: (itemId) => void this.choose(itemId),
        };
    }
    showList() {
        this.root.replaceChildren(renderRecommendations(this.items, this.handlers()));
    }
    show(view) {
        if (isListView(view)) {
            this.showList();
            return;
        }
        this.root.replaceChildren(renderPayload(view, this.handlers()));
    }
    async applyMove(move) {
        if (!this.sessionId || this.busy)
            return;
        this.busy = true;
        this.clearBanners();
        try {
            const view = await this.client.requestExplanation(this.sessionId, move);
            this.show(view);
        }
        catch (error) {
            if (error instanceof ApiError && error.code === "move_not_allowed") {
                // rejection state: the current view stays, the request is not retried
                this.root.prepend(renderRejection(error.message));
                this.root
                    .querySelectorAll(`button[data-move=${move.move}]`)
                    .forEach((button) => (button.disabled = true));
            }
            else {
                const detail = error instanceof Error ? error.message : String(error);
                this.root.prepend(renderErrorBanner(`Request failed: ${detail}`));
            }
        }
        finally {
            this.busy = false;
        }
    }
    async choose(itemId) {
        if (!this.sessionId)
            return;
        await this.client.logEvent(this.sessionId, { kind: "choose_hotel", item_id: itemId });
        this.clearBanners();
        const note = document.createElement("div");
        note.className = "banner banner-chosen";
        note.dataset.role = "chosen";
        note.textContent = `You chose ${itemId}. Thank you!`;
        this.root.prepend(note);
    }
}
