import { isListView } from "./types.js";
const SVG_NS = "http://www.w3.org/2000/svg";
function el(tag, className, text) {
    const node = document.createElement(tag);
    if (className)
        node.className = className;
    if (text !== undefined)
        node.textContent = text;
    return node;
}
function label(feature) {
    return feature.replace(/_/g, " ");
}
function circles(count) {
    return "●".repeat(count) + "○".repeat(5 - count);
}
function moveButton(kind, text, move, handlers) {
    const button = el("button", "move-button", text);
    button.dataset.move = kind;
    if (move.feature)
        button.dataset.feature = move.feature;
    if (move.term)
        button.dataset.term = move.term;
    button.addEventListener("click", () => handlers.onMove(move));
    return button;
}
export function renderRecommendations(items, handlers) {
    const list = el("ol", "recommendations");
    list.dataset.role = "recommendation-list";
    for (const item of items) {
        const row = el("li", "recommendation");
        row.dataset.itemId = item.item_id;
        const heading = el("span", "hotel-name", item.item_id);
        const rating = el("span", "rating-circles", circles(item.circles));
        rating.title = `predicted rating ${item.circles} of 5`;
        row.append(heading, rating);
        row.append(moveButton("more_why", "More on why recommended", { move: "more_why", item_id: item.item_id }, handlers));
        const choose = el("button", "choose-button", "Choose this hotel");
        choose.dataset.action = "choose";
        choose.addEventListener("click", () => handlers.onChoose(item.item_id));
        row.append(choose);
        list.append(row);
    }
    return list;
}
function premiseNumbers(premise) {
    if (premise.pct_positive === undefined || premise.pct_negative === undefined) {
        return null;
    }
    return { pos: premise.pct_positive, neg: premise.pct_negative };
}
function markPremise(node, premise) {
    node.dataset.role = "premise-row";
    node.dataset.feature = premise.feature;
    const numbers = premiseNumbers(premise);
    if (numbers) {
        node.dataset.pctPositive = String(numbers.pos);
        node.dataset.pctNegative = String(numbers.neg);
    }
    else {
        node.dataset.noData = "true";
    }
    return node;
}
function renderStatsText(premises) {
    const block = el("div", "stats stats-text");
    for (const premise of premises) {
        const row = markPremise(el("div", "premise"), premise);
        const numbers = premiseNumbers(premise);
        if (!numbers) {
            row.append(el("p", "no-data", `There is no feedback about the ${label(premise.feature)} yet.`));
        }
        else {
            let sentence = `Around ${numbers.pos}% of guests who wrote about the ` +
                `${label(premise.feature)} commented positively about it, ` +
                `although ${numbers.neg}% expressed complaints.`;
            if (numbers.pos >= 50) {
                sentence += ` Still, most of the feedback about the ${label(premise.feature)} was positive.`;
            }
            row.append(el("p", "stat-sentence", sentence));
        }
        block.append(row);
    }
    return block;
}
function renderStatsTable(premises) {
    const block = el("div", "stats stats-table");
    const table = el("table");
    const head = el("tr");
    for (const caption of ["Feature", "Positive", "Negative"]) {
        head.append(el("th", undefined, caption));
    }
    table.append(head);
    for (const premise of premises) {
        const tr = markPremise(document.createElement("tr"), premise);
        const numbers = premiseNumbers(premise);
        tr.append(el("td", "feature-name", label(premise.feature)));
        if (!numbers) {
            const cell = el("td", "no-data", "no data");
            cell.colSpan = 2;
            tr.append(cell);
        }
        else {
            tr.append(el("td", "pct pct-positive", `${numbers.pos}%`));
            tr.append(el("td", "pct pct-negative", `${numbers.neg}%`));
        }
        table.append(tr);
    }
    block.append(table);
    return block;
}
function bar(x, width, height, cls) {
    const rect = document.createElementNS(SVG_NS, "rect");
    rect.setAttribute("x", String(x));
    rect.setAttribute("y", "0");
    rect.setAttribute("width", String(width));
    rect.setAttribute("height", String(height));
    rect.setAttribute("class", cls);
    return rect;
}
function renderStatsBars(premises) {
    const block = el("div", "stats stats-bars");
    for (const premise of premises) {
        const row = markPremise(el("div", "premise"), premise);
        row.append(el("span", "feature-name", label(premise.feature)));
        const numbers = premiseNumbers(premise);
        if (!numbers) {
            row.append(el("span", "no-data", "no data"));
        }
        else {
            const svg = document.createElementNS(SVG_NS, "svg");
            svg.setAttribute("viewBox", "0 0 100 12");
            svg.setAttribute("preserveAspectRatio", "none");
            svg.setAttribute("role", "img");
            // widths are the percentages themselves on a 0..100 scale
            svg.append(bar(0, numbers.pos, 12, "bar bar-positive"));
            svg.append(bar(numbers.pos, numbers.neg, 12, "bar bar-negative"));
            row.append(svg);
            row.append(el("span", "pct pct-positive", `${numbers.pos}%`));
            row.append(el("span", "pct pct-negative", `${numbers.neg}%`));
        }
        block.append(row);
    }
    return block;
}
const STATS_RENDERERS = {
    text: renderStatsText,
    table: renderStatsTable,
    bar_chart: renderStatsBars,
};
function renderExcerpts(heading, role, excerpts) {
    if (excerpts.length === 0)
        return null;
    const block = el("section", "excerpts");
    block.dataset.role = role;
    block.append(el("h3", undefined, heading));
    const list = el("ul");
    for (const excerpt of excerpts) {
        const item = el("li", `excerpt excerpt-${excerpt.polarity}`, `“${excerpt.text}”`);
        item.dataset.reviewId = excerpt.review_id;
        list.append(item);
    }
    block.append(list);
    return block;
}
/**
 * Render one explanation view. Every control is gated purely by the
 * payload's available_moves: a move the server would reject is never shown.
 */
export function renderPayload(view, handlers) {
    const root = el("section", "explanation");
    root.dataset.role = "explanation";
    root.dataset.level = view.level;
    if (isListView(view)) {
        root.append(el("p", "hint", "Pick a hotel from the list to see why it was recommended."));
        return root;
    }
    const moves = new Set(view.available_moves);
    const claim = el("p", "claim");
    claim.dataset.role = "claim";
    claim.textContent =
        `${view.item_id} is recommended for you: predicted rating ` +
            `${circles(view.claim.predicted_rating_display)} ` +
            `(${view.claim.predicted_rating_display} of 5).`;
    root.append(claim);
    root.append(STATS_RENDERERS[view.style](view.premises));
    if (view.refutation === "majority_positive" && view.feature) {
        root.append(el("p", "refutation", `Still, most of the feedback about the ${label(view.feature)} was positive.`));
    }
    const backing = renderExcerpts("What guests liked", "backing", view.backing);
    if (backing)
        root.append(backing);
    const rebuttal = renderExcerpts("What guests complained about", "rebuttal", view.rebuttal);
    if (rebuttal)
        root.append(rebuttal);
    const controls = el("div", "controls");
    controls.dataset.role = "controls";
    if (moves.has("more_features")) {
        controls.append(moveButton("more_features", "More features", { move: "more_features" }, handlers));
    }
    if (moves.has("what_reported")) {
        for (const premise of view.premises) {
            controls.append(moveButton("what_reported", `What was reported? (${label(premise.feature)})`, { move: "what_reported", feature: premise.feature }, handlers));
        }
    }
    if (moves.has("fine_grained") && view.fine_grained_terms) {
        for (const term of view.fine_grained_terms) {
            controls.append(moveButton("fine_grained", term, { move: "fine_grained", term }, handlers));
        }
    }
    if (moves.has("back")) {
        controls.append(moveButton("back", "Back", { move: "back" }, handlers));
    }
    root.append(controls);
    return root;
}
/** Non-blocking banner for a server-rejected request. */
export function renderRejection(detail) {
    const banner = el("div", "banner banner-rejection", `Not available: ${detail}`);
    banner.dataset.role = "rejection";
    return banner;
}
/** Banner for schema mismatches and transport errors. */
export function renderErrorBanner(message) {
    const banner = el("div", "banner banner-error", message);
    banner.dataset.role = "error";
    return banner;
}
