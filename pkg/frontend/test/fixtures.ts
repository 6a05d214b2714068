import type { ExplanationPayload, MoveKind, PresentationStyle } from "../src/types.js";

export function overviewPayload(
  moves: MoveKind[],
  style: PresentationStyle = "table",
): ExplanationPayload {
  return {
    level: "L2_overview",
    item_id: "h01",
    claim: { predicted_rating_display: 4, statement_code: "predicted_rating_claim" },
    premises: [
      { feature: "room", pos_count: 3, neg_count: 1, pct_positive: 75, pct_negative: 25 },
      { feature: "price", pos_count: 2, neg_count: 3, pct_positive: 40, pct_negative: 60 },
      { feature: "staff", pos_count: 0, neg_count: 0, no_data: true },
    ],
    backing: [],
    rebuttal: [],
    style,
    expanded: false,
    available_moves: moves,
  };
}

export function reportPayload(): ExplanationPayload {
  return {
    ...overviewPayload(["fine_grained", "what_reported", "back"]),
    level: "L3_feature_report",
    feature: "room",
    refutation: "majority_positive",
    backing: [
      { text: "The bedding was lovely", review_id: "r1", polarity: "positive" },
      { text: "Great bed", review_id: "r2", polarity: "positive" },
    ],
    rebuttal: [{ text: "The bedding was worn", review_id: "r3", polarity: "negative" }],
    fine_grained_terms: ["bed", "bedding"],
  };
}

export function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
