// Mirrors the service JSON schemas; the UI consumes these verbatim and
// holds no business logic of its own.

export type Interactivity = "low" | "high";
export type PresentationStyle = "text" | "table" | "bar_chart";
export type MoveKind =
  | "more_why"
  | "more_features"
  | "what_reported"
  | "fine_grained"
  | "back";

export interface Premise {
  feature: string;
  pos_count: number;
  neg_count: number;
  pct_positive?: number;
  pct_negative?: number;
  no_data?: boolean;
}

export interface Excerpt {
  text: string;
  review_id: string;
  polarity: "positive" | "negative" | "neutral";
}

export interface Claim {
  predicted_rating_display: number;
  statement_code: string;
}

export interface ExplanationPayload {
  level: "L2_overview" | "L3_feature_report" | "L4_fine_grained";
  item_id: string;
  claim: Claim;
  premises: Premise[];
  backing: Excerpt[];
  rebuttal: Excerpt[];
  refutation?: string;
  style: PresentationStyle;
  expanded: boolean;
  available_moves: MoveKind[];
  feature?: string;
  term?: string;
  fine_grained_terms?: string[];
}

export interface ListView {
  level: "L1_list";
  available_moves: MoveKind[];
}

export type ExplanationView = ExplanationPayload | ListView;

export interface RecommendationItem {
  item_id: string;
  predicted_rating: number;
  circles: number;
}

export interface SessionInfo {
  session_id: string;
  proxy_user_id: string;
}

export interface MoveRequest {
  move: MoveKind;
  item_id?: string;
  feature?: string;
  term?: string;
}

export interface UiEvent {
  kind: "view_list" | "choose_hotel";
  item_id?: string;
}

export function isListView(view: ExplanationView): view is ListView {
  return view.level === "L1_list";
}
