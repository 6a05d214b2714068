"""Cold-start personalization via proxy users.

New participants have no rating history, so they state the five hotel
features that matter most to them, in order. The existing user whose
predicted feature-attention ranking is closest to that statement (smallest
rank-displacement sum over the five stated features) becomes their proxy;
the proxy's predictions drive recommendations and explanations for the
whole session.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional

from .corpus import ALL_CATEGORIES, FeatureCategory
from .efm import EfmModel, IndexOutOfRange, ModelNotTrained, predict_attention, \
    predict_rating, rating_to_circles
from .explain import DialogState, Interactivity, PresentationStyle

DEFAULT_RECOMMENDATION_LIMIT = 30


@dataclass(frozen=True)
class StatedPreferences:
    """Exactly five distinct features, most important first."""

    ranked_features: tuple[FeatureCategory, ...]

    def __post_init__(self):
        if len(self.ranked_features) != 5:
            raise ValueError("exactly 5 features must be ranked")
        if len(set(self.ranked_features)) != 5:
            raise ValueError("ranked features must be distinct")

    @classmethod
    def from_ids(cls, ids) -> "StatedPreferences":
        return cls(tuple(FeatureCategory.from_id(s) for s in ids))

    def to_json(self) -> list[str]:
        return [f.id for f in self.ranked_features]


@dataclass
class Session:
    """One participant's condition, proxy user and dialog position."""

    session_id: str
    prefs: StatedPreferences
    proxy_user_index: int
    interactivity: Interactivity
    style: PresentationStyle
    dialog: DialogState = field(default_factory=DialogState)
    created_at: int = field(default_factory=lambda: int(time.time() * 1000))

    def to_json(self) -> dict:
        return {
            "session_id": self.session_id,
            "preferences": self.prefs.to_json(),
            "proxy_user_index": self.proxy_user_index,
            "interactivity": self.interactivity.value,
            "style": self.style.value,
            "dialog": self.dialog.to_json(),
            "created_at": self.created_at,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Session":
        return cls(
            session_id=obj["session_id"],
            prefs=StatedPreferences.from_ids(obj["preferences"]),
            proxy_user_index=int(obj["proxy_user_index"]),
            interactivity=Interactivity(obj["interactivity"]),
            style=PresentationStyle(obj["style"]),
            dialog=DialogState.from_json(obj["dialog"]),
            created_at=int(obj["created_at"]),
        )


def rank_features_for_user(model: EfmModel, user_index: int) -> list[FeatureCategory]:
    """All 10 features sorted by predicted attention, descending; ties break
    by feature code ascending."""
    attention = predict_attention(model, user_index)
    return sorted(ALL_CATEGORIES, key=lambda f: (-attention[int(f)], int(f)))


def preference_distance(prefs: StatedPreferences,
                        user_ranking: list[FeatureCategory]) -> int:
    """Rank-displacement distance between the stated top-5 and a user's full
    ranking: sum over stated features of |stated rank - rank for the user|,
    both 1-based. Range 0..45; 0 iff the user's top-5 matches exactly."""
    position = {f: k + 1 for k, f in enumerate(user_ranking)}
    return sum(
        abs((k + 1) - position[f]) for k, f in enumerate(prefs.ranked_features)
    )


def select_proxy(model: Optional[EfmModel], prefs: StatedPreferences) -> int:
    """Index of the existing user closest to the stated preferences; ties
    resolve to the lowest user index."""
    if model is None or model.m < 1:
        raise ModelNotTrained("proxy selection needs a trained model with users")
    best_index, best_distance = 0, None
    for u in range(model.m):
        d = preference_distance(prefs, rank_features_for_user(model, u))
        if best_distance is None or d < best_distance:
            best_index, best_distance = u, d
    return best_index


def recommend(model: Optional[EfmModel], session: Session,
              limit: int = DEFAULT_RECOMMENDATION_LIMIT):
    """Top items for the session's proxy, sorted by predicted rating
    descending (ties by item id); returns (item_id, predicted_rating, circles)."""
    if model is None:
        raise ModelNotTrained("recommendations need a trained model")
    if limit < 1:
        raise ValueError("limit must be >= 1")
    proxy = session.proxy_user_index
    if not 0 <= proxy < model.m:
        raise IndexOutOfRange(f"proxy user index {proxy} not in 0..{model.m - 1}")
    scored = [
        (model.item_ids.id(i), predict_rating(model, proxy, i)) for i in range(model.n)
    ]
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return [
        (item_id, value, rating_to_circles(value)) for item_id, value in scored[:limit]
    ]
