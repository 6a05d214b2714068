#!/usr/bin/env python3
"""Regenerate the bundled desk-scale mini corpus (20 hotels).

The output is committed; this script only exists to rebuild it after a
lexicon change. Two cells are engineered so tests can assert known
consolidation values:

* user u_solo mentions exactly one feature once (price, on h01);
* hotel h02 has exactly 3 positive and 1 negative room sentences.
"""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from argurec import data
from argurec.corpus import (
    FeatureCategory,
    FineGrainedLexicon,
    Polarity,
    RawSentence,
    Review,
    write_corpus,
)
from argurec.aspect import load_sentiment_lexicon

SEED = 20240
N_HOTELS = 20
N_USERS = 25

POSITIVE_TEMPLATES = [
    "The {term} was excellent.",
    "We loved the {term}.",
    "Really wonderful {term}.",
    "The {term} was great and clean.",
    "Such a pleasant {term}.",
]
NEGATIVE_TEMPLATES = [
    "The {term} was terrible.",
    "Very disappointing {term}.",
    "The {term} was dirty and awful.",
    "Sadly the {term} was poor.",
]
NEUTRAL_TEMPLATES = [
    "We asked about the {term}.",
    "They told us about the {term}.",
    "Our stay included the {term}.",
]


def build_term_pools():
    lexicon = FineGrainedLexicon.from_file(data.bundled(data.FEATURE_LEXICON))
    sentiment = set(load_sentiment_lexicon(data.bundled(data.SENTIMENT_LEXICON)))
    pools = {cat: [] for cat in FeatureCategory}
    for term, cat in sorted(lexicon.entries.items()):
        if term not in sentiment:
            pools[cat].append(term)
    return pools


def make_sentence(rng, term, polarity):
    templates = {
        "positive": POSITIVE_TEMPLATES,
        "negative": NEGATIVE_TEMPLATES,
        "neutral": NEUTRAL_TEMPLATES,
    }[polarity]
    return RawSentence(
        text=rng.choice(templates).format(term=term),
        gold_aspect=term,
        gold_polarity=Polarity(polarity),
    )


def rating_for(sentences):
    diff = sum(1 for s in sentences if s.gold_polarity is Polarity.POSITIVE) - sum(
        1 for s in sentences if s.gold_polarity is Polarity.NEGATIVE
    )
    return max(1, min(5, 3 + diff))


def main():
    rng = random.Random(SEED)
    pools = build_term_pools()
    hotels = [f"h{i:02d}" for i in range(1, N_HOTELS + 1)]
    users = [f"u{i:02d}" for i in range(1, N_USERS + 1)]
    # every regular user reviews somewhere; extra slots drawn at random
    user_cycle = list(users)
    rng.shuffle(user_cycle)

    # per-hotel positivity so quality varies across items
    hotel_quality = {h: rng.uniform(0.25, 0.9) for h in hotels}

    reviews = []
    review_no = 0

    def next_review_id():
        nonlocal review_no
        review_no += 1
        return f"r{review_no:04d}"

    for hotel in hotels:
        categories = list(FeatureCategory)
        if hotel == "h02":
            categories = [c for c in categories if c is not FeatureCategory.ROOM]
        for _ in range(rng.randint(3, 6)):
            user = user_cycle.pop() if user_cycle else rng.choice(users)
            n_sentences = rng.randint(2, 5)
            sentences = []
            for _ in range(n_sentences):
                cat = rng.choice(categories)
                term = rng.choice(pools[cat])
                q = hotel_quality[hotel]
                draw = rng.random()
                if draw < q:
                    polarity = "positive"
                elif draw < q + (1 - q) * 0.7:
                    polarity = "negative"
                else:
                    polarity = "neutral"
                sentences.append(make_sentence(rng, term, polarity))
            reviews.append(
                Review(
                    review_id=next_review_id(),
                    item_id=hotel,
                    user_id=user,
                    rating=rating_for(sentences),
                    sentences=tuple(sentences),
                )
            )

    # engineered: h02 gets exactly 3 positive + 1 negative room sentences
    room_sentences = (
        make_sentence(rng, "bed", "positive"),
        make_sentence(rng, "bedding", "positive"),
        make_sentence(rng, "mattress", "positive"),
        make_sentence(rng, "pillow", "negative"),
    )
    reviews.append(
        Review(
            review_id=next_review_id(),
            item_id="h02",
            user_id=rng.choice(users),
            rating=rating_for(room_sentences),
            sentences=room_sentences,
        )
    )

    # engineered: u_solo's only sentence anywhere is one price mention
    reviews.append(
        Review(
            review_id=next_review_id(),
            item_id="h01",
            user_id="u_solo",
            rating=3,
            sentences=(make_sentence(rng, "price", "neutral"),),
        )
    )

    out = Path(__file__).resolve().parents[1] / "src" / "argurec" / "data" / data.MINI_CORPUS
    write_corpus(reviews, out)
    n_sent = sum(len(r.sentences) for r in reviews)
    print(f"wrote {len(reviews)} reviews / {n_sent} sentences to {out}")


if __name__ == "__main__":
    main()
