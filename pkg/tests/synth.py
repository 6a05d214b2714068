"""Seeded synthetic data generators; the generator itself is the oracle."""

import numpy as np

from argurec.corpus import Polarity, RawSentence, Review
from argurec.efm import (
    AttentionMatrix,
    IndexTable,
    N_FEATURES,
    QualityMatrix,
    RatingMatrix,
)


def make_synthetic_matrices(seed, m=60, n=50, r=4, r_h=4, density=0.3,
                            holdout_fraction=0.1):
    """Rating/attention/quality matrices generated from nonnegative
    ground-truth factors, plus a held-out set of unobserved true ratings.

    Returns (A, X, Y, holdout, truth) where holdout is a list of
    (user_index, item_index, true_rating) disjoint from A's observations.
    """
    rng = np.random.default_rng(seed)
    truth = {
        "U1": rng.uniform(0.35, 0.95, (m, r)),
        "U2": rng.uniform(0.35, 0.95, (n, r)),
        "V": rng.uniform(0.6, 1.4, (N_FEATURES, r)),
        "H1": rng.uniform(0.2, 0.8, (m, r_h)),
        "H2": rng.uniform(0.2, 0.8, (n, r_h)),
    }
    a_full = np.clip(truth["U1"] @ truth["U2"].T + truth["H1"] @ truth["H2"].T, 1.0, 5.0)
    x_full = np.clip(truth["U1"] @ truth["V"].T, 1.0, 5.0)
    y_full = np.clip(truth["U2"] @ truth["V"].T, 1.0, 5.0)

    cells = [(i, j) for i in range(m) for j in range(n)]
    rng.shuffle(cells)
    n_observed = int(density * len(cells))
    n_holdout = int(holdout_fraction * len(cells))
    observed = cells[:n_observed]
    held_out = cells[n_observed : n_observed + n_holdout]

    users = IndexTable([f"u{i:03d}" for i in range(m)])
    items = IndexTable([f"i{j:03d}" for j in range(n)])
    A = RatingMatrix(
        user_ids=users,
        item_ids=items,
        entries={(i, j): float(a_full[i, j]) for i, j in observed},
    )
    X = AttentionMatrix(
        m=m,
        entries={
            (i, j): float(x_full[i, j])
            for i in range(m)
            for j in range(N_FEATURES)
            if rng.random() < 0.5
        },
    )
    Y = QualityMatrix(
        n=n,
        entries={
            (i, j): float(y_full[i, j])
            for i in range(n)
            for j in range(N_FEATURES)
            if rng.random() < 0.5
        },
    )
    holdout = [(i, j, float(a_full[i, j])) for i, j in held_out]
    return A, X, Y, holdout, truth


_POS_TEXT = "The {term} was excellent."
_NEG_TEXT = "The {term} was terrible."
_TERMS = ["bedding", "price", "staff", "location", "pool",
          "shower", "atmosphere", "breakfast", "heating", "checkin"]


def make_synthetic_corpus(seed, m=40, n=30, r=3, reviews_per_user=8):
    """A review corpus whose integer ratings come from a nonnegative factor
    model, for end-to-end training through the CLI. Returns (reviews, truth)
    with truth['rating'][u][i] the real-valued ground truth."""
    rng = np.random.default_rng(seed)
    u1 = rng.uniform(0.5, 1.1, (m, r))
    u2 = rng.uniform(0.5, 1.1, (n, r))
    ratings = np.clip(u1 @ u2.T, 1.0, 5.0)
    reviews = []
    counter = 0
    for u in range(m):
        items = rng.choice(n, size=min(reviews_per_user, n), replace=False)
        for i in sorted(items):
            counter += 1
            term = _TERMS[int(rng.integers(len(_TERMS)))]
            positive = ratings[u, i] >= 3.0
            text = (_POS_TEXT if positive else _NEG_TEXT).format(term=term)
            reviews.append(
                Review(
                    review_id=f"r{counter:05d}",
                    item_id=f"i{i:03d}",
                    user_id=f"u{u:03d}",
                    rating=int(np.clip(np.round(ratings[u, i]), 1, 5)),
                    sentences=(
                        RawSentence(
                            text,
                            gold_aspect=term,
                            gold_polarity=Polarity.POSITIVE if positive else Polarity.NEGATIVE,
                        ),
                    ),
                )
            )
    return reviews, {"rating": ratings}
