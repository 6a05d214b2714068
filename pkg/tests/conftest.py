import numpy as np
import pytest

from argurec import data
from argurec.aspect import (
    AspectSentimentClassifier,
    ClassifierMode,
    load_negation_terms,
    load_sentiment_lexicon,
)
from argurec.corpus import FineGrainedLexicon, build_sentence_records, parse_corpus
from argurec.efm import EfmModel, Hyperparams, IndexTable
from argurec.explain import DialogState, Interactivity, PresentationStyle
from argurec.personalize import Session, StatedPreferences

DEFAULT_PREF_IDS = ["room", "price", "staff", "location", "facilities"]


@pytest.fixture(scope="session")
def feature_lexicon():
    return FineGrainedLexicon.from_file(data.bundled(data.FEATURE_LEXICON))


@pytest.fixture(scope="session")
def sentiment_lexicon():
    return load_sentiment_lexicon(data.bundled(data.SENTIMENT_LEXICON))


@pytest.fixture(scope="session")
def negation_terms():
    return load_negation_terms(data.bundled(data.NEGATION_TERMS))


@pytest.fixture(scope="session")
def gold_classifier(feature_lexicon, sentiment_lexicon, negation_terms):
    return AspectSentimentClassifier(
        mode=ClassifierMode.GOLD_PASSTHROUGH,
        lexicon=feature_lexicon,
        sentiment_lexicon=sentiment_lexicon,
        negation_terms=negation_terms,
    )


@pytest.fixture(scope="session")
def rule_classifier(feature_lexicon, sentiment_lexicon, negation_terms):
    return AspectSentimentClassifier(
        mode=ClassifierMode.LEXICON_RULE,
        lexicon=feature_lexicon,
        sentiment_lexicon=sentiment_lexicon,
        negation_terms=negation_terms,
    )


@pytest.fixture(scope="session")
def mini_reviews():
    return parse_corpus(data.bundled(data.MINI_CORPUS))


@pytest.fixture(scope="session")
def mini_records(mini_reviews, gold_classifier):
    return build_sentence_records(mini_reviews, gold_classifier)


@pytest.fixture(scope="session")
def mini_model(mini_reviews, mini_records):
    from argurec.efm import RatingMatrix, build_attention_matrix, build_quality_matrix, train

    ratings = RatingMatrix.from_reviews(mini_reviews)
    attention = build_attention_matrix(mini_records, ratings.user_ids)
    quality = build_quality_matrix(mini_records, ratings.item_ids)
    h = Hyperparams(r=3, r_h=2, max_epochs=80, seed=12, learning_rate=0.01)
    return train(ratings, attention, quality, h)


def build_toy_model(attention_rows, item_ratings, item_ids=None, user_ids=None):
    """Model with exact hand-chosen predictions.

    Factor rank 11: columns 0..9 carry per-user attention (V = identity on
    those columns, so predicted attention equals attention_rows exactly) and
    column 10 carries the per-item predicted rating against a constant 1 in
    U1, so predict_rating(u, i) == item_ratings[i] for every user.
    Attention values must be nonnegative.
    """
    attention = np.asarray(attention_rows, dtype=float)
    m = attention.shape[0]
    ratings = np.asarray(item_ratings, dtype=float)
    n = ratings.shape[0]
    u1 = np.hstack([attention, np.ones((m, 1))])
    u2 = np.zeros((n, 11))
    u2[:, 10] = ratings
    v = np.hstack([np.eye(10), np.zeros((10, 1))])
    return EfmModel(
        U1=u1,
        U2=u2,
        V=v,
        H1=np.zeros((m, 0)),
        H2=np.zeros((n, 0)),
        hyperparams=Hyperparams(r=11, r_h=0),
        user_ids=IndexTable(user_ids or [f"user{i}" for i in range(m)]),
        item_ids=IndexTable(item_ids or [f"item{i}" for i in range(n)]),
        training_log=[0.0],
    )


@pytest.fixture
def toy_model_factory():
    return build_toy_model


@pytest.fixture
def session_factory():
    def make(interactivity="high", style="text", proxy=0, dialog=None, session_id="s-test"):
        return Session(
            session_id=session_id,
            prefs=StatedPreferences.from_ids(DEFAULT_PREF_IDS),
            proxy_user_index=proxy,
            interactivity=Interactivity(interactivity),
            style=PresentationStyle(style),
            dialog=dialog or DialogState(),
        )

    return make
