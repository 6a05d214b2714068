import json

import pytest

from argurec.corpus import (
    ALL_CATEGORIES,
    FeatureCategory,
    FineGrainedLexicon,
    FormatError,
    Polarity,
    RawSentence,
    Review,
    build_sentence_records,
    map_fine_to_general,
    parse_corpus,
    read_records,
    review_to_json,
    tokenize,
    write_corpus,
    write_records,
)


def write_lines(path, lines):
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def review_line(review_id="r1", item_id="h1", user_id="u1", rating=4, sentences=None):
    return json.dumps(
        {
            "review_id": review_id,
            "item_id": item_id,
            "user_id": user_id,
            "rating": rating,
            "sentences": sentences
            if sentences is not None
            else [{"text": "I loved the bedding"}],
        }
    )


class TestFeatureCategory:
    def test_codes_are_stable(self):
        assert [int(c) for c in ALL_CATEGORIES] == list(range(10))
        assert FeatureCategory.ROOM == 0
        assert FeatureCategory.CHECKING == 9

    def test_ids_and_labels(self):
        assert FeatureCategory.FOOD_AND_BEVERAGES.id == "food_and_beverages"
        assert FeatureCategory.FOOD_AND_BEVERAGES.label == "food and beverages"
        assert FeatureCategory.from_id("room") is FeatureCategory.ROOM

    def test_unknown_id(self):
        with pytest.raises(ValueError):
            FeatureCategory.from_id("weather")


class TestParseCorpus:
    def test_empty_file(self, tmp_path):
        path = write_lines(tmp_path / "c.jsonl", [])
        assert parse_corpus(path) == []

    def test_single_review(self, tmp_path):
        path = write_lines(tmp_path / "c.jsonl", [review_line()])
        reviews = parse_corpus(path)
        assert len(reviews) == 1
        assert reviews[0].rating == 4
        assert reviews[0].sentences[0].text == "I loved the bedding"

    def test_rating_out_of_scale(self, tmp_path):
        path = write_lines(tmp_path / "c.jsonl", [review_line(rating=6)])
        with pytest.raises(FormatError) as exc:
            parse_corpus(path)
        assert exc.value.line_no == 1

    def test_fail_fast_reports_first_bad_line(self, tmp_path):
        path = write_lines(
            tmp_path / "c.jsonl",
            [review_line(), review_line(review_id="r2"), "{not json"],
        )
        with pytest.raises(FormatError) as exc:
            parse_corpus(path)
        assert exc.value.line_no == 3

    def test_missing_ids_rejected(self, tmp_path):
        bad = json.loads(review_line())
        bad["user_id"] = ""
        path = write_lines(tmp_path / "c.jsonl", [json.dumps(bad)])
        with pytest.raises(FormatError):
            parse_corpus(path)

    def test_empty_sentences_rejected(self, tmp_path):
        path = write_lines(tmp_path / "c.jsonl", [review_line(sentences=[])])
        with pytest.raises(FormatError):
            parse_corpus(path)

    def test_blank_sentence_text_rejected(self, tmp_path):
        path = write_lines(
            tmp_path / "c.jsonl", [review_line(sentences=[{"text": "   "}])]
        )
        with pytest.raises(FormatError):
            parse_corpus(path)

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(OSError):
            parse_corpus(tmp_path / "missing.jsonl")

    def test_round_trip(self, tmp_path, mini_reviews):
        out = tmp_path / "again.jsonl"
        write_corpus(mini_reviews, out)
        assert parse_corpus(out) == mini_reviews

    def test_line_order_preserved(self, tmp_path):
        lines = [review_line(review_id=f"r{i}") for i in range(5)]
        path = write_lines(tmp_path / "c.jsonl", lines)
        assert [r.review_id for r in parse_corpus(path)] == [f"r{i}" for i in range(5)]


class TestLexicon:
    def test_paper_example_bedding_maps_to_room(self, feature_lexicon):
        assert map_fine_to_general("bedding", feature_lexicon) is FeatureCategory.ROOM

    def test_lookup_is_case_insensitive(self, feature_lexicon):
        assert map_fine_to_general("BEDDING", feature_lexicon) is FeatureCategory.ROOM

    def test_absent_term(self, feature_lexicon):
        assert map_fine_to_general("weather", feature_lexicon) is None

    def test_multiword_normalization(self, feature_lexicon):
        # hyphens tokenize away, so "check-in" equals the stored "check in"
        assert map_fine_to_general("check-in", feature_lexicon) is FeatureCategory.CHECKING

    def test_duplicate_terms_conflict(self):
        with pytest.raises(ValueError):
            FineGrainedLexicon(
                {"Pool": FeatureCategory.FACILITIES, "pool": FeatureCategory.ROOM}
            )

    def test_bundled_lexicon_covers_all_categories(self, feature_lexicon):
        covered = set(feature_lexicon.entries.values())
        assert covered == set(ALL_CATEGORIES)

    def test_file_format_error(self, tmp_path):
        path = write_lines(tmp_path / "lex.tsv", ["pool facilities"])  # no tab
        with pytest.raises(FormatError):
            FineGrainedLexicon.from_file(path)

    def test_comments_and_blanks_ignored(self, tmp_path):
        path = write_lines(
            tmp_path / "lex.tsv", ["# comment", "", "pool\tfacilities"]
        )
        lex = FineGrainedLexicon.from_file(path)
        assert lex.lookup("pool") is FeatureCategory.FACILITIES


class TestTokenize:
    def test_splits_on_non_alphanumeric(self):
        assert tokenize("Check-in was 10/10!") == ["check", "in", "was", "10", "10"]

    def test_empty(self):
        assert tokenize("  ...  ") == []


class TestBuildSentenceRecords:
    def test_one_record_per_sentence(self, mini_reviews, gold_classifier):
        records = build_sentence_records(mini_reviews, gold_classifier)
        assert len(records) == sum(len(r.sentences) for r in mini_reviews)

    def test_provenance_copied(self, gold_classifier):
        review = Review(
            review_id="r9", item_id="h9", user_id="u9", rating=5,
            sentences=(
                RawSentence("I loved the bedding"),
                RawSentence("The pool was great"),
            ),
        )
        records = build_sentence_records([review], gold_classifier)
        assert len(records) == 2
        assert all(r.review_id == "r9" and r.item_id == "h9" and r.user_id == "u9"
                   for r in records)

    def test_gold_passthrough_example(self, gold_classifier):
        review = Review(
            review_id="r1", item_id="h1", user_id="u1", rating=4,
            sentences=(
                RawSentence(
                    "I loved the bedding",
                    gold_aspect="bedding",
                    gold_polarity=Polarity.POSITIVE,
                ),
            ),
        )
        rec = build_sentence_records([review], gold_classifier)[0]
        assert rec.feature is FeatureCategory.ROOM
        assert rec.polarity is Polarity.POSITIVE
        assert rec.fine_grained_term == "bedding"

    def test_unmatched_sentence_gets_no_feature(self, gold_classifier):
        review = Review(
            review_id="r1", item_id="h1", user_id="u1", rating=4,
            sentences=(RawSentence("It was an experience"),),
        )
        rec = build_sentence_records([review], gold_classifier)[0]
        assert rec.feature is None

    def test_every_feature_in_enum(self, mini_records):
        for rec in mini_records:
            if rec.feature is not None:
                assert rec.feature in ALL_CATEGORIES

    def test_term_occurs_in_text(self, mini_records):
        for rec in mini_records:
            if rec.fine_grained_term:
                hay = " " + " ".join(tokenize(rec.text)) + " "
                assert f" {rec.fine_grained_term} " in hay


class TestRecordSerialization:
    def test_round_trip(self, tmp_path, mini_records):
        out = tmp_path / "records.jsonl"
        write_records(mini_records, out)
        assert read_records(out) == mini_records
