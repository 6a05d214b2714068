"""Operator command line: ingest a corpus, train, serve the API, stats.

Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter

from . import analytics, corpus, data, efm
from .aspect import AspectSentimentClassifier, ClassifierMode, load_negation_terms, \
    load_sentiment_lexicon
from .corpus import FineGrainedLexicon, FormatError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_RUNTIME = 3


def _build_classifier(args) -> AspectSentimentClassifier:
    return AspectSentimentClassifier(
        mode=ClassifierMode(args.mode),
        lexicon=FineGrainedLexicon.from_file(args.lexicon),
        sentiment_lexicon=load_sentiment_lexicon(args.sentiment_lexicon),
        negation_terms=load_negation_terms(args.negations),
    )


def cmd_ingest(args) -> int:
    reviews = corpus.parse_corpus(args.corpus)
    records = corpus.build_sentence_records(reviews, _build_classifier(args))
    corpus.write_records(records, args.records)
    by_feature = Counter(r.feature.id if r.feature is not None else "none" for r in records)
    by_polarity = Counter(r.polarity.value for r in records)
    print(f"wrote {len(records)} records to {args.records}")
    for feature, count in sorted(by_feature.items()):
        print(f"  feature {feature}: {count}")
    for polarity, count in sorted(by_polarity.items()):
        print(f"  polarity {polarity}: {count}")
    return EXIT_OK


def cmd_train(args) -> int:
    reviews = corpus.parse_corpus(args.corpus)
    records = corpus.read_records(args.records)
    ratings = efm.RatingMatrix.from_reviews(reviews)
    attention = efm.build_attention_matrix(records, ratings.user_ids)
    quality = efm.build_quality_matrix(records, ratings.item_ids)
    h = efm.Hyperparams(
        r=args.rank,
        r_h=args.hidden_rank,
        learning_rate=args.lr,
        max_epochs=args.epochs,
        seed=args.seed,
    )
    train_matrix, holdout = efm.holdout_split(ratings, args.holdout_fraction, args.seed)
    model = efm.train(train_matrix, attention, quality, h)
    efm.save_checkpoint(model, args.checkpoint)
    tail = model.training_log[-5:]
    print(f"epochs run: {len(model.training_log) - 1}")
    print("objective tail: " + ", ".join(f"{v:.6f}" for v in tail))
    print(f"final objective: {model.training_log[-1]:.6f}")
    if holdout:
        print(f"holdout RMSE ({len(holdout)} ratings): {efm.evaluate_rmse(model, holdout):.4f}")
    else:
        print("holdout RMSE: n/a (not enough ratings to hold out)")
    print(f"checkpoint written to {args.checkpoint}")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    model = efm.load_checkpoint(args.checkpoint)
    records = corpus.read_records(args.records)
    app = create_app(
        model,
        records,
        args.storage,
        condition_seed=args.condition_seed,
        default_limit=args.limit,
    )
    if args.ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=args.ui_dir, html=True), name="ui")
    host, _, port = args.addr.rpartition(":")
    host = host or "127.0.0.1"
    if not port.isdigit() or not 1 <= int(port) <= 65535:
        raise ValueError(f"bad address {args.addr!r}, expected host:port")
    uvicorn.run(app, host=host, port=int(port), log_level="info")
    return EXIT_OK


def cmd_stats(args) -> int:
    from .personalize import Session
    from .service import Event

    sessions = []
    with open(args.sessions, encoding="utf-8") as f:
        seen = {}
        for line in f:
            if line.strip():
                s = Session.from_json(json.loads(line))
                seen[s.session_id] = s
        sessions = sorted(seen.values(), key=lambda s: s.session_id)
    events = []
    with open(args.events, encoding="utf-8") as f:
        for line in f:
            if line.strip():
                events.append(Event.from_json(json.loads(line)))
    report = {"usage": analytics.usage_stats(events, sessions).to_json()}
    if args.questionnaires:
        responses = analytics.read_questionnaires(args.questionnaires)
        constructs = sorted({c for r in responses for c in r.construct_map})
        summary = {}
        for construct in constructs:
            scored = [r for r in responses if construct in r.construct_map]
            scores = [analytics.construct_score(r, construct) for r in scored]
            entry = {
                "n": len(scores),
                "mean": sum(scores) / len(scores),
            }
            items = scored[0].construct_map[construct]
            if len(items) >= 2 and len(scored) >= 2 and all(
                r.construct_map.get(construct) == items for r in scored
            ):
                matrix = [[r.item_scores[i] for r in scored] for i in items]
                try:
                    entry["cronbach_alpha"] = analytics.cronbach_alpha(matrix)
                except analytics.DegenerateInput:
                    entry["cronbach_alpha"] = None
            summary[construct] = entry
        report["constructs"] = summary
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="argurec",
        description="Explainable review-based hotel recommender",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ingest = sub.add_parser("ingest", help="parse a corpus into sentence records")
    ingest.add_argument("--corpus", required=True)
    ingest.add_argument("--records", required=True, help="output records JSONL path")
    ingest.add_argument("--lexicon", default=str(data.bundled(data.FEATURE_LEXICON)))
    ingest.add_argument("--sentiment-lexicon", default=str(data.bundled(data.SENTIMENT_LEXICON)))
    ingest.add_argument("--negations", default=str(data.bundled(data.NEGATION_TERMS)))
    ingest.add_argument(
        "--mode",
        choices=[m.value for m in ClassifierMode],
        default=ClassifierMode.GOLD_PASSTHROUGH.value,
    )
    ingest.set_defaults(func=cmd_ingest)

    train = sub.add_parser("train", help="train the factor model and write a checkpoint")
    train.add_argument("--corpus", required=True, help="corpus JSONL (source of ratings)")
    train.add_argument("--records", required=True, help="sentence records JSONL")
    train.add_argument("--checkpoint", required=True, help="output checkpoint path")
    train.add_argument("--seed", type=int, default=42)
    train.add_argument("--epochs", type=int, default=500)
    train.add_argument("--rank", type=int, default=5)
    train.add_argument("--hidden-rank", type=int, default=5)
    train.add_argument("--lr", type=float, default=0.005)
    train.add_argument("--holdout-fraction", type=float, default=0.1)
    train.set_defaults(func=cmd_train)

    serve = sub.add_parser("serve", help="serve the HTTP API")
    serve.add_argument("--checkpoint", required=True)
    serve.add_argument("--records", required=True)
    serve.add_argument("--addr", default="127.0.0.1:8000")
    serve.add_argument("--storage", default="./storage")
    serve.add_argument("--condition-seed", type=int, default=0)
    serve.add_argument("--limit", type=int, default=30,
                       help="default recommendation list length")
    serve.add_argument("--ui-dir", default=None, help="serve a built web UI from this directory")
    serve.set_defaults(func=cmd_serve)

    stats = sub.add_parser("stats", help="compute usage and questionnaire statistics")
    stats.add_argument("--events", required=True)
    stats.add_argument("--sessions", required=True)
    stats.add_argument("--questionnaires", default=None)
    stats.set_defaults(func=cmd_stats)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (FormatError, OSError, json.JSONDecodeError, efm.CheckpointVersionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except (ValueError, KeyError, efm.DimensionMismatch) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
