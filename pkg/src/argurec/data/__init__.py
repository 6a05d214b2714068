"""Bundled data files: lexicons and the desk-scale mini corpus."""

from importlib.resources import files
from pathlib import Path

MINI_CORPUS = "mini_corpus.jsonl"
FEATURE_LEXICON = "feature_terms.tsv"
SENTIMENT_LEXICON = "sentiment_terms.tsv"
NEGATION_TERMS = "negation_terms.tsv"


def bundled(name: str) -> Path:
    """Filesystem path of a bundled data file."""
    return Path(str(files(__package__) / name))
