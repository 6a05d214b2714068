"""Explainable review-based hotel recommender with interactive explanations."""

__version__ = "0.1.0"
