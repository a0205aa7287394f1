"""Sparse TF-IDF and dense embedding vectorization."""

from .embeddings import EmbeddingTable, HashingEmbedder, load_embeddings, write_embeddings
from .tfidf import (
    SparseVector,
    TfIdfModel,
    fit_tfidf,
    fit_transform,
    tfidf_weight,
    transform,
    transform_many,
)

__all__ = [
    "tfidf_weight",
    "SparseVector",
    "TfIdfModel",
    "fit_tfidf",
    "fit_transform",
    "transform",
    "transform_many",
    "EmbeddingTable",
    "HashingEmbedder",
    "load_embeddings",
    "write_embeddings",
]
