"""Attraction corpus ingestion."""

from .loader import (
    load_attractions,
    load_knowledge,
    load_prompts,
    load_stopwords,
    save_knowledge,
    write_attractions,
)

__all__ = [
    "load_attractions",
    "write_attractions",
    "load_stopwords",
    "load_prompts",
    "load_knowledge",
    "save_knowledge",
]
