"""Tokenization and keyword extraction."""

from .tokenizer import TokenizerSpec, count_tokens, extract_keywords, tokenize

__all__ = ["TokenizerSpec", "tokenize", "extract_keywords", "count_tokens"]
