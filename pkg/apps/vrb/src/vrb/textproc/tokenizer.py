"""Tokenization, stop-word filtering and keyword extraction.

CJK text carries no word boundaries, so the CJK-aware modes emit characters
and/or overlapping character bigrams for each contiguous CJK run. Everything
else is split into words. The same tokenizer feeds the TF-IDF vocabulary and
the keyword-hit evaluator, so both sides see identical token spaces.
"""

import re
from collections.abc import Iterator
from dataclasses import dataclass, field

from ..corpus.loader import load_stopwords
from ..models.bench import TokenizerConfig, TokenizerMode

# Han ideographs (BMP + extension blocks), kana, hangul syllables, compatibility ideographs
_CJK = (
    "\u3040-\u30ff"
    "\u3400-\u4dbf"
    "\u4e00-\u9fff"
    "\uac00-\ud7af"
    "\uf900-\ufaff"
    "\U00020000-\U0002ebef"
    "\U00030000-\U0003134f"
)

# A CJK run, or a run of word characters that are not CJK. Punctuation and
# symbols separate tokens in the CJK-aware modes.
_RUN_RE = re.compile(rf"(?P<cjk>[{_CJK}]+)|(?P<word>(?:(?![{_CJK}])\w)+)")


@dataclass(frozen=True)
class TokenizerSpec:
    """Tokenizer settings; a fitted vocabulary is only valid for the spec it was built with."""

    mode: TokenizerMode = TokenizerMode.UNICODE_MIXED
    stopwords: frozenset[str] = field(default_factory=frozenset)
    lowercase: bool = True

    def __post_init__(self) -> None:
        words = frozenset(self.stopwords)
        if self.lowercase:
            words = frozenset(w.lower() for w in words)
        object.__setattr__(self, "stopwords", words)

    @classmethod
    def from_config(cls, config: TokenizerConfig) -> "TokenizerSpec":
        """Build a spec from the bench document, loading the stop-word file if set."""
        stopwords = load_stopwords(config.stopwords) if config.stopwords else set()
        return cls(mode=config.mode, stopwords=frozenset(stopwords), lowercase=config.lowercase)


def tokenize(spec: TokenizerSpec, text: str) -> list[str]:
    """Split text into an ordered token list per the spec's mode, minus stop-words."""
    if spec.lowercase:
        text = text.lower()
    if spec.mode is TokenizerMode.WHITESPACE:
        raw: Iterator[str] = iter(text.split())
    else:
        raw = _cjk_aware_tokens(text, with_chars=spec.mode is TokenizerMode.UNICODE_MIXED)
    return [token for token in raw if token not in spec.stopwords]


def extract_keywords(spec: TokenizerSpec, text: str) -> set[str]:
    """Distinct tokens of ``text``; used for both queries and retrieved texts."""
    return set(tokenize(spec, text))


def count_tokens(spec: TokenizerSpec, text: str) -> int:
    """Token count under ``spec``; an approximation of model tokens."""
    return len(tokenize(spec, text))


def _cjk_aware_tokens(text: str, with_chars: bool) -> Iterator[str]:
    for match in _RUN_RE.finditer(text):
        run = match.group("cjk")
        if run is None:
            yield match.group("word")
            continue
        if len(run) == 1:
            yield run
            continue
        for i in range(len(run)):
            if with_chars:
                yield run[i]
            if i + 1 < len(run):
                yield run[i : i + 2]
