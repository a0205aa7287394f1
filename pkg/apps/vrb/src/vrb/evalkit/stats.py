"""Hit-rate and gap statistics of the vectorizer comparison.

The hit rate divides an average hit count by 3, the mean number of features
per prompt. Gaps are relative: (a - b) / b.

Published averages are over 180 prompts x 3 results = 540 retrieved texts,
so every exact average is a multiple of 1/540. Snapping a 4-decimal average
back to that grid recovers the exact count; the AVG row is the gap between
the two columns' mean counts.
"""

from collections.abc import Mapping, Sequence

from ..core.errors import DomainError
from ..models.evaluation import GapRow

FEATURES_PER_PROMPT = 3
RESULTS_PER_RUN = 540
AVG_ROW = "AVG"


def hit_rate(avg_hit_count: float, features_per_prompt: int = FEATURES_PER_PROMPT) -> float:
    """Average hit count as a fraction of the mean features per prompt."""
    return avg_hit_count / features_per_prompt


def relative_gap(a: float, b: float) -> float:
    """(a - b) / b.

    Raises:
        DomainError: If b <= 0
    """
    if b <= 0:
        raise DomainError(f"relative gap needs a positive base, got {b}")
    return (a - b) / b


def snap_to_grid(value: float, n_results: int = RESULTS_PER_RUN) -> float:
    """Nearest multiple of 1/n_results."""
    return round(value * n_results) / n_results


def table1_from_counts(
    counts: Mapping[str, tuple[float | None, float | None]],
    n_results: int | None = RESULTS_PER_RUN,
) -> list[GapRow]:
    """Build comparison rows from (tfidf, embedding) average hit counts per index.

    Rows keep the mapping's order and end with an AVG row over the indexes
    that have a value. A gap is absent when either side is. With
    ``n_results`` set, counts are first snapped to the 1/n_results grid.
    """
    rows: list[GapRow] = []
    tfidf_seen: list[float] = []
    embedding_seen: list[float] = []
    for index, (tfidf, embedding) in counts.items():
        if n_results is not None:
            tfidf = snap_to_grid(tfidf, n_results) if tfidf is not None else None
            embedding = snap_to_grid(embedding, n_results) if embedding is not None else None
        if tfidf is not None:
            tfidf_seen.append(tfidf)
        if embedding is not None:
            embedding_seen.append(embedding)
        rows.append(_gap_row(index, tfidf, embedding))

    if rows:
        rows.append(_gap_row(AVG_ROW, _mean(tfidf_seen), _mean(embedding_seen)))
    return rows


def _gap_row(index: str, tfidf: float | None, embedding: float | None) -> GapRow:
    gap = None
    if tfidf is not None and embedding is not None and embedding > 0:
        gap = relative_gap(tfidf, embedding)
    return GapRow(
        index=index,
        tfidf_hit_count=tfidf,
        tfidf_hit_rate=hit_rate(tfidf) if tfidf is not None else None,
        embedding_hit_count=embedding,
        embedding_hit_rate=hit_rate(embedding) if embedding is not None else None,
        avg_gap=gap,
    )


def _mean(values: Sequence[float]) -> float | None:
    return sum(values) / len(values) if values else None
