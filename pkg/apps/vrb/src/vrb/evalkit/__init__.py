"""Keyword-hit evaluation, comparison statistics and the composite scorer."""

from .composite import (
    composite_score,
    full_score,
    load_components,
    percentize,
    score_rows,
)
from .hits import (
    assess_all_queries,
    dump_results,
    feature_hit_score,
    hit_score,
    load_results,
    parse_results,
)
from .report import gap_table, render_text, score_table, write_gap_csv, write_score_csv
from .stats import hit_rate, relative_gap, snap_to_grid, table1_from_counts

__all__ = [
    "hit_score",
    "feature_hit_score",
    "assess_all_queries",
    "parse_results",
    "load_results",
    "dump_results",
    "hit_rate",
    "relative_gap",
    "snap_to_grid",
    "table1_from_counts",
    "composite_score",
    "full_score",
    "percentize",
    "score_rows",
    "load_components",
    "gap_table",
    "score_table",
    "render_text",
    "write_gap_csv",
    "write_score_csv",
]
