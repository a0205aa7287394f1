"""Aligned-text and CSV renderings of the comparison tables.

Percentages are printed with four decimals; absent values print as "-".
"""

import csv
import io
from collections.abc import Sequence
from pathlib import Path

from rich.console import Console
from rich.table import Table

from ..models.evaluation import GapRow, ScoreRow

ABSENT = "-"


def fmt_count(value: float | None) -> str:
    return ABSENT if value is None else f"{value:.4f}"


def fmt_pct(value: float | None) -> str:
    return ABSENT if value is None else f"{value * 100:.4f}%"


def gap_columns() -> list[str]:
    return [
        "index",
        "tfidf_avg_hit_count",
        "tfidf_avg_hit_rate",
        "embedding_avg_hit_count",
        "embedding_avg_hit_rate",
        "avg_gap",
    ]


def gap_cells(row: GapRow) -> list[str]:
    return [
        row.index,
        fmt_count(row.tfidf_hit_count),
        fmt_pct(row.tfidf_hit_rate),
        fmt_count(row.embedding_hit_count),
        fmt_pct(row.embedding_hit_rate),
        fmt_pct(row.avg_gap),
    ]


def score_columns() -> list[str]:
    return ["model", "group", "fluency", "accuracy", "relevance", "overall", "overall_pct", "improvement"]


def score_cells(row: ScoreRow) -> list[str]:
    c = row.components
    return [
        row.model,
        row.group,
        f"{c.fluency:.4f}",
        f"{c.accuracy:.4f}",
        f"{c.relevance:.4f}",
        fmt_count(row.overall),
        fmt_pct(row.overall_pct),
        fmt_count(row.improvement) if row.improvement is not None else "",
    ]


def gap_table(rows: Sequence[GapRow], title: str = "Keyword hits by index (embedding base)") -> Table:
    table = Table(title=title)
    for i, name in enumerate(gap_columns()):
        table.add_column(name, justify="left" if i == 0 else "right")
    for row in rows:
        table.add_row(*gap_cells(row))
    return table


def score_table(rows: Sequence[ScoreRow], title: str = "Composite scores") -> Table:
    table = Table(title=title)
    for i, name in enumerate(score_columns()):
        table.add_column(name, justify="left" if i < 2 else "right")
    for row in rows:
        table.add_row(*score_cells(row))
    return table


def render_text(table: Table, width: int = 120) -> str:
    """Plain aligned text of a rich table, free of terminal escape codes."""
    console = Console(file=io.StringIO(), width=width, color_system=None, record=True)
    console.print(table)
    return console.export_text()


def write_csv(path: Path | str, header: list[str], rows: Sequence[list[str]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_gap_csv(path: Path | str, rows: Sequence[GapRow]) -> Path:
    return write_csv(path, gap_columns(), [gap_cells(r) for r in rows])


def write_score_csv(path: Path | str, rows: Sequence[ScoreRow]) -> Path:
    return write_csv(path, score_columns(), [score_cells(r) for r in rows])
